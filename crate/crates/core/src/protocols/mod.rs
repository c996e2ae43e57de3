//! Distributed token-forwarding protocols.
//!
//! Every protocol decides a round's sends from per-node [`LocalView`]s and
//! a per-`(round, node)` random stream. Draw order is canonical: ascending
//! node, and within a node ascending neighbor.

mod diff;
mod flood;
mod skb;

pub use diff::{rand_diff_node, rand_diff_step, sym_diff_step, RandDiff, SymDiff};
pub use flood::{flood_step, Flood};
pub use skb::{
    check_skb_policy, skb_step, uniform_skb, PolicyViolation, SkbContext, SkbPolicy, SkbPolicyReport, SkbProtocol,
    UniformSkb,
};

use rand_chacha::ChaCha8Rng;

use crate::error::SimError;
use crate::net::{Adjacency, NetworkSnapshot, NodeId, Round, RngStreams, TokenId, TokenState, TransferPlan};
use crate::token_set::TokenSet;

/// What a protocol may look at when planning one round.
pub struct RoundContext<'a> {
    pub round: Round,
    pub snapshot: &'a NetworkSnapshot,
    pub adjacency: &'a Adjacency,
    pub state: &'a TokenState,
    pub streams: &'a RngStreams,
}

impl<'a> RoundContext<'a> {
    pub fn rng(&self, node: NodeId) -> ChaCha8Rng {
        self.streams.stream(self.round, node)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.state.n() as u32).map(NodeId)
    }

    /// View for difference-based protocols: own tokens plus neighbors' tokens
    /// as of the start of the round.
    pub fn neighbor_view(&self, node: NodeId) -> LocalView<'a> {
        LocalView {
            node,
            round: self.round,
            own_tokens: self.state.holdings(node),
            neighbor_tokens: Some(
                self.adjacency
                    .neighbors(node)
                    .iter()
                    .map(|&v| (v, self.state.holdings(v)))
                    .collect(),
            ),
            arrivals: None,
        }
    }

    /// View for SKB protocols: own tokens and their arrival history only.
    pub fn history_view(&self, node: NodeId) -> LocalView<'a> {
        LocalView {
            node,
            round: self.round,
            own_tokens: self.state.holdings(node),
            neighbor_tokens: None,
            arrivals: Some(self.state.arrivals(node)),
        }
    }
}

/// A node's knowledge at the start of a round.
#[derive(Clone, Debug)]
pub struct LocalView<'a> {
    pub node: NodeId,
    pub round: Round,
    pub own_tokens: &'a TokenSet,
    /// Neighbors in the current snapshot (ascending) with their holdings.
    pub neighbor_tokens: Option<Vec<(NodeId, &'a TokenSet)>>,
    /// `(arrival round, token)` for every held token, grouped by round.
    pub arrivals: Option<&'a [(Round, TokenId)]>,
}

impl LocalView<'_> {
    pub fn neighbors(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.neighbor_tokens.iter().flatten().map(|&(v, _)| v)
    }
}

pub trait Protocol {
    fn name(&self) -> String;
    fn plan(&mut self, ctx: &RoundContext<'_>) -> Result<TransferPlan, SimError>;
}

/// Protocol names accepted on the command line and in configs.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ProtocolName {
    RandDiff,
    SymDiff,
    SkbUniform,
    Flood(TokenId),
    CentralBroadcast,
    CentralKGossip,
}

impl ProtocolName {
    pub fn is_central(&self) -> bool {
        matches!(self, ProtocolName::CentralBroadcast | ProtocolName::CentralKGossip)
    }

    /// A boxed distributed protocol; `None` for the centralized schedulers.
    pub fn distributed(&self) -> Option<Box<dyn Protocol + Send>> {
        match self {
            ProtocolName::RandDiff => Some(Box::new(RandDiff)),
            ProtocolName::SymDiff => Some(Box::new(SymDiff)),
            ProtocolName::SkbUniform => Some(Box::new(SkbProtocol::new(Box::new(uniform_skb())))),
            ProtocolName::Flood(t) => Some(Box::new(Flood::new(*t))),
            ProtocolName::CentralBroadcast | ProtocolName::CentralKGossip => None,
        }
    }
}

impl std::fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProtocolName::RandDiff => f.write_str("rand-diff"),
            ProtocolName::SymDiff => f.write_str("sym-diff"),
            ProtocolName::SkbUniform => f.write_str("skb-uniform"),
            ProtocolName::Flood(t) => write!(f, "flood:{t}"),
            ProtocolName::CentralBroadcast => f.write_str("central-broadcast"),
            ProtocolName::CentralKGossip => f.write_str("central-kgossip"),
        }
    }
}

impl From<ProtocolName> for String {
    fn from(p: ProtocolName) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for ProtocolName {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl std::str::FromStr for ProtocolName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "rand-diff" => ProtocolName::RandDiff,
            "sym-diff" => ProtocolName::SymDiff,
            "skb-uniform" => ProtocolName::SkbUniform,
            "central-broadcast" => ProtocolName::CentralBroadcast,
            "central-kgossip" => ProtocolName::CentralKGossip,
            other => match other.strip_prefix("flood:") {
                Some(tok) => ProtocolName::Flood(TokenId(
                    tok.parse().map_err(|_| format!("bad flood token `{tok}`"))?,
                )),
                None => return Err(format!("unknown protocol `{other}`")),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in ["rand-diff", "sym-diff", "skb-uniform", "flood:3", "central-broadcast", "central-kgossip"] {
            let p: ProtocolName = name.parse().unwrap();
            assert_eq!(p.to_string(), name);
        }
        assert!("gossip".parse::<ProtocolName>().is_err());
        assert!("flood:x".parse::<ProtocolName>().is_err());
    }
}
