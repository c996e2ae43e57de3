//! Centralized scheduling: a scheduler that sees the whole current
//! snapshot and every node's holdings, but never future snapshots.
//!
//! [`load_balance`] spreads items over a node set in random rank order,
//! [`greedy_exchange_round`] gives every node a maximum set of new tokens
//! in one round, [`n_broadcast`] spreads a token set from one node, and
//! [`k_gossip_centralized`] handles arbitrary initial distributions.

mod broadcast;
mod exchange;
mod gossip;
mod load_balance;
mod matching;

pub use broadcast::n_broadcast;
pub use exchange::{exchange_instance, greedy_exchange_round};
pub use gossip::{flood_token, k_gossip_centralized, reduce_k_to_n, Strategy, TokenGrouping};
pub use load_balance::{load_balance, Item, ItemPool, LoadBalanceOutcome};
pub use matching::{hopcroft_karp, max_bipartite_matching, BipartiteInstance};

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::net::Engine;

/// Stage constants. All of them scale a bound the algorithm only fixes
/// asymptotically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CentralParams {
    /// Phases per broadcast stage: `ceil(c_phase * sqrt(n) * log2 n)`.
    pub c_phase: f64,
    /// Broadcast stage cap: `ceil(c_stage * log2 n)`.
    pub c_stage: f64,
    /// Exchange stops once some node misses at most `ceil(c_ex * sqrt(n) * log2 n)` group tokens.
    pub c_ex: f64,
    /// Exchange cap: `c_cap * n^1.5 * log2 n` rounds.
    pub c_cap: f64,
    /// Cover set cap: `ceil(c_s * sqrt(n) * log2 n)` nodes.
    #[serde(rename = "c_S", alias = "c_s")]
    pub c_s: f64,
    pub strategy: Strategy,
}

impl Default for CentralParams {
    fn default() -> Self {
        CentralParams {
            c_phase: 1.0,
            c_stage: 3.0,
            c_ex: 1.0,
            c_cap: 8.0,
            c_s: 2.0,
            strategy: Strategy::Auto,
        }
    }
}

fn log2n(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

fn sqrtn(n: usize) -> f64 {
    (n as f64).sqrt()
}

impl CentralParams {
    pub fn phases(&self, n: usize) -> usize {
        ((self.c_phase * sqrtn(n) * log2n(n)).ceil() as usize).max(1)
    }

    pub fn stages(&self, n: usize) -> usize {
        ((self.c_stage * log2n(n)).ceil() as usize).max(1)
    }

    pub fn exchange_slack(&self, n: usize) -> usize {
        (self.c_ex * sqrtn(n) * log2n(n)).ceil() as usize
    }

    pub fn exchange_cap(&self, n: usize) -> usize {
        ((self.c_cap * (n as f64).powf(1.5) * log2n(n)).ceil() as usize).max(1)
    }

    pub fn cover_cap(&self, n: usize) -> usize {
        ((self.c_s * sqrtn(n) * log2n(n)).ceil() as usize).max(1)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLog {
    pub stage: String,
    pub rounds: usize,
    /// New `(node, token)` arrivals during the stage.
    pub tokens_moved: usize,
    /// Rounds beyond the stage's nominal length.
    pub overage_rounds: usize,
    pub note: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CentralError {
    #[error("load balancing needs at least one target node")]
    EmptyTargets,
    #[error("load balancing needs at least one item")]
    EmptyPool,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("stage `{stage}` exhausted its budget after {rounds} rounds")]
    CapExhausted { stage: String, rounds: usize },
    #[error("cover set needs {needed} nodes, cap is {cap}")]
    CoverTooLarge { needed: usize, cap: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl CentralError {
    /// Whether the run merely ran out of rounds.
    pub fn is_round_limit(&self) -> bool {
        matches!(self, CentralError::Sim(SimError::RoundLimit(_)))
    }
}

pub(crate) fn ensure_round(engine: &Engine<'_>) -> Result<(), CentralError> {
    if engine.rounds_left() == 0 {
        return Err(SimError::RoundLimit(engine.rounds_executed() as usize).into());
    }
    Ok(())
}

/// Random stream for scheduler decisions made at the next round.
pub(crate) fn scheduler_rng(engine: &Engine<'_>, tag: u32) -> rand_chacha::ChaCha8Rng {
    engine.streams().round_stream(engine.next_round(), tag)
}
