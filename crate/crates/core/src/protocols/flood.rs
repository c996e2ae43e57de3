use super::{Protocol, RoundContext};
use crate::error::SimError;
use crate::net::{TokenId, TransferPlan};

/// Floods a single token: every holder sends it to every neighbor lacking it.
#[derive(Clone, Copy, Debug)]
pub struct Flood {
    token: TokenId,
}

impl Flood {
    pub fn new(token: TokenId) -> Self {
        Flood { token }
    }
}

impl Protocol for Flood {
    fn name(&self) -> String {
        format!("flood:{}", self.token)
    }

    fn plan(&mut self, ctx: &RoundContext<'_>) -> Result<TransferPlan, SimError> {
        Ok(flood_step(self.token, ctx))
    }
}

pub fn flood_step(token: TokenId, ctx: &RoundContext<'_>) -> TransferPlan {
    let mut plan = TransferPlan::new();
    for u in ctx.nodes() {
        if !ctx.state.holds(u, token) {
            continue;
        }
        for &v in ctx.adjacency.neighbors(u) {
            if !ctx.state.holds(v, token) {
                plan.push(u, v, token);
            }
        }
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{apply_round, NetworkSnapshot, NodeId, RngStreams, TokenState};

    #[test]
    fn path_needs_two_rounds() {
        let snap = NetworkSnapshot::path(&[NodeId(0), NodeId(1), NodeId(2)], 3);
        let adj = snap.adjacency();
        let streams = RngStreams::new(0);
        let mut state = TokenState::single_source(3, 1, NodeId(0));
        for _ in 0..2 {
            let ctx = RoundContext { round: state.current_round() + 1, snapshot: &snap, adjacency: &adj, state: &state, streams: &streams };
            let plan = flood_step(TokenId(0), &ctx);
            apply_round(&mut state, &adj, &plan, &[]).unwrap();
        }
        assert!((0..3).all(|v| state.holds(NodeId(v), TokenId(0))));
        assert_eq!(state.arrival(TokenId(0), NodeId(2)), Some(2));
    }

    #[test]
    fn holders_surrounded_by_holders_are_silent() {
        let snap = NetworkSnapshot::complete(3);
        let adj = snap.adjacency();
        let streams = RngStreams::new(0);
        let mut state = TokenState::new(3, 1, 1);
        for v in 0..3 {
            state.give(NodeId(v), TokenId(0));
        }
        let ctx = RoundContext { round: 1, snapshot: &snap, adjacency: &adj, state: &state, streams: &streams };
        assert!(flood_step(TokenId(0), &ctx).is_empty());
    }

    #[test]
    fn star_center_reaches_all_leaves_at_once() {
        let n = 6;
        let snap = NetworkSnapshot::new(n, (1..n as u32).map(|v| (NodeId(0), NodeId(v))));
        let adj = snap.adjacency();
        let streams = RngStreams::new(0);
        let mut state = TokenState::single_source(n, 1, NodeId(0));
        let ctx = RoundContext { round: 1, snapshot: &snap, adjacency: &adj, state: &state, streams: &streams };
        let plan = flood_step(TokenId(0), &ctx);
        assert_eq!(plan.len(), n - 1);
        apply_round(&mut state, &adj, &plan, &[]).unwrap();
        assert!((0..n as u32).all(|v| state.holds(NodeId(v), TokenId(0))));
    }
}
