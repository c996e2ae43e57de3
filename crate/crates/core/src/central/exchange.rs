use super::matching::{max_bipartite_matching, BipartiteInstance};
use crate::net::{Adjacency, NodeId, TokenState, TransferPlan};
use crate::token_set::TokenSet;

/// `H_v` for node `v`: its neighbors against the tokens they hold and `v`
/// lacks, restricted to `scope` when given.
pub fn exchange_instance(state: &TokenState, adjacency: &Adjacency, v: NodeId, scope: Option<&TokenSet>) -> BipartiteInstance {
    let own = state.holdings(v);
    let mut instance = BipartiteInstance::default();
    let mut candidates = TokenSet::new(state.universe());
    for &u in adjacency.neighbors(v) {
        instance.left.push(u);
        for t in state.holdings(u).difference(own) {
            if scope.is_none_or(|s| s.contains(t)) {
                instance.edges.push((u, t));
                candidates.insert(t);
            }
        }
    }
    instance.right = candidates.iter().collect();
    instance
}

/// One round of greedy exchange: every node receives a maximum set of new
/// distinct tokens from its neighbors. Edge `(u, v)` is only ever used by
/// `v`'s matching, so the per-node plans never collide.
pub fn greedy_exchange_round(state: &TokenState, adjacency: &Adjacency, scope: Option<&TokenSet>) -> TransferPlan {
    let mut plan = TransferPlan::new();
    for v in (0..state.n() as u32).map(NodeId) {
        let instance = exchange_instance(state, adjacency, v, scope);
        if instance.edges.is_empty() {
            continue;
        }
        for (u, t) in max_bipartite_matching(&instance) {
            plan.push(u, v, t);
        }
    }
    plan
}
