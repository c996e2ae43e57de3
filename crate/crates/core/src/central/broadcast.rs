use super::{ensure_round, greedy_exchange_round, load_balance, scheduler_rng, CentralError, CentralParams, ItemPool, StageLog};
use crate::net::{Engine, NodeId, TokenId};
use crate::token_set::TokenSet;

const RANK_TAG: u32 = 0xb0;

fn full_nodes(engine: &Engine<'_>, scope: &TokenSet) -> Vec<NodeId> {
    (0..engine.n() as u32)
        .map(NodeId)
        .filter(|&v| engine.state().holdings(v).is_superset(scope))
        .collect()
}

fn arrivals_so_far(engine: &Engine<'_>) -> usize {
    engine.result().per_round_new_arrivals.iter().map(|&a| a as usize).sum()
}

/// Spreads `scope` from `source`, which must hold all of it, to every node.
///
/// Each stage fixes the full nodes `F` (holding all of `scope`) and the rest
/// `R`, then runs phases of one distribution segment (`scope`, padded to `n`
/// items, load balanced from `F` over `R`) followed by up to `n` rounds of
/// greedy exchange restricted to `scope`. Stops as soon as every node is
/// full; fails once the stage cap is spent.
pub fn n_broadcast(
    engine: &mut Engine<'_>,
    source: NodeId,
    scope: &TokenSet,
    params: &CentralParams,
) -> Result<Vec<StageLog>, CentralError> {
    if !engine.state().holdings(source).is_superset(scope) {
        return Err(CentralError::Precondition(format!("source {source} does not hold every token")));
    }
    let n = engine.n();
    let tokens: Vec<TokenId> = scope.iter().collect();
    let mut rng = scheduler_rng(engine, RANK_TAG);
    let phases = params.phases(n);
    let mut logs = Vec::new();
    let mut full = full_nodes(engine, scope);

    for stage in 0..params.stages(n) {
        if full.len() == n || tokens.is_empty() {
            return Ok(logs);
        }
        let rest: Vec<NodeId> = (0..n as u32).map(NodeId).filter(|v| full.binary_search(v).is_err()).collect();
        let start = engine.rounds_executed() as usize;
        let moved_before = arrivals_so_far(engine);
        let full_before = full.len();
        let mut overage = 0;
        let mut phases_run = 0;
        'phases: for _ in 0..phases {
            phases_run += 1;
            let pool = ItemPool::with_copies(&tokens, 1, n, &mut rng);
            let cap = pool.len() * n + n * n;
            let outcome = load_balance(engine, &full, &rest, &pool, cap)?;
            overage += outcome.log.overage_rounds;
            for _ in 0..n {
                if full_nodes(engine, scope).len() == n {
                    break 'phases;
                }
                ensure_round(engine)?;
                let plan = greedy_exchange_round(engine.state(), engine.adjacency(), Some(scope));
                engine.execute(&plan)?;
            }
        }
        let now_full = full_nodes(engine, scope);
        if now_full.len() < full_before {
            return Err(CentralError::Invariant("full-node count decreased".into()));
        }
        logs.push(StageLog {
            stage: format!("n-broadcast stage {}", stage + 1),
            rounds: engine.rounds_executed() as usize - start,
            tokens_moved: arrivals_so_far(engine) - moved_before,
            overage_rounds: overage,
            note: format!("{phases_run} phases, full nodes {full_before} -> {}", now_full.len()),
        });
        full = now_full;
    }
    if full.len() == n {
        Ok(logs)
    } else {
        Err(CentralError::CapExhausted {
            stage: "n-broadcast".into(),
            rounds: logs.iter().map(|l| l.rounds).sum(),
        })
    }
}
