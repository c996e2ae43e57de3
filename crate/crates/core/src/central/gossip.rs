use serde::{Deserialize, Serialize};

use super::{
    ensure_round, greedy_exchange_round, load_balance, n_broadcast, scheduler_rng, CentralError, CentralParams, ItemPool,
    StageLog,
};
use crate::net::{Engine, NodeId, TokenId};
use crate::protocols::flood_step;
use crate::token_set::TokenSet;

const RANK_TAG: u32 = 0xc0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Flood tokens one by one when `n * k <= (n + k) * sqrt(n) * log2(n)^2`,
    /// otherwise run the pipeline.
    #[default]
    Auto,
    Pipeline,
    SequentialFlood,
}

/// Tokens `0..k` split into groups of exactly `n` ids; ids `k..` are dummies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenGrouping {
    pub groups: Vec<Vec<TokenId>>,
    pub dummies: Vec<TokenId>,
    pub real: usize,
}

impl TokenGrouping {
    pub fn is_dummy(&self, token: TokenId) -> bool {
        token.index() >= self.real
    }
}

pub fn reduce_k_to_n(k: usize, n: usize) -> TokenGrouping {
    let n = n.max(1);
    let total = k.div_ceil(n) * n;
    let ids: Vec<TokenId> = (0..total as u32).map(TokenId).collect();
    TokenGrouping {
        groups: ids.chunks(n).map(<[TokenId]>::to_vec).collect(),
        dummies: ids[k..].to_vec(),
        real: k,
    }
}

fn holders(engine: &Engine<'_>, token: TokenId) -> usize {
    engine.state().all_holdings().iter().filter(|h| h.contains(token)).count()
}

/// Floods `token` for at most `max_rounds` rounds, stopping early once every
/// node holds it. Returns the rounds used.
pub fn flood_token(engine: &mut Engine<'_>, token: TokenId, max_rounds: usize) -> Result<usize, CentralError> {
    if holders(engine, token) == 0 {
        return Err(CentralError::Precondition(format!("no node holds token {token}")));
    }
    let mut rounds = 0;
    while rounds < max_rounds && holders(engine, token) < engine.n() {
        ensure_round(engine)?;
        let plan = flood_step(token, &engine.context());
        engine.execute(&plan)?;
        rounds += 1;
    }
    Ok(rounds)
}

struct Meter {
    start: usize,
    moved: usize,
}

impl Meter {
    fn start(engine: &Engine<'_>) -> Self {
        Meter {
            start: engine.rounds_executed() as usize,
            moved: moved(engine),
        }
    }

    fn log(self, engine: &Engine<'_>, stage: &str, nominal: usize, note: String) -> StageLog {
        let rounds = engine.rounds_executed() as usize - self.start;
        StageLog {
            stage: stage.into(),
            rounds,
            tokens_moved: moved(engine) - self.moved,
            overage_rounds: rounds.saturating_sub(nominal),
            note,
        }
    }
}

fn moved(engine: &Engine<'_>) -> usize {
    engine.result().per_round_new_arrivals.iter().map(|&a| a as usize).sum()
}

/// Disseminates every tracked token of `engine` to every node.
///
/// Tokens are grouped `n` at a time. For each group: flood each token for
/// `ceil(sqrt n)` rounds; pick a cover set greedily and assign each token to
/// one cover node; every cover node load balances `ceil(sqrt n)` copies of
/// its tokens, padded to `n` items, over all nodes; greedy exchange until
/// some node misses few group tokens; broadcast its group tokens from it;
/// flood the rest one by one.
pub fn k_gossip_centralized(engine: &mut Engine<'_>, params: &CentralParams) -> Result<Vec<StageLog>, CentralError> {
    let n = engine.n();
    let tokens: Vec<TokenId> = engine.tracked().iter().collect();
    let k = tokens.len();
    let present = engine.state().tokens_in_system();
    if let Some(&t) = tokens.iter().find(|&&t| !present.contains(t)) {
        return Err(CentralError::Precondition(format!("token {t} is not held by any node")));
    }
    let mut logs = Vec::new();
    if k == 0 || engine.is_complete() {
        return Ok(logs);
    }
    let strategy = match params.strategy {
        Strategy::Auto => {
            let lg = (n.max(2) as f64).log2();
            if ((n * k) as f64) <= (n + k) as f64 * (n as f64).sqrt() * lg * lg {
                Strategy::SequentialFlood
            } else {
                Strategy::Pipeline
            }
        }
        s => s,
    };
    if strategy == Strategy::SequentialFlood {
        let meter = Meter::start(engine);
        for &t in &tokens {
            flood_token(engine, t, usize::MAX)?;
        }
        logs.push(meter.log(engine, "sequential-flood", n * k, format!("{k} tokens")));
        return Ok(logs);
    }

    let grouping = reduce_k_to_n(k, n);
    for (g, group) in grouping.groups.iter().enumerate() {
        if engine.is_complete() {
            break;
        }
        let real: Vec<TokenId> = group
            .iter()
            .filter(|t| !grouping.is_dummy(**t))
            .map(|t| tokens[t.index()])
            .collect();
        gossip_group(engine, g, &real, params, &mut logs)?;
    }
    Ok(logs)
}

fn gossip_group(
    engine: &mut Engine<'_>,
    g: usize,
    real: &[TokenId],
    params: &CentralParams,
    logs: &mut Vec<StageLog>,
) -> Result<(), CentralError> {
    let n = engine.n();
    let universe = engine.state().universe();
    let group = TokenSet::from_tokens(universe, real.iter().copied());
    let all_nodes: Vec<NodeId> = (0..n as u32).map(NodeId).collect();
    let group_done = |engine: &Engine<'_>| engine.state().all_holdings().iter().all(|h| h.is_superset(&group));
    if group_done(engine) {
        return Ok(());
    }
    let root = (n as f64).sqrt().ceil() as usize;

    // consolidation
    let meter = Meter::start(engine);
    for &t in real {
        let used = flood_token(engine, t, root)?;
        let held = holders(engine, t);
        if held < n && held < (root + 1).min(n) {
            return Err(CentralError::Invariant(format!(
                "token {t} reached only {held} nodes after {used} flooding rounds"
            )));
        }
    }
    logs.push(meter.log(engine, &format!("group {g} consolidation"), real.len() * root, String::new()));

    // cover set, greedy, lowest id on ties
    let cap = params.cover_cap(n);
    let mut uncovered = group.clone();
    let mut cover: Vec<(NodeId, Vec<TokenId>)> = Vec::new();
    while !uncovered.is_empty() {
        let (gain, v) = all_nodes
            .iter()
            .map(|&v| (engine.state().holdings(v).intersection_len(&uncovered), v))
            .max_by_key(|&(gain, v)| (gain, std::cmp::Reverse(v)))
            .expect("at least one node");
        if gain == 0 {
            return Err(CentralError::Invariant("a group token vanished".into()));
        }
        let assigned: Vec<TokenId> = engine.state().holdings(v).intersection(&uncovered).collect();
        let mut next = TokenSet::new(universe);
        for t in uncovered.difference(engine.state().holdings(v)) {
            next.insert(t);
        }
        uncovered = next;
        cover.push((v, assigned));
    }
    if cover.len() > cap {
        return Err(CentralError::CoverTooLarge { needed: cover.len(), cap });
    }

    // distribution
    let meter = Meter::start(engine);
    let mut rng = scheduler_rng(engine, RANK_TAG + g as u32);
    let mut nominal = 0;
    for (s, assigned) in &cover {
        let pool = ItemPool::with_copies(assigned, root, n, &mut rng);
        nominal += pool.len();
        load_balance(engine, &[*s], &all_nodes, &pool, pool.len() * n + n * n)?;
    }
    logs.push(meter.log(
        engine,
        &format!("group {g} distribution"),
        nominal,
        format!("cover set of {} nodes", cover.len()),
    ));

    // exchange
    let meter = Meter::start(engine);
    let threshold = real.len().saturating_sub(params.exchange_slack(n));
    let exchange_cap = params.exchange_cap(n);
    let mut rounds = 0;
    let best = |engine: &Engine<'_>| {
        all_nodes
            .iter()
            .map(|&v| (engine.state().holdings(v).intersection_len(&group), v))
            .max_by_key(|&(c, v)| (c, std::cmp::Reverse(v)))
            .unwrap()
    };
    while best(engine).0 < threshold {
        if rounds >= exchange_cap {
            return Err(CentralError::CapExhausted {
                stage: format!("group {g} exchange"),
                rounds,
            });
        }
        ensure_round(engine)?;
        let plan = greedy_exchange_round(engine.state(), engine.adjacency(), Some(&group));
        engine.execute(&plan)?;
        rounds += 1;
    }
    let (_, s) = best(engine);
    logs.push(meter.log(engine, &format!("group {g} exchange"), 0, format!("node {s} reached the threshold {threshold}")));

    // broadcast from s, then flood what s lacks
    let mut at_s = group.clone();
    at_s.intersect_with(engine.state().holdings(s));
    if !group_done(engine) && !at_s.is_empty() {
        logs.extend(n_broadcast(engine, s, &at_s, params)?);
    }
    let meter = Meter::start(engine);
    let residual: Vec<TokenId> = group.difference(engine.state().holdings(s)).collect();
    for &t in &residual {
        flood_token(engine, t, n)?;
        if holders(engine, t) < n {
            return Err(CentralError::Invariant(format!("token {t} did not reach every node in {n} rounds")));
        }
    }
    logs.push(meter.log(
        engine,
        &format!("group {g} residual"),
        residual.len() * n,
        format!("{} tokens", residual.len()),
    ));
    Ok(())
}
