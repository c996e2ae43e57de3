use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::{ensure_round, CentralError, StageLog};
use crate::net::{Adjacency, Engine, NodeId, TokenId, TransferPlan};

/// One unit of load: a copy of a token, or a padding item with no token.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Item {
    pub token: Option<TokenId>,
}

/// Items in random rank order.
#[derive(Clone, Debug)]
pub struct ItemPool {
    items: Vec<Item>,
    /// `order[rank]` is an item index.
    order: Vec<usize>,
}

impl ItemPool {
    pub fn new(items: Vec<Item>, rng: &mut impl Rng) -> Self {
        let mut order: Vec<usize> = (0..items.len()).collect();
        order.shuffle(rng);
        ItemPool { items, order }
    }

    /// One item per token.
    pub fn from_tokens(tokens: impl IntoIterator<Item = TokenId>, rng: &mut impl Rng) -> Self {
        Self::new(tokens.into_iter().map(|t| Item { token: Some(t) }).collect(), rng)
    }

    /// `copies` items per token, padded with token-less items up to `pad_to`.
    pub fn with_copies(tokens: &[TokenId], copies: usize, pad_to: usize, rng: &mut impl Rng) -> Self {
        let mut items: Vec<Item> = tokens
            .iter()
            .flat_map(|&t| std::iter::repeat_n(Item { token: Some(t) }, copies))
            .collect();
        let padding = pad_to.saturating_sub(items.len());
        items.extend(std::iter::repeat_n(Item { token: None }, padding));
        Self::new(items, rng)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    /// Item indices by increasing rank.
    pub fn ranked(&self) -> &[usize] {
        &self.order
    }

    pub fn rank_of(&self, item: usize) -> usize {
        self.order.iter().position(|&i| i == item).expect("item in pool")
    }
}

#[derive(Clone, Debug)]
pub struct LoadBalanceOutcome {
    /// Target node of every item, indexed like `ItemPool::items`.
    pub assignment: Vec<NodeId>,
    pub log: StageLog,
}

impl LoadBalanceOutcome {
    pub fn counts(&self, n: usize) -> Vec<usize> {
        let mut counts = vec![0; n];
        for v in &self.assignment {
            counts[v.index()] += 1;
        }
        counts
    }
}

struct Packet {
    item: usize,
    token: TokenId,
    dest: NodeId,
    at: NodeId,
}

/// Next hop from `at` toward the node whose distances are `dist`, skipping
/// directed edges already used this round; lowest id wins ties.
fn next_hop(adjacency: &Adjacency, dist: &[Option<usize>], at: NodeId, used: &HashSet<(NodeId, NodeId)>) -> Option<NodeId> {
    let here = dist[at.index()]?;
    adjacency
        .neighbors(at)
        .iter()
        .copied()
        .find(|&w| dist[w.index()].is_some_and(|d| d + 1 == here) && !used.contains(&(at, w)))
}

/// Distributes `pool` from the full nodes `full` (which hold every pooled
/// token) over `targets`, one injection per round in rank order.
///
/// Each round the next item goes to the target with the fewest items so
/// far (below `floor(|T|/|R|)` first, then below the ceiling) that is
/// closest to `full`, breaking ties by node id. The closest full node sends
/// it along a shortest path; in flight, each item advances one hop per
/// round along a shortest path of the current snapshot toward its target,
/// older items first, at most one item per directed edge. Items without a
/// token, and items whose target is itself full, are placed without a
/// transfer. Rounds beyond one per transmitted item are logged as overage.
pub fn load_balance(
    engine: &mut Engine<'_>,
    full: &[NodeId],
    targets: &[NodeId],
    pool: &ItemPool,
    round_cap: usize,
) -> Result<LoadBalanceOutcome, CentralError> {
    if targets.is_empty() {
        return Err(CentralError::EmptyTargets);
    }
    if pool.is_empty() {
        return Err(CentralError::EmptyPool);
    }
    let n = engine.n();
    let mut is_full = vec![false; n];
    for &f in full {
        is_full[f.index()] = true;
    }
    let mut covered = is_full.clone();
    for &r in targets {
        covered[r.index()] = true;
    }
    if let Some(v) = covered.iter().position(|c| !c) {
        return Err(CentralError::Precondition(format!("node {v} is neither full nor a target")));
    }
    for &f in full {
        let held = engine.state().holdings(f);
        if let Some(item) = pool.items.iter().find(|i| i.token.is_some_and(|t| !held.contains(t))) {
            return Err(CentralError::Precondition(format!(
                "full node {f} lacks pooled token {}",
                item.token.unwrap()
            )));
        }
    }

    let floor = pool.len() / targets.len();
    let mut counts: HashMap<NodeId, usize> = targets.iter().map(|&r| (r, 0)).collect();
    let mut below_floor = if floor > 0 { targets.len() } else { 0 };
    let mut assignment = vec![NodeId(u32::MAX); pool.len()];
    let mut in_flight: Vec<Packet> = Vec::new();
    let mut next_rank = 0;
    let mut transmitted = 0;
    let start_round = engine.rounds_executed();
    let mut moved = 0;

    while next_rank < pool.len() || !in_flight.is_empty() {
        let rounds = (engine.rounds_executed() - start_round) as usize;
        if rounds >= round_cap {
            return Err(CentralError::CapExhausted {
                stage: "load-balance".into(),
                rounds,
            });
        }
        ensure_round(engine)?;
        let adjacency = engine.adjacency();
        let from_full = adjacency.distances_from(full.iter().copied());
        let mut plan = TransferPlan::new();
        let mut used = HashSet::new();
        let mut injected = None;

        while next_rank < pool.len() {
            let item = pool.order[next_rank];
            let limit = if below_floor > 0 { floor } else { floor + 1 };
            let target = targets
                .iter()
                .copied()
                .filter(|r| counts[r] < limit)
                .filter_map(|r| from_full[r.index()].map(|d| (d, r)))
                .min()
                .map(|(_, r)| r)
                .ok_or_else(|| CentralError::Precondition("no reachable target below its quota".into()))?;
            let count = counts.get_mut(&target).unwrap();
            *count += 1;
            if *count == floor {
                below_floor -= 1;
            }
            next_rank += 1;
            let token = match pool.items[item].token {
                Some(t) if !is_full[target.index()] => t,
                _ => {
                    assignment[item] = target;
                    continue;
                }
            };
            // walk back from the target to the nearest full node
            let mut path = vec![target];
            let mut cur = target;
            while let Some(d) = from_full[cur.index()].filter(|&d| d > 0) {
                cur = adjacency
                    .neighbors(cur)
                    .iter()
                    .copied()
                    .find(|w| from_full[w.index()] == Some(d - 1))
                    .expect("BFS predecessor exists");
                path.push(cur);
            }
            let (source, hop) = (path[path.len() - 1], path[path.len() - 2]);
            plan.push(source, hop, token);
            used.insert((source, hop));
            injected = Some(Packet {
                item,
                token,
                dest: target,
                at: hop,
            });
            transmitted += 1;
            break;
        }

        // relays: oldest packet first, one hop along a current shortest path
        let mut toward: HashMap<NodeId, Vec<Option<usize>>> = HashMap::new();
        for p in &mut in_flight {
            let dist = toward
                .entry(p.dest)
                .or_insert_with(|| adjacency.distances_from([p.dest]));
            if let Some(w) = next_hop(adjacency, dist, p.at, &used) {
                plan.push(p.at, w, p.token);
                used.insert((p.at, w));
                p.at = w;
            }
        }
        in_flight.extend(injected);
        if plan.is_empty() && in_flight.is_empty() {
            break;
        }
        moved += engine.execute(&plan)?.len();
        in_flight.retain(|p| {
            if p.at == p.dest {
                assignment[p.item] = p.dest;
                false
            } else {
                true
            }
        });
    }

    let rounds = (engine.rounds_executed() - start_round) as usize;
    Ok(LoadBalanceOutcome {
        assignment,
        log: StageLog {
            stage: "load-balance".into(),
            rounds,
            tokens_moved: moved,
            overage_rounds: rounds.saturating_sub(transmitted),
            note: format!("{} items over {} targets", pool.len(), targets.len()),
        },
    })
}
