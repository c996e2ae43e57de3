//! Independent reference implementations used as test oracles. None of
//! these call into the code they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use gossipsim::adversaries::{build_static, StaticFamily};
use gossipsim::net::{AdversarySchedule, NetworkSnapshot, TailPolicy};
use gossipsim::NodeId;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn static_schedule(family: StaticFamily, n: usize) -> AdversarySchedule {
    build_static(family, n, 1).unwrap().with_tail(TailPolicy::StaticTail)
}

/// Size of a maximum matching by trying every choice for every left vertex.
pub fn brute_force_matching(left: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); left];
    for &(l, r) in edges {
        adj[l].push(r);
    }
    fn go(i: usize, adj: &[Vec<usize>], used: &mut BTreeSet<usize>) -> usize {
        if i == adj.len() {
            return used.len();
        }
        let mut best = go(i + 1, adj, used);
        for &r in &adj[i] {
            if used.insert(r) {
                best = best.max(go(i + 1, adj, used));
                used.remove(&r);
            }
        }
        best
    }
    go(0, &adj, &mut BTreeSet::new())
}

/// Most distinct new tokens `v` can get in one round when every neighbor
/// sends at most one token `v` lacks; every assignment is tried.
pub fn best_new_tokens(own: &BTreeSet<u32>, neighbors: &[BTreeSet<u32>]) -> usize {
    let candidates: Vec<Vec<u32>> = neighbors.iter().map(|s| s.difference(own).copied().collect()).collect();
    fn go(i: usize, cands: &[Vec<u32>], got: &mut BTreeSet<u32>) -> usize {
        if i == cands.len() {
            return got.len();
        }
        let mut best = go(i + 1, cands, got);
        for &t in &cands[i] {
            if got.insert(t) {
                best = best.max(go(i + 1, cands, got));
                got.remove(&t);
            }
        }
        best
    }
    go(0, &candidates, &mut BTreeSet::new())
}

/// The per-`(seed, round, node)` ChaCha stream documented for protocol
/// randomness: the key is the seed in little-endian followed by
/// `gossipsm` and zeros, the stream number is `round << 24 | node`.
pub fn protocol_stream(seed: u64, round: u64, node: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(b"gossipsm");
    let mut r = ChaCha8Rng::from_seed(key);
    r.set_stream((round << 24) | node);
    r
}

/// Straight-line Rand-Diff on a fixed graph. Every node, ascending, draws
/// from its own stream for each ascending neighbor with a nonempty
/// difference; the token sent is the `rank`-th smallest of the difference.
/// Returns the round in which every node first holds all `k` tokens.
pub fn reference_rand_diff(adj: &[Vec<usize>], start: &[BTreeSet<u32>], k: usize, seed: u64, cap: u64) -> Option<u64> {
    let n = adj.len();
    let mut held: Vec<BTreeSet<u32>> = start.to_vec();
    if held.iter().all(|s| s.len() == k) {
        return Some(0);
    }
    for round in 1..=cap {
        let mut sends = Vec::new();
        for u in 0..n {
            if held[u].is_empty() {
                continue;
            }
            let mut r = protocol_stream(seed, round, u as u64);
            let mut nbrs = adj[u].clone();
            nbrs.sort_unstable();
            for v in nbrs {
                let diff: Vec<u32> = held[u].difference(&held[v]).copied().collect();
                if !diff.is_empty() {
                    let rank = r.gen_range(0..diff.len());
                    sends.push((v, diff[rank]));
                }
            }
        }
        for (v, t) in sends {
            held[v].insert(t);
        }
        if held.iter().all(|s| s.len() == k) {
            return Some(round);
        }
    }
    None
}

pub fn cycle_adjacency(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|u| vec![(u + n - 1) % n, (u + 1) % n]).collect()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    }
}

/// All labeled trees on `n` nodes as sorted edge lists, by filtering every
/// `(n-1)`-subset of the complete graph's edges for acyclicity.
pub fn enumerate_trees(n: usize) -> Vec<Vec<(u32, u32)>> {
    let all: Vec<(u32, u32)> = (0..n as u32).flat_map(|a| (a + 1..n as u32).map(move |b| (a, b))).collect();
    let mut trees = Vec::new();
    for mask in 0u32..(1 << all.len()) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let edges: Vec<(u32, u32)> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        let mut comp: Vec<u32> = (0..n as u32).collect();
        let mut acyclic = true;
        for &(a, b) in &edges {
            let (ca, cb) = (comp[a as usize], comp[b as usize]);
            if ca == cb {
                acyclic = false;
                break;
            }
            for c in comp.iter_mut() {
                if *c == cb {
                    *c = ca;
                }
            }
        }
        if acyclic {
            trees.push(edges);
        }
    }
    trees
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Pearson chi-square against a uniform distribution over `categories`
/// outcomes; unseen categories count as zero. Returns the p-value.
pub fn uniform_chi_square<K: Ord>(counts: &BTreeMap<K, u64>, categories: u64) -> f64 {
    let total: u64 = counts.values().sum();
    let expected = total as f64 / categories as f64;
    let seen: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let unseen = (categories - counts.len() as u64) as f64 * expected;
    let stat = seen + unseen;
    ChiSquared::new((categories - 1) as f64).unwrap().sf(stat)
}

/// `|observed/trials - p|` within three binomial standard deviations.
pub fn within_three_sigma(hits: u64, trials: u64, p: f64) -> bool {
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    (hits as f64 / trials as f64 - p).abs() <= 3.0 * sigma
}

/// Connectivity by BFS over a plain edge list.
pub fn connected(n: usize, edges: &[(NodeId, NodeId)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a.index()].push(b.index());
        adj[b.index()].push(a.index());
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Whether the snapshot is a simple path through all `n` nodes.
pub fn is_hamiltonian_path(snap: &NetworkSnapshot) -> bool {
    let n = snap.n();
    let mut degree = vec![0usize; n];
    for &(a, b) in snap.edges() {
        degree[a.index()] += 1;
        degree[b.index()] += 1;
    }
    snap.edge_count() + 1 == n && degree.iter().all(|&d| d <= 2) && connected(n, snap.edges())
}

/// A random connected graph: a random tree by attaching each node to an
/// earlier one, plus each remaining pair with probability `p`.
pub fn random_connected(n: usize, p: f64, r: &mut impl Rng) -> NetworkSnapshot {
    let mut order: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        order.swap(i, r.gen_range(0..=i));
    }
    let mut edges = BTreeSet::new();
    for i in 1..n {
        let j = r.gen_range(0..i);
        let (a, b) = (order[i].min(order[j]), order[i].max(order[j]));
        edges.insert((a, b));
    }
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            if r.gen_bool(p) {
                edges.insert((a, b));
            }
        }
    }
    NetworkSnapshot::new(n, edges.into_iter().map(|(a, b)| (NodeId(a), NodeId(b))))
}
