use std::collections::VecDeque;

use crate::net::{NodeId, TokenId};

/// `H_v`: neighbors of `v` on the left, candidate tokens on the right, an
/// edge `(u, τ)` whenever neighbor `u` holds `τ`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BipartiteInstance {
    pub left: Vec<NodeId>,
    pub right: Vec<TokenId>,
    pub edges: Vec<(NodeId, TokenId)>,
}

impl BipartiteInstance {
    fn indexed(&self) -> Vec<Vec<usize>> {
        let mut left = self.left.clone();
        left.sort_unstable();
        let mut right = self.right.clone();
        right.sort_unstable();
        let mut adj = vec![Vec::new(); self.left.len()];
        for &(u, t) in &self.edges {
            let (Ok(a), Ok(b)) = (left.binary_search(&u), right.binary_search(&t)) else {
                continue;
            };
            adj[a].push(b);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

const UNMATCHED: usize = usize::MAX;

/// Hopcroft–Karp on an index graph. `adj[l]` lists the right vertices of
/// left vertex `l`; returns the partner of every left vertex.
pub fn hopcroft_karp(right_count: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let left_count = adj.len();
    let mut pair_left = vec![UNMATCHED; left_count];
    let mut pair_right = vec![UNMATCHED; right_count];
    let mut dist = vec![0usize; left_count];
    let mut queue = VecDeque::new();

    loop {
        // Layer the free left vertices and everything reachable by
        // alternating paths.
        queue.clear();
        let mut found = false;
        for l in 0..left_count {
            if pair_left[l] == UNMATCHED {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let next = pair_right[r];
                if next == UNMATCHED {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        let mut cursor = vec![0usize; left_count];
        for l in 0..left_count {
            if pair_left[l] == UNMATCHED {
                augment(l, adj, &mut pair_left, &mut pair_right, &mut dist, &mut cursor);
            }
        }
    }
    pair_left.into_iter().map(|r| (r != UNMATCHED).then_some(r)).collect()
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    pair_left: &mut [usize],
    pair_right: &mut [usize],
    dist: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    while cursor[l] < adj[l].len() {
        let r = adj[l][cursor[l]];
        cursor[l] += 1;
        let next = pair_right[r];
        let ok = next == UNMATCHED
            || (dist[next] == dist[l] + 1 && augment(next, adj, pair_left, pair_right, dist, cursor));
        if ok {
            pair_left[l] = r;
            pair_right[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}

/// A maximum matching of `instance` as `(neighbor, token)` pairs, sorted.
pub fn max_bipartite_matching(instance: &BipartiteInstance) -> Vec<(NodeId, TokenId)> {
    let adj = instance.indexed();
    let mut left = instance.left.clone();
    left.sort_unstable();
    let mut right = instance.right.clone();
    right.sort_unstable();
    let mut matching: Vec<(NodeId, TokenId)> = hopcroft_karp(right.len(), &adj)
        .into_iter()
        .enumerate()
        .filter_map(|(l, r)| r.map(|r| (left[l], right[r])))
        .collect();
    matching.sort_unstable();
    matching
}
