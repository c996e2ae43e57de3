use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{schedule_rng, AdversaryError, ScheduleMetadata};
use crate::net::{AdversarySchedule, Mode, NetworkSnapshot, NodeId};

/// A uniformly random labeled spanning tree on `n` nodes, decoded from a
/// uniform Prüfer sequence.
pub fn random_spanning_tree(n: usize, rng: &mut impl Rng) -> Vec<(NodeId, NodeId)> {
    match n {
        0 | 1 => return Vec::new(),
        2 => return vec![(NodeId(0), NodeId(1))],
        _ => {}
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &code {
        degree[v] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &code {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        edges.push((NodeId(leaf as u32), NodeId(v as u32)));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.push(Reverse(v));
        }
    }
    let Reverse(a) = leaves.pop().unwrap();
    let Reverse(b) = leaves.pop().unwrap();
    edges.push((NodeId(a as u32), NodeId(b as u32)));
    edges
}

/// Each round: a uniform random spanning tree plus every other edge
/// independently with probability `extra_edge_prob`.
pub fn build_random_interval_connected(
    n: usize,
    extra_edge_prob: f64,
    seed: u64,
    horizon: usize,
) -> Result<AdversarySchedule, AdversaryError> {
    if n < 2 {
        return Err(AdversaryError::Unsupported {
            n,
            reason: "need at least 2 nodes".into(),
        });
    }
    if !(0.0..=1.0).contains(&extra_edge_prob) {
        return Err(AdversaryError::InvalidParam(format!("extra_edge_prob {extra_edge_prob} not in [0, 1]")));
    }
    let mut rng = schedule_rng(seed, 5);
    let complete = (extra_edge_prob >= 1.0).then(|| Arc::new(NetworkSnapshot::complete(n)));
    let mut snapshots = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        if let Some(k) = &complete {
            snapshots.push(k.clone());
            continue;
        }
        let mut edges = random_spanning_tree(n, &mut rng);
        if extra_edge_prob > 0.0 {
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if rng.gen_bool(extra_edge_prob) {
                        edges.push((NodeId(u), NodeId(v)));
                    }
                }
            }
        }
        snapshots.push(Arc::new(NetworkSnapshot::from_edge_set(n, edges)));
    }
    let meta = ScheduleMetadata::new("random", n, seed).param("extra_edge_prob", extra_edge_prob);
    Ok(AdversarySchedule::new(n, snapshots, Vec::new(), Mode::Oblivious, meta)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StaticFamily {
    Line,
    Cycle,
    Complete,
}

/// The same graph every round.
pub fn build_static(family: StaticFamily, n: usize, horizon: usize) -> Result<AdversarySchedule, AdversaryError> {
    let (name, snap) = match family {
        StaticFamily::Line => {
            let order: Vec<NodeId> = (0..n as u32).map(NodeId).collect();
            ("static-line", NetworkSnapshot::path(&order, n))
        }
        StaticFamily::Cycle => ("static-cycle", NetworkSnapshot::cycle(n)),
        StaticFamily::Complete => ("static-complete", NetworkSnapshot::complete(n)),
    };
    if n == 0 || (family == StaticFamily::Cycle && n < 3) {
        return Err(AdversaryError::Unsupported {
            n,
            reason: format!("{name} is undefined at this size"),
        });
    }
    let snap = Arc::new(snap);
    let snapshots = vec![snap; horizon.max(1)];
    Ok(AdversarySchedule::new(n, snapshots, Vec::new(), Mode::Oblivious, ScheduleMetadata::new(name, n, 0))?)
}
