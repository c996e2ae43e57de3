//! Line adversaries that slow Rand-Diff down with blocker tokens.
//!
//! Node 0 is the source `v0` and starts with every token. The line is
//! `left … v0 right…`, where `left[0]` and `right[0]` are the neighbors of
//! `v0`. Within a phase the right line is cut into intervals of `2√n` nodes;
//! the first `√n` nodes of the current interval form `X`, its first
//! `inner_width` nodes are the inner nodes. After each segment the inner
//! nodes join the far end of the left line and the rest of the interval
//! moves to the far end of the right line.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ceil_log2, isqrt, log2, schedule_rng, AdversaryError, BlockerCapture, ScheduleMetadata, SegmentInfo};
use crate::net::{AdversarySchedule, InsertionEvent, Mode, NetworkSnapshot, NodeId, Round, TokenId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockerLineParams {
    pub n: usize,
    pub epsilon: f64,
    pub phases: usize,
    pub segments_per_phase: usize,
    pub segment_rounds: usize,
    pub inner_width: usize,
    /// Clique duration between oblivious segments, in units of `log2 n` rounds.
    pub c_clique: f64,
    pub seed: u64,
}

impl BlockerLineParams {
    pub fn new(n: usize, seed: u64) -> Self {
        Self::with_epsilon(n, 1.0 / 32.0, seed)
    }

    pub fn with_epsilon(n: usize, epsilon: f64, seed: u64) -> Self {
        let root = isqrt(n) as f64;
        let lg = log2(n).max(1.0);
        BlockerLineParams {
            n,
            epsilon,
            phases: ((root / (2.0 * lg)).floor() as usize).max(1),
            segments_per_phase: ((root / 3.0).floor() as usize).max(1),
            segment_rounds: ((epsilon * root).floor() as usize).max(1),
            inner_width: ceil_log2(n).max(1),
            c_clique: 3.0,
            seed,
        }
    }

    pub fn root(&self) -> usize {
        isqrt(self.n)
    }

    /// Rounds of each between-segment clique in the oblivious construction.
    pub fn clique_rounds(&self) -> usize {
        (self.c_clique * log2(self.n)).ceil().max(1.0) as usize
    }

    fn check(&self) -> Result<(), AdversaryError> {
        let unsupported = |reason: String| AdversaryError::Unsupported { n: self.n, reason };
        let root = self.root();
        if root * root != self.n {
            return Err(unsupported("node count must be a perfect square".into()));
        }
        if !(self.epsilon > 0.0 && self.c_clique > 0.0) {
            return Err(AdversaryError::InvalidParam("epsilon and c_clique must be positive".into()));
        }
        if self.phases == 0 || self.segments_per_phase == 0 || self.segment_rounds == 0 {
            return Err(AdversaryError::InvalidParam("phase, segment and round counts must be positive".into()));
        }
        if self.inner_width == 0 || self.inner_width >= root {
            return Err(unsupported(format!(
                "inner width {} leaves no outer nodes among the {root} nodes of X",
                self.inner_width
            )));
        }
        let mut right = self.n - 1;
        for phase in 1..=self.phases {
            if self.segments_per_phase * 2 * root > right {
                return Err(unsupported(format!(
                    "phase {phase} needs {} right-line nodes, only {right} remain",
                    self.segments_per_phase * 2 * root
                )));
            }
            right -= self.segments_per_phase * self.inner_width;
        }
        Ok(())
    }

    fn metadata(&self, generator: &str) -> ScheduleMetadata {
        let root = self.root();
        let mut meta = ScheduleMetadata::new(generator, self.n, self.seed)
            .param("epsilon", self.epsilon)
            .param("phases", self.phases)
            .param("segments_per_phase", self.segments_per_phase)
            .param("segment_rounds", self.segment_rounds)
            .param("inner_width", self.inner_width)
            .param("interval_width", 2 * root)
            .param("x_width", root);
        meta.source = Some(NodeId(0));
        meta.blocker_groups = (0..root)
            .map(|g| (g * root..(g + 1) * root).map(|t| TokenId(t as u32)).collect())
            .collect();
        meta
    }
}

struct Line {
    left: Vec<NodeId>,
    right: Vec<NodeId>,
}

impl Line {
    fn new(n: usize) -> Self {
        Line {
            left: Vec::new(),
            right: (1..n as u32).map(NodeId).collect(),
        }
    }

    fn order(&self) -> Vec<NodeId> {
        let mut order: Vec<NodeId> = self.left.iter().rev().copied().collect();
        order.push(NodeId(0));
        order.extend(&self.right);
        order
    }

    fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.order().windows(2).map(|w| (w[0], w[1])).collect()
    }

    fn snapshot(&self, n: usize) -> Arc<NetworkSnapshot> {
        Arc::new(NetworkSnapshot::from_edge_set(n, self.edges()))
    }

    /// Moves the current interval's inner nodes left and the rest to the
    /// far right; returns `(inner, outer)`.
    fn shift(&mut self, interval: usize, inner: usize) -> (Vec<NodeId>, Vec<NodeId>) {
        let taken: Vec<NodeId> = self.right.drain(..interval).collect();
        self.left.extend(&taken[..inner]);
        self.right.extend(&taken[inner..]);
        (taken[..inner].to_vec(), taken[inner..].to_vec())
    }
}

fn repeat(snapshots: &mut Vec<Arc<NetworkSnapshot>>, snap: &Arc<NetworkSnapshot>, rounds: usize) {
    snapshots.extend(std::iter::repeat_n(snap, rounds).cloned());
}

/// Rounds are counted `1..`; `snapshots.len()` is the last round built.
fn now(snapshots: &[Arc<NetworkSnapshot>]) -> Round {
    snapshots.len() as Round
}

/// Invasive construction: blocker tokens are inserted directly.
pub fn build_blocker_line_invasive(params: &BlockerLineParams) -> Result<AdversarySchedule, AdversaryError> {
    params.check()?;
    let n = params.n;
    let root = params.root();
    let mut meta = params.metadata("blocker-invasive");
    let mut rng = schedule_rng(params.seed, 1);
    let mut line = Line::new(n);
    let mut snapshots = Vec::new();
    let mut insertions = Vec::new();

    for phase in 1..=params.phases {
        let blockers = &meta.blocker_groups[phase - 1];
        for segment in 1..=params.segments_per_phase {
            let first_round = now(&snapshots) + 1;
            for &token in blockers {
                for &node in &line.right[..root] {
                    if rng.gen_bool(0.5) {
                        insertions.push(InsertionEvent {
                            round: first_round - 1,
                            node,
                            token,
                        });
                    }
                }
            }
            let snap = line.snapshot(n);
            repeat(&mut snapshots, &snap, params.segment_rounds);
            let (inner, outer) = line.shift(2 * root, params.inner_width);
            meta.segments.push(SegmentInfo {
                phase: phase as u32,
                segment: segment as u32,
                first_round,
                last_round: now(&snapshots),
                inner,
                outer,
            });
        }
        let last = now(&snapshots);
        for &node in &line.right {
            for &token in blockers {
                insertions.push(InsertionEvent { round: last, node, token });
            }
        }
    }

    meta.sentinel_tokens = meta.blocker_groups[params.phases..].iter().flatten().copied().collect();
    meta.target_nodes = line.right.clone();
    Ok(AdversarySchedule::new(n, snapshots, insertions, Mode::Invasive, meta)?)
}

/// Oblivious construction: insertions are replaced by extra topology.
///
/// Per phase: a round with direct edges from `v0` to `X_{i,1}`, a round
/// with random edges inside `X_{i,1}`, then the segments. Between segments
/// the outer part of `X_{i,j}` is a clique for `clique_rounds()` rounds,
/// followed by one round of a biclique to `X_{i,j+1}`. The phase ends with
/// one round of a clique over the right line. The base line is present in
/// every round.
pub fn build_blocker_line_oblivious(params: &BlockerLineParams) -> Result<AdversarySchedule, AdversaryError> {
    params.check()?;
    let n = params.n;
    let root = params.root();
    let inner = params.inner_width;
    let mut meta = params
        .metadata("blocker-oblivious")
        .param("c_clique", params.c_clique)
        .param("clique_rounds", params.clique_rounds());
    let mut rng = schedule_rng(params.seed, 2);
    let mut line = Line::new(n);
    let mut snapshots = Vec::new();

    for phase in 1..=params.phases {
        let x: Vec<NodeId> = line.right[..root].to_vec();
        let mut edges = line.edges();
        edges.extend(x.iter().map(|&v| (NodeId(0), v)));
        snapshots.push(Arc::new(NetworkSnapshot::from_edge_set(n, edges)));
        meta.blocker_capture.push(BlockerCapture {
            phase: phase as u32,
            round: now(&snapshots),
            nodes: x.clone(),
        });

        let mut edges = line.edges();
        for (a, &u) in x.iter().enumerate() {
            for &v in &x[a + 1..] {
                if rng.gen_bool(0.5) {
                    edges.push((u, v));
                }
            }
        }
        snapshots.push(Arc::new(NetworkSnapshot::from_edge_set(n, edges)));

        for segment in 1..=params.segments_per_phase {
            let first_round = now(&snapshots) + 1;
            let snap = line.snapshot(n);
            repeat(&mut snapshots, &snap, params.segment_rounds);
            let last_round = now(&snapshots);
            if segment < params.segments_per_phase {
                let outer_x = &line.right[inner..root];
                let mut edges = line.edges();
                for (a, &u) in outer_x.iter().enumerate() {
                    edges.extend(outer_x[a + 1..].iter().map(|&v| (u, v)));
                }
                let clique = Arc::new(NetworkSnapshot::from_edge_set(n, edges));
                repeat(&mut snapshots, &clique, params.clique_rounds());

                let next_x = &line.right[2 * root..3 * root];
                let mut edges = line.edges();
                for &u in outer_x {
                    edges.extend(next_x.iter().map(|&v| (u, v)));
                }
                snapshots.push(Arc::new(NetworkSnapshot::from_edge_set(n, edges)));
            }
            let (inner_nodes, outer_nodes) = line.shift(2 * root, inner);
            meta.segments.push(SegmentInfo {
                phase: phase as u32,
                segment: segment as u32,
                first_round,
                last_round,
                inner: inner_nodes,
                outer: outer_nodes,
            });
        }

        let mut edges = line.edges();
        for (a, &u) in line.right.iter().enumerate() {
            edges.extend(line.right[a + 1..].iter().map(|&v| (u, v)));
        }
        snapshots.push(Arc::new(NetworkSnapshot::from_edge_set(n, edges)));
    }

    meta.sentinel_tokens = (0..n as u32).map(TokenId).collect();
    meta.target_nodes = line.right.clone();
    Ok(AdversarySchedule::new(n, snapshots, Vec::new(), Mode::Oblivious, meta)?)
}
