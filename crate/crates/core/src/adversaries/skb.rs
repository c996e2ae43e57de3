//! Invasive line adversary against symmetric knowledge-based protocols.
//!
//! Node 0 is `s` and starts with every token. The line is
//! `left… s middle… right…`. In each segment the first `window` middle
//! nodes `v_1..v_window` are watched; at segment round `k` blocker set
//! `B_{i,k-m+1}` is inserted into `v_m` for every `m ≤ k`, so each token
//! reaching `v_m` shares its arrival round with a whole blocker set.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ceil_log2, icbrt, log2, AdversaryError, ScheduleMetadata, SegmentInfo};
use crate::net::{AdversarySchedule, InsertionEvent, Mode, NetworkSnapshot, NodeId, Round, TokenId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkbAdversaryParams {
    pub n: usize,
    pub blocker_set_size: usize,
    pub sets_per_phase: usize,
    pub phases: usize,
    pub segments_per_phase: usize,
    pub seed: u64,
}

impl SkbAdversaryParams {
    pub fn new(n: usize, seed: u64) -> Self {
        let cube = icbrt(n);
        SkbAdversaryParams {
            n,
            blocker_set_size: cube.max(1),
            sets_per_phase: cube.max(1),
            phases: ((cube as f64 / (2.0 * log2(n).max(1.0))).floor() as usize).max(1),
            segments_per_phase: icbrt(n.saturating_mul(n)).max(1),
            seed,
        }
    }

    /// Watched nodes per segment and rounds per segment.
    pub fn window(&self) -> usize {
        self.sets_per_phase
    }

    pub fn inner_width(&self) -> usize {
        ceil_log2(self.n).min(self.window() - 1)
    }

    fn blocker_set(&self, phase: usize, k: usize) -> Vec<TokenId> {
        let index = (phase - 1) * self.sets_per_phase + (k - 1);
        let start = index * self.blocker_set_size;
        (start..start + self.blocker_set_size).map(|t| TokenId(t as u32)).collect()
    }
}

pub fn build_skb_adversary(params: &SkbAdversaryParams) -> Result<AdversarySchedule, AdversaryError> {
    let n = params.n;
    if n < 64 {
        return Err(AdversaryError::Unsupported {
            n,
            reason: "the blocker-set construction needs at least 64 nodes".into(),
        });
    }
    let window = params.window();
    if window < 2 || params.blocker_set_size == 0 || params.phases == 0 || params.segments_per_phase == 0 {
        return Err(AdversaryError::InvalidParam("window, set size, phases and segments must be positive".into()));
    }
    let blocker_tokens = params.phases * params.sets_per_phase * params.blocker_set_size;
    if blocker_tokens > n / 2 {
        return Err(AdversaryError::InvalidParam(format!(
            "{blocker_tokens} blocker tokens exceed half of the {n} tokens"
        )));
    }
    let inner = params.inner_width();

    let mut left: Vec<NodeId> = Vec::new();
    let mut middle: Vec<NodeId> = (1..n as u32).map(NodeId).collect();
    let mut right: Vec<NodeId> = Vec::new();
    let mut snapshots: Vec<Arc<NetworkSnapshot>> = Vec::new();
    let mut insertions = Vec::new();
    let mut meta = ScheduleMetadata::new("skb", n, params.seed);
    meta.source = Some(NodeId(0));
    let mut segments_used = Vec::new();

    for phase in 1..=params.phases {
        middle.append(&mut right);
        let segments = params.segments_per_phase.min(middle.len() / window);
        if segments == 0 {
            return Err(AdversaryError::Unsupported {
                n,
                reason: format!("phase {phase} has only {} middle nodes", middle.len()),
            });
        }
        segments_used.push(segments);
        let sets: Vec<Vec<TokenId>> = (1..=window).map(|k| params.blocker_set(phase, k)).collect();
        meta.blocker_groups.extend(sets.iter().cloned());

        for segment in 1..=segments {
            let order: Vec<NodeId> = left
                .iter()
                .rev()
                .chain(std::iter::once(&NodeId(0)))
                .chain(&middle)
                .chain(&right)
                .copied()
                .collect();
            let snap = Arc::new(NetworkSnapshot::path(&order, n));
            let first_round = snapshots.len() as Round + 1;
            for k in 1..=window {
                snapshots.push(snap.clone());
                let round = snapshots.len() as Round;
                for m in 1..=k {
                    let node = middle[m - 1];
                    insertions.extend(sets[k - m].iter().map(|&token| InsertionEvent { round, node, token }));
                }
            }
            let watched: Vec<NodeId> = middle.drain(..window).collect();
            left.extend(&watched[..inner]);
            right.extend(&watched[inner..]);
            meta.segments.push(SegmentInfo {
                phase: phase as u32,
                segment: segment as u32,
                first_round,
                last_round: snapshots.len() as Round,
                inner: watched[..inner].to_vec(),
                outer: watched[inner..].to_vec(),
            });
        }
    }

    let blockers = crate::token_set::TokenSet::from_tokens(n, meta.blocker_groups.iter().flatten().copied());
    meta.sentinel_tokens = (0..n as u32).map(TokenId).filter(|&t| !blockers.contains(t)).collect();
    meta.target_nodes = right.clone();
    meta = meta
        .param("blocker_set_size", params.blocker_set_size)
        .param("sets_per_phase", params.sets_per_phase)
        .param("phases", params.phases)
        .param("segments_per_phase", params.segments_per_phase)
        .param("segments_effective", segments_used)
        .param("inner_width", inner)
        .param("segment_rounds", window);
    Ok(AdversarySchedule::new(n, snapshots, insertions, Mode::Invasive, meta)?)
}
