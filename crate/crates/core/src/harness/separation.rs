use serde::{Deserialize, Serialize};

use super::trace::Trace;
use crate::adversaries::ScheduleMetadata;
use crate::net::{NodeId, Round, RoundObserver, RoundRecord};
use crate::token_set::TokenSet;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeparationStats {
    /// Ordered pairs `(u, v)` of adjacent inner nodes, over all segment rounds.
    pub pairs: u64,
    /// Pairs where `u` holds fewer than `threshold` tokens that `v` lacks.
    pub below: u64,
    pub threshold: f64,
}

impl SeparationStats {
    pub fn fraction(&self) -> Option<f64> {
        (self.pairs > 0).then(|| self.below as f64 / self.pairs as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeparationError {
    #[error("metadata describes no segments")]
    MissingSegments,
    #[error("trace has {trace} nodes, metadata {meta}")]
    SizeMismatch { trace: usize, meta: usize },
}

/// Accumulates separation statistics round by round. Each segment round
/// compares both orientations of every adjacent pair of that segment's
/// inner nodes, using the holdings at the end of the round.
pub struct SeparationTally {
    by_round: Vec<Option<Vec<NodeId>>>,
    stats: SeparationStats,
}

impl SeparationTally {
    pub fn new(meta: &ScheduleMetadata) -> Result<Self, SeparationError> {
        if meta.segments.is_empty() {
            return Err(SeparationError::MissingSegments);
        }
        let last = meta.segments.iter().map(|s| s.last_round).max().unwrap() as usize;
        let mut by_round = vec![None; last + 1];
        for seg in &meta.segments {
            for r in seg.first_round..=seg.last_round {
                by_round[r as usize] = Some(seg.inner.clone());
            }
        }
        Ok(SeparationTally {
            by_round,
            stats: SeparationStats {
                threshold: (meta.n as f64).sqrt() / 16.0,
                ..Default::default()
            },
        })
    }

    pub fn record(&mut self, round: Round, holdings: &[TokenSet]) {
        let Some(Some(inner)) = self.by_round.get(round as usize) else {
            return;
        };
        for w in inner.windows(2) {
            let (a, b) = (&holdings[w[0].index()], &holdings[w[1].index()]);
            for diff in [a.difference_len(b), b.difference_len(a)] {
                self.stats.pairs += 1;
                if (diff as f64) < self.stats.threshold {
                    self.stats.below += 1;
                }
            }
        }
    }

    pub fn stats(&self) -> SeparationStats {
        self.stats
    }
}

/// Separation statistic of a recorded run against a line construction.
pub fn measure_blocker_separation(trace: &Trace, meta: &ScheduleMetadata) -> Result<SeparationStats, SeparationError> {
    if trace.n != meta.n {
        return Err(SeparationError::SizeMismatch { trace: trace.n, meta: meta.n });
    }
    let mut tally = SeparationTally::new(meta)?;
    trace.replay(|round, holdings| tally.record(round, holdings));
    Ok(tally.stats())
}

/// The same statistic gathered live.
pub struct SeparationObserver {
    pub tally: SeparationTally,
}

impl RoundObserver for SeparationObserver {
    fn on_round(&mut self, record: &RoundRecord<'_>) {
        self.tally.record(record.round, record.after.all_holdings());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::SegmentInfo;
    use crate::net::TokenId;

    fn meta(n: usize) -> ScheduleMetadata {
        let mut m = ScheduleMetadata::new("test", n, 0);
        m.segments.push(SegmentInfo {
            phase: 1,
            segment: 1,
            first_round: 1,
            last_round: 2,
            inner: (1..5).map(NodeId).collect(),
            outer: vec![],
        });
        m
    }

    fn trace(n: usize, initial: Vec<Vec<TokenId>>, universe: usize) -> Trace {
        Trace {
            n,
            universe,
            initial,
            rounds: vec![vec![], vec![]],
        }
    }

    #[test]
    fn identical_holdings_are_never_separated() {
        let t = trace(256, vec![vec![TokenId(0), TokenId(1)]; 256], 2);
        let s = measure_blocker_separation(&t, &meta(256)).unwrap();
        assert_eq!(s.pairs, 2 * 3 * 2);
        assert_eq!(s.fraction(), Some(1.0));
    }

    #[test]
    fn disjoint_holdings_are_always_separated() {
        let initial = (0..256u32).map(|v| vec![TokenId(2 * v), TokenId(2 * v + 1)]).collect();
        let t = trace(256, initial, 512);
        let s = measure_blocker_separation(&t, &meta(256)).unwrap();
        assert_eq!(s.fraction(), Some(0.0));
    }

    #[test]
    fn needs_segments() {
        let t = trace(4, vec![vec![]; 4], 1);
        assert_eq!(
            measure_blocker_separation(&t, &ScheduleMetadata::new("x", 4, 0)),
            Err(SeparationError::MissingSegments)
        );
    }
}
