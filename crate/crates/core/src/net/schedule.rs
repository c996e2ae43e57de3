use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{validate_snapshot, NetworkSnapshot, NodeId, Round, SnapshotDefect, TokenId};
use crate::adversaries::ScheduleMetadata;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Oblivious,
    Invasive,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Oblivious => "oblivious",
            Mode::Invasive => "invasive",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oblivious" => Ok(Mode::Oblivious),
            "invasive" => Ok(Mode::Invasive),
            other => Err(format!("unknown schedule mode `{other}`")),
        }
    }
}

/// What happens after the last scheduled round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailPolicy {
    /// The schedule ends; running past the horizon is an error.
    #[default]
    Finite,
    /// Rounds beyond the horizon repeat the final snapshot.
    StaticTail,
}

/// An adversary token insertion, applied atomically with the transfers of
/// `round` (round 0 insertions are applied before round 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InsertionEvent {
    pub round: Round,
    pub node: NodeId,
    pub token: TokenId,
}

/// A fully materialized adversary: one snapshot per round plus optional
/// insertions. Repeated snapshots may share an `Arc`.
#[derive(Clone, Debug)]
pub struct AdversarySchedule {
    pub n: usize,
    pub snapshots: Vec<Arc<NetworkSnapshot>>,
    /// Sorted by `(round, node, token)`.
    pub insertions: Vec<InsertionEvent>,
    pub mode: Mode,
    pub tail: TailPolicy,
    pub metadata: ScheduleMetadata,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("round {round}: {defect}")]
    BadSnapshot { round: Round, defect: SnapshotDefect },
    #[error("round {round}: snapshot has {found} nodes, schedule has {expected}")]
    NodeCountMismatch {
        round: Round,
        found: usize,
        expected: usize,
    },
    #[error("oblivious schedule carries {0} insertion events")]
    ObliviousInsertions(usize),
    #[error("insertion at round {round} lies beyond the horizon {horizon}")]
    InsertionBeyondHorizon { round: Round, horizon: usize },
    #[error("insertion of token {token} at node {node} is outside the node range")]
    InsertionNodeOutOfRange { node: NodeId, token: TokenId },
}

impl AdversarySchedule {
    /// Assembles a schedule and checks every invariant, including the
    /// connectivity of every snapshot.
    pub fn new(
        n: usize,
        snapshots: Vec<Arc<NetworkSnapshot>>,
        mut insertions: Vec<InsertionEvent>,
        mode: Mode,
        metadata: ScheduleMetadata,
    ) -> Result<Self, ScheduleError> {
        insertions.sort_unstable();
        insertions.dedup();
        let schedule = AdversarySchedule {
            n,
            snapshots,
            insertions,
            mode,
            tail: TailPolicy::Finite,
            metadata,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn with_tail(mut self, tail: TailPolicy) -> Self {
        self.tail = tail;
        self
    }

    pub fn horizon(&self) -> usize {
        self.snapshots.len()
    }

    pub fn validate(&self) -> Result<(), ScheduleError> {
        let mut checked: HashSet<*const NetworkSnapshot> = HashSet::new();
        for (i, snap) in self.snapshots.iter().enumerate() {
            let round = i as Round + 1;
            if snap.n() != self.n {
                return Err(ScheduleError::NodeCountMismatch {
                    round,
                    found: snap.n(),
                    expected: self.n,
                });
            }
            if !checked.insert(Arc::as_ptr(snap)) {
                continue;
            }
            validate_snapshot(snap).map_err(|defect| ScheduleError::BadSnapshot { round, defect })?;
        }
        if self.mode == Mode::Oblivious && !self.insertions.is_empty() {
            return Err(ScheduleError::ObliviousInsertions(self.insertions.len()));
        }
        for ev in &self.insertions {
            if ev.round as usize > self.horizon() {
                return Err(ScheduleError::InsertionBeyondHorizon {
                    round: ev.round,
                    horizon: self.horizon(),
                });
            }
            if ev.node.index() >= self.n {
                return Err(ScheduleError::InsertionNodeOutOfRange {
                    node: ev.node,
                    token: ev.token,
                });
            }
        }
        Ok(())
    }

    /// The snapshot in force during `round` (1-based), honoring the tail policy.
    pub fn snapshot(&self, round: Round) -> Option<&Arc<NetworkSnapshot>> {
        let idx = (round as usize).checked_sub(1)?;
        match self.snapshots.get(idx) {
            Some(s) => Some(s),
            None if self.tail == TailPolicy::StaticTail => self.snapshots.last(),
            None => None,
        }
    }

    pub fn insertions_at(&self, round: Round) -> &[InsertionEvent] {
        let lo = self.insertions.partition_point(|e| e.round < round);
        let hi = self.insertions.partition_point(|e| e.round <= round);
        &self.insertions[lo..hi]
    }

    /// Can this schedule drive `rounds` rounds?
    pub fn covers(&self, rounds: usize) -> bool {
        self.tail == TailPolicy::StaticTail && !self.snapshots.is_empty() || self.horizon() >= rounds
    }

    /// Largest token id referenced by an insertion, plus one.
    pub fn inserted_universe(&self) -> usize {
        self.insertions.iter().map(|e| e.token.index() + 1).max().unwrap_or(0)
    }

    /// Content equality (ignores metadata and snapshot sharing).
    pub fn same_content(&self, other: &AdversarySchedule) -> bool {
        self.n == other.n
            && self.mode == other.mode
            && self.insertions == other.insertions
            && self.snapshots.len() == other.snapshots.len()
            && self.snapshots.iter().zip(&other.snapshots).all(|(a, b)| a == b)
    }
}
