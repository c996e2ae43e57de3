//! The dynamic-network model: per-round snapshots, adversary schedules,
//! token state and the round engine.

mod engine;
mod rng;
mod schedule;
mod snapshot;
mod state;

pub mod dgs;

pub use engine::{
    run_simulation, Engine, RoundObserver, RoundRecord, RunOptions, SimulationResult,
};
pub use rng::RngStreams;
pub use schedule::{AdversarySchedule, InsertionEvent, Mode, ScheduleError, TailPolicy};
pub use snapshot::{validate_snapshot, Adjacency, NetworkSnapshot, SnapshotDefect};
pub use state::{apply_round, PlanError, Send, TokenState, TransferPlan};

use serde::{Deserialize, Serialize};

/// Round index. Round 0 is the initial configuration; executed rounds are 1-based.
pub type Round = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Token identity. Tokens with an index at or above the original token
/// count of a run are dummies added by the k-to-n reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenId(pub u32);

impl TokenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_dummy(self, original_tokens: usize) -> bool {
        self.index() >= original_tokens
    }
}

impl std::fmt::Display for TokenId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
