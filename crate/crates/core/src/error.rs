use crate::net::{Round, SnapshotDefect};

pub use crate::net::{PlanError, ScheduleError};

/// Failures of the simulation engine. Timeouts are not errors; they show up
/// as a missing completion round in the result.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid transfer plan: {0}")]
    Plan(#[from] PlanError),
    #[error("invalid schedule: {0}")]
    Schedule(#[from] ScheduleError),
    #[error("round {round}: {defect}")]
    BadSnapshot { round: Round, defect: SnapshotDefect },
    #[error("schedule has {schedule} nodes but the token state has {state}")]
    NodeCountMismatch { schedule: usize, state: usize },
    #[error("schedule horizon {horizon} is shorter than max_rounds {max_rounds} and has no static tail")]
    HorizonTooShort { horizon: usize, max_rounds: usize },
    #[error("schedule has no snapshot for round {0}")]
    ScheduleExhausted(Round),
    #[error("round limit {0} reached")]
    RoundLimit(usize),
    #[error("initial state already at round {0}")]
    StateNotInitial(Round),
    #[error("protocol error: {0}")]
    Protocol(String),
}
