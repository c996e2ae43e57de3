//! Experiment orchestration: JSON configs, seeded batch runs, sweeps with
//! slope fits, run traces and the blocker separation statistic.

mod config;
mod files;
mod observers;
mod run;
mod separation;
mod sweep;
mod trace;

pub use config::{
    AdversarySpec, ExperimentConfig, InitialDistribution, InitialSpec, Metric, OutputSpec, ProtocolSpec,
};
pub use files::{sidecar, validate_files, write_generated, ValidationReport};
pub use observers::{InvariantObserver, SentinelObserver};
pub use run::{
    data_columns, run_cell, run_experiment, workers_from_env, write_results, CellError, CellResult, ExperimentOutput,
    CSV_HEADER, DEFAULT_HORIZON_CAP,
};
pub use separation::{
    measure_blocker_separation, SeparationError, SeparationObserver, SeparationStats, SeparationTally,
};
pub use sweep::{fit_line, median, observations, summarize, sweep, SweepPoint, SweepReport, SweepSummary};
pub use trace::{Trace, TraceError, TraceRecorder};

use crate::adversaries::AdversaryError;
use crate::central::CentralError;
use crate::error::SimError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Central(#[from] CentralError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Separation(#[from] SeparationError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("only {completed} sizes completed; a slope needs three")]
    InsufficientPoints { completed: usize },
}
