//! Adversary schedule generators.
//!
//! Every generator is a pure function of its parameters and seed. The seed
//! feeds a schedule-only random stream that never overlaps the protocol
//! streams of [`crate::net::RngStreams`].

mod blocker;
mod paths;
mod random;
mod registry;
mod skb;

pub use blocker::{build_blocker_line_invasive, build_blocker_line_oblivious, BlockerLineParams};
pub use paths::{
    build_center_terminal, build_ring_failure, validate_paths_respecting, PathSystem, PathsError, PathsReport,
    PathsRespecting, PathViolation, RingPolicy,
};
pub use random::{build_random_interval_connected, build_static, random_spanning_tree, StaticFamily};
pub use registry::{build_named, AdversaryName, AdversaryParams, GeneratedAdversary};
pub use skb::{build_skb_adversary, SkbAdversaryParams};

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::net::{NodeId, Round, TokenId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdversaryError {
    #[error("n = {n}: {reason}")]
    Unsupported { n: usize, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error(transparent)]
    Schedule(#[from] crate::net::ScheduleError),
}

/// One segment of a line-based lower-bound construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentInfo {
    pub phase: u32,
    pub segment: u32,
    pub first_round: Round,
    pub last_round: Round,
    /// Inner nodes in line order, nearest the source first.
    pub inner: Vec<NodeId>,
    pub outer: Vec<NodeId>,
}

/// Tokens arriving at `nodes` during `round` become that phase's blockers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockerCapture {
    pub phase: u32,
    pub round: Round,
    pub nodes: Vec<NodeId>,
}

/// Generator name, effective parameters and the construction's landmarks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScheduleMetadata {
    pub generator: String,
    pub n: usize,
    pub seed: u64,
    pub params: BTreeMap<String, serde_json::Value>,
    /// Node that starts with every token, when the construction has one.
    #[serde(default)]
    pub source: Option<NodeId>,
    #[serde(default)]
    pub blocker_groups: Vec<Vec<TokenId>>,
    #[serde(default)]
    pub sentinel_tokens: Vec<TokenId>,
    #[serde(default)]
    pub target_nodes: Vec<NodeId>,
    #[serde(default)]
    pub segments: Vec<SegmentInfo>,
    #[serde(default)]
    pub blocker_capture: Vec<BlockerCapture>,
}

impl ScheduleMetadata {
    pub fn new(generator: &str, n: usize, seed: u64) -> Self {
        ScheduleMetadata {
            generator: generator.to_string(),
            n,
            seed,
            ..Default::default()
        }
    }

    pub fn imported(n: usize) -> Self {
        Self::new("file", n, 0)
    }

    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn has_sentinels(&self) -> bool {
        !self.sentinel_tokens.is_empty() && !self.target_nodes.is_empty()
    }
}

/// The schedule-construction stream for `(seed, tag)`.
pub(crate) fn schedule_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(b"schedule");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(tag);
    rng
}

pub(crate) fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub(crate) fn icbrt(n: usize) -> usize {
    let mut r = (n as f64).cbrt() as usize;
    while r * r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub(crate) fn log2(n: usize) -> f64 {
    (n as f64).log2()
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    log2(n).ceil() as usize
}
