use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{NodeId, Round};

/// Protocol randomness keyed by `(seed, round, node)`.
///
/// Every `(round, node)` pair gets its own ChaCha stream under a key derived
/// from the run seed, so the draws a node makes in a round do not depend on
/// how many draws any other node made. Schedule construction never touches
/// these streams.
#[derive(Clone, Debug)]
pub struct RngStreams {
    seed: u64,
    key: [u8; 32],
}

const NODE_BITS: u32 = 24;

impl RngStreams {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(b"gossipsm");
        RngStreams { seed, key }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, round: Round, node: NodeId) -> ChaCha8Rng {
        assert!(node.0 < (1 << NODE_BITS), "node id {} too large for stream keying", node.0);
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(((round as u64) << NODE_BITS) | node.0 as u64);
        rng
    }

    /// A stream for scheduler-level decisions that belong to a round but not
    /// to a node (e.g. a load-balancing permutation).
    pub fn round_stream(&self, round: Round, tag: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(((round as u64) << NODE_BITS) | ((1 << NODE_BITS) - 1 - tag as u64));
        rng
    }
}
