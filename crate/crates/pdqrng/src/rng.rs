//! Deterministic randomness plumbing.
//!
//! Every random draw in the pipeline comes from one 64-bit seed expanded
//! into named substreams. A substream key is SHA-256(seed ‖ stage ‖ chunk),
//! so stages never share state and chunked generation is order-independent:
//! chunk k of the phase stream is the same bytes whether produced serially
//! or on a worker pool.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy)]
pub struct SeedSchedule {
    pub seed: u64,
}

impl SeedSchedule {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Independent generator for (stage, chunk).
    pub fn substream(&self, stage: &str, chunk: u64) -> ChaCha12Rng {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update(stage.as_bytes());
        hasher.update(chunk.to_le_bytes());
        let key: [u8; 32] = hasher.finalize().into();
        ChaCha12Rng::from_seed(key)
    }
}

/// Pulses per RNG chunk; parallel stages split work on this boundary.
pub const CHUNK: usize = 1 << 16;
