//! Seedable, splittable random streams.
//!
//! Every stochastic routine takes an explicit [`RngStream`]. A stream is a
//! ChaCha8 keystream selected by `(seed, stream)`, so independent workers can
//! derive non-overlapping streams from one user seed and reproduce the same
//! numbers on every platform.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    /// Stream keyed by a two-level index, e.g. (sub-experiment, shard).
    pub fn keyed(seed: u64, major: u32, minor: u32) -> Self {
        Self::new(seed, (u64::from(major) << 32) | u64::from(minor))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}
