//! Seeded, portable randomness.
//!
//! Every random decision in the pipeline (corpus splits, SGD epoch order)
//! draws from ChaCha8 seeded through `seed_from_u64`, and bounded integers are
//! produced here by rejection sampling on raw `u64` output. Nothing depends on
//! `rand`'s distribution code, whose output is not stable across releases.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Name written into manifests so a reader knows how to regenerate a split.
pub const PRNG_NAME: &str = "chacha8/seed_from_u64/fisher-yates-rejection";

pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform integer in `0..bound`. `bound` must be non-zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let v = self.0.next_u64();
            if v <= zone {
                return v % bound;
            }
        }
    }

    /// Durstenfeld shuffle, last index downwards.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
