//! Seeded random streams with deterministic splitting.
//!
//! Every stream derived from one seed shares a ChaCha8 key; the root stream
//! uses ChaCha stream id 0 and `substream(i)` uses id `i + 1`. Distinct ids
//! give disjoint keystreams, so per-trial substreams never overlap.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream number `index` of this stream's seed.
    ///
    /// The result depends only on the seed and `index`, not on how many values
    /// have been drawn from `self`.
    pub fn substream(&self, index: u64) -> RandomStream {
        let index = index
            .checked_add(1)
            .expect("substream index must be below u64::MAX");
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        RandomStream {
            seed: self.seed,
            rng,
        }
    }

    /// Uniform draw from `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform integer in `0..bound`.
    #[inline]
    pub fn uniform_below(&mut self, bound: u64) -> u64 {
        self.rng.random_range(0..bound)
    }
}

impl RngCore for RandomStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
