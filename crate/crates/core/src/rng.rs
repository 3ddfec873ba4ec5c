//! Seeded, splittable random streams.
//!
//! Every stochastic routine takes an explicit [`SimRng`]. Batch simulations
//! split work into fixed-size chunks and give each chunk its own stream via
//! [`SimRng::fork`], so results depend only on the seed and chunk layout and
//! never on thread scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct SimRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Generator for stream `stream` of `seed`. Distinct streams of the same
    /// seed are independent ChaCha keystreams.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    /// Derives an independent child generator. The child depends only on this
    /// generator's `(seed, stream)` and `index`, not on how much of this
    /// generator has been consumed.
    pub fn fork(&self, index: u64) -> Self {
        Self::with_stream(splitmix64(self.seed ^ splitmix64(self.stream)), index)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for SimRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
