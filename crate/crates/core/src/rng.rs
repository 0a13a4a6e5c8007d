//! Counter-based random streams.
//!
//! Every draw in an experiment is addressed by the triple
//! `(seed, replicate, observation)`. The triple is hashed into the state of a
//! SplitMix64 generator, so any observation can be regenerated in isolation
//! and replicates can be farmed out to any number of threads without changing
//! the numbers they see.

use rand::RngCore;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent seed from a parent seed and a label.
pub fn derive_seed(parent: u64, label: u64) -> u64 {
    mix64(mix64(parent ^ GOLDEN_GAMMA).wrapping_add(label.wrapping_mul(GOLDEN_GAMMA)))
}

/// Addresses the stream of one Monte Carlo replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub replicate: u64,
}

impl StreamKey {
    pub fn new(seed: u64, replicate: u64) -> Self {
        Self { seed, replicate }
    }

    /// Generator owned by observation `index` of this replicate.
    #[inline]
    pub fn observation(&self, index: u64) -> CounterRng {
        self.streams().observation(index)
    }

    /// Hashes the replicate address once for a run over many observations.
    pub fn streams(&self) -> ReplicateStreams {
        ReplicateStreams {
            base: derive_seed(self.seed, self.replicate),
        }
    }
}

/// Observation generators of one replicate.
#[derive(Debug, Clone, Copy)]
pub struct ReplicateStreams {
    base: u64,
}

impl ReplicateStreams {
    #[inline]
    pub fn observation(&self, index: u64) -> CounterRng {
        CounterRng {
            state: mix64(self.base ^ index.wrapping_mul(0xd605_bbb5_8c8a_bbd5)),
        }
    }
}

/// SplitMix64 generator whose starting state is a hash of a stream address.
#[derive(Debug, Clone)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    pub fn from_seed(seed: u64) -> Self {
        Self { state: mix64(seed) }
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
