//! Counter-based random streams.
//!
//! Every random draw in a simulation is addressed by a key path such as
//! `(seed, epoch, sample, layer, phase, line)`. A key hashes down to a single
//! 64-bit value and the stream for that key is SplitMix64 started at that
//! value, so draw `n` of any stream can be recomputed without replaying
//! anything else. Runs are therefore reproducible regardless of how work is
//! scheduled across threads.

use rand_core::RngCore;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline(always)]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hierarchical stream address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn root(seed: u64) -> Self {
        StreamKey(mix64(seed ^ 0x5250_555f_5349_4d00))
    }

    /// Derive a child key. Distinct `(parent, index)` pairs give
    /// statistically independent children.
    #[inline]
    pub fn child(self, index: u64) -> Self {
        StreamKey(mix64(
            self.0.wrapping_add(mix64(index.wrapping_add(GOLDEN_GAMMA))),
        ))
    }

    pub fn path(self, indices: &[u64]) -> Self {
        indices.iter().fold(self, |k, &i| k.child(i))
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> CounterRng {
        CounterRng::new(self)
    }
}

/// Labels for the top-level branches of a run's key tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    WeightInit = 1,
    DeviceSampling = 2,
    Shuffle = 3,
    ReadForward = 4,
    ReadBackward = 5,
    RowStreams = 6,
    ColStreams = 7,
    UpdateNoise = 8,
    Evaluation = 9,
    Training = 10,
}

impl From<Purpose> for u64 {
    fn from(p: Purpose) -> u64 {
        p as u64
    }
}

/// SplitMix64 positioned on a [`StreamKey`].
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: StreamKey) -> Self {
        CounterRng {
            key: key.0,
            counter: 0,
        }
    }

    /// The `n`-th output of this stream, independent of the current position.
    #[inline(always)]
    pub fn at(&self, n: u64) -> u64 {
        mix64(
            self.key
                .wrapping_add(n.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    pub fn position(&self) -> u64 {
        self.counter
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline(always)]
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for CounterRng {
    #[inline(always)]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline(always)]
    fn next_u64(&mut self) -> u64 {
        let v = self.at(self.counter);
        self.counter += 1;
        v
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
