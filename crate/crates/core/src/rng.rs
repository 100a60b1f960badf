//! Seed plumbing. Every random draw in the pipeline comes from a ChaCha
//! stream derived from one 64-bit run seed and a stream name, so each stage
//! can be re-run on its own and still see the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// 64-bit FNV-1a. Stable across platforms and releases.
#[derive(Clone, Copy, Debug)]
pub struct Fnv64(u64);

impl Fnv64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;

    pub fn new() -> Self {
        Self(Self::OFFSET)
    }

    pub fn with_seed(seed: u64) -> Self {
        let mut h = Self::new();
        h.write(&seed.to_le_bytes());
        h
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(Self::PRIME);
        }
    }

    pub fn finish(&self) -> u64 {
        // splitmix64 finalizer to spread FNV's weak low bits
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

impl Default for Fnv64 {
    fn default() -> Self {
        Self::new()
    }
}

/// Named sub-streams of the run seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Split,
    Init,
    Shuffle,
    Sample,
    Synthetic,
}

impl Stream {
    fn name(self) -> &'static str {
        match self {
            Stream::Split => "split",
            Stream::Init => "init",
            Stream::Shuffle => "shuffle",
            Stream::Sample => "sample",
            Stream::Synthetic => "synthetic",
        }
    }
}

pub fn stream_seed(seed: u64, stream: Stream) -> u64 {
    let mut h = Fnv64::with_seed(seed);
    h.write(stream.name().as_bytes());
    h.finish()
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, stream))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_distinct_and_stable() {
        assert_ne!(stream_seed(7, Stream::Split), stream_seed(7, Stream::Init));
        assert_ne!(stream_seed(7, Stream::Split), stream_seed(8, Stream::Split));
        let a: u64 = stream_rng(42, Stream::Shuffle).random();
        let b: u64 = stream_rng(42, Stream::Shuffle).random();
        assert_eq!(a, b);
    }

    #[test]
    fn fnv_reference_value() {
        // raw FNV-1a("a") before the finalizer is 0xaf63dc4c8601ec8c
        let mut h = Fnv64::new();
        h.write(b"a");
        assert_eq!(h.0, 0xaf63_dc4c_8601_ec8c);
    }
}
