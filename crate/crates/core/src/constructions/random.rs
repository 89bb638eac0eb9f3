//! Hierarchical, platform independent random streams.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

/// A seed plus a path of child indices. Equal `(seed, path)` pairs give
/// identical streams on every platform.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSeed {
    pub seed: u64,
    #[serde(default)]
    pub path: Vec<u64>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl RandomSeed {
    pub fn new(seed: u64) -> Self {
        RandomSeed { seed, path: vec![] }
    }

    pub fn child(&self, idx: u64) -> Self {
        let mut path = self.path.clone();
        path.push(idx);
        RandomSeed {
            seed: self.seed,
            path,
        }
    }

    pub fn rng(&self) -> DyadicRng {
        let mut key = [0u8; 32];
        let mut h = splitmix64(self.seed);
        for &p in &self.path {
            h = splitmix64(h ^ splitmix64(p.wrapping_add(1)));
        }
        for (k, chunk) in key.chunks_mut(8).enumerate() {
            h = splitmix64(h.wrapping_add(k as u64));
            chunk.copy_from_slice(&h.to_le_bytes());
        }
        DyadicRng(ChaCha20Rng::from_seed(key))
    }
}

pub struct DyadicRng(ChaCha20Rng);

impl DyadicRng {
    /// Uniform integer in `[0, 2^bits)`, `1 <= bits <= 64`.
    pub fn next_bits(&mut self, bits: u32) -> u64 {
        let x = self.0.next_u64();
        if bits >= 64 {
            x
        } else {
            x >> (64 - bits)
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `0..n` by rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.0.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: Vec<u64> = {
            let mut r = RandomSeed::new(7).child(3).rng();
            (0..4).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RandomSeed::new(7).child(3).rng();
            (0..4).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        let mut c = RandomSeed::new(7).child(4).rng();
        assert_ne!(a[0], c.next_u64());
        let mut d = RandomSeed::new(7).rng();
        assert!(d.next_bits(10) < 1024);
        assert!(d.below(3) < 3);
    }
}
