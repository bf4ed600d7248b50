//! Seedable random streams and the branch-choice abstraction the samplers
//! are written against.
//!
//! The generator is ChaCha8 seeded through `seed_from_u64`. Only the
//! distributions are part of the contract; the exact stream is tied to this
//! generator choice.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One step of every generative process: a favoured branch of weight `theta`
/// against `m` ordinary branches of weight 1 each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Favored,
    Other(usize),
}

/// Source of branch decisions. The production implementation is
/// [`RandomStream`]; the enumeration oracle drives the same sampler code
/// through every branch instead.
pub trait Choices {
    /// Returns [`Branch::Favored`] with probability `theta / (theta + m)` and
    /// each `Branch::Other(k)`, `k < m`, with probability `1 / (theta + m)`.
    fn pick(&mut self, theta: f64, m: usize) -> Branch;
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream `index` of a batch seeded with `seed`. Depends only on the pair,
    /// never on scheduling.
    pub fn derive(seed: u64, index: u64) -> Self {
        let key = mix64(seed ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        Self::new(key)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` from 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..m` by widening multiply with rejection (no modulo bias).
    /// Panics if `m == 0`.
    pub fn below(&mut self, m: u64) -> u64 {
        assert!(m > 0, "empty range");
        let threshold = m.wrapping_neg() % m;
        loop {
            let wide = self.rng.next_u64() as u128 * m as u128;
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

impl Choices for RandomStream {
    fn pick(&mut self, theta: f64, m: usize) -> Branch {
        if m == 0 || self.uniform() * (theta + m as f64) < theta {
            Branch::Favored
        } else {
            Branch::Other(self.below(m as u64) as usize)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomStream::new(7);
        let mut b = RandomStream::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = RandomStream::derive(7, 3);
        let mut d = RandomStream::derive(7, 3);
        assert_eq!(c.next_u64(), d.next_u64());
        let mut e = RandomStream::derive(7, 4);
        assert_ne!(RandomStream::derive(7, 3).next_u64(), e.next_u64());
    }

    #[test]
    fn below_is_in_range_and_roughly_uniform() {
        let mut s = RandomStream::new(1);
        let mut counts = [0u32; 6];
        for _ in 0..60_000 {
            counts[s.below(6) as usize] += 1;
        }
        for c in counts {
            // 10_000 expected, sd ~ 91
            assert!((9_500..10_500).contains(&c), "{counts:?}");
        }
        assert_eq!(s.below(1), 0);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut s = RandomStream::new(2);
        let mut sum = 0.0;
        for _ in 0..100_000 {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        assert!((sum / 100_000.0 - 0.5).abs() < 0.005);
    }

    #[test]
    fn pick_frequencies() {
        let mut s = RandomStream::new(3);
        let trials = 200_000;
        let favored = (0..trials)
            .filter(|_| s.pick(2.0, 3) == Branch::Favored)
            .count();
        // p = 0.4, sd ~ 0.0011
        assert!((favored as f64 / trials as f64 - 0.4).abs() < 0.005);
        assert_eq!(s.pick(0.5, 0), Branch::Favored);
    }
}
