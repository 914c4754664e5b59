//! Seeded random source with the handful of distributions the model needs.
//!
//! The generator is ChaCha8 (`rand_chacha`). A `(seed, stream)` pair selects
//! the key through `seed_from_u64(seed)` and the ChaCha stream through a
//! 64-bit FNV-1a hash of the stream name, so every pair gives a reproducible,
//! platform-independent sequence with period 2^68.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::special::ln_factorial;

/// Poisson means below this use sequential inversion; larger means use PTRS.
const POISSON_INVERSION_LIMIT: f64 = 30.0;

/// Owned, single-threaded random source. Move it between threads, never share it.
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha8Rng,
}

/// 64-bit FNV-1a.
pub fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// SplitMix64 finalizer, used to spread small indices over the seed space.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the `index`-th member of a family: `base XOR mix64(index)`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    base ^ mix64(index)
}

impl RandomSource {
    pub fn new(seed: u64, stream: &str) -> Self {
        Self::with_stream_id(seed, stream_id(stream))
    }

    pub fn with_stream_id(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1), 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Exponential with the given rate, by inversion: `-ln(1-U)/rate`.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -libm::log1p(-self.uniform()) / rate
    }

    /// Gamma with integer shape `k`, as a sum of `k` exponentials.
    pub fn gamma_int(&mut self, k: u32, rate: f64) -> f64 {
        (0..k).map(|_| self.exponential(rate)).sum()
    }

    /// Poisson with the given mean.
    ///
    /// Means below 30 use inversion by sequential search. Larger means use
    /// Hörmann's PTRS transformed rejection sampler, which is exact.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        if mean < POISSON_INVERSION_LIMIT {
            self.poisson_inversion(mean)
        } else {
            self.poisson_ptrs(mean)
        }
    }

    fn poisson_inversion(&mut self, mean: f64) -> u64 {
        let u = self.uniform();
        let mut k = 0u64;
        let mut p = libm::exp(-mean);
        let mut cdf = p;
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            let next = cdf + p;
            // rounding can stall the cdf just below u far in the tail
            if next == cdf {
                break;
            }
            cdf = next;
        }
        k
    }

    // W. Hörmann, "The transformed rejection method for generating Poisson
    // random variables", Insurance: Mathematics and Economics 12 (1993).
    fn poisson_ptrs(&mut self, mean: f64) -> u64 {
        let slam = libm::sqrt(mean);
        let loglam = libm::log(mean);
        let b = 0.931 + 2.53 * slam;
        let a = -0.059 + 0.02483 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let v_r = 0.9277 - 3.6224 / (b - 2.0);
        loop {
            let u = self.uniform() - 0.5;
            let v = self.uniform();
            let us = 0.5 - libm::fabs(u);
            let k = libm::floor((2.0 * a / us + b) * u + mean + 0.43);
            if us >= 0.07 && v <= v_r {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            let lhs = libm::log(v) + libm::log(inv_alpha) - libm::log(a / (us * us) + b);
            let rhs = -mean + k * loglam - ln_factorial(k as u64);
            if lhs <= rhs {
                return k as u64;
            }
        }
    }
}
