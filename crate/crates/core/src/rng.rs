//! Seeded substreams and Poisson variates.
//!
//! Every stream is ChaCha20 keyed by `seed` (through `seed_from_u64`) with the
//! ChaCha stream id set to `stream`, so `(seed, stream)` pins the sequence on
//! every platform and distinct streams never overlap.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::special::ln_gamma;

#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha20Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        StreamRng { inner }
    }

    /// Uniform on the open interval `(0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// `Poisson(lambda)`: inversion below 10, transformed rejection (PTRS) above.
    pub fn poisson(&mut self, lambda: f64) -> u64 {
        if lambda <= 0.0 {
            return 0;
        }
        if lambda < 10.0 {
            self.poisson_inversion(lambda)
        } else {
            self.poisson_ptrs(lambda)
        }
    }

    fn poisson_inversion(&mut self, lambda: f64) -> u64 {
        let u = self.uniform();
        let mut k = 0u64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        while u > cdf {
            k += 1;
            p *= lambda / k as f64;
            let next = cdf + p;
            if next == cdf {
                break;
            }
            cdf = next;
        }
        k
    }

    // Hörmann (1993), "The transformed rejection method for generating
    // Poisson random variables".
    fn poisson_ptrs(&mut self, lambda: f64) -> u64 {
        let slam = lambda.sqrt();
        let loglam = lambda.ln();
        let b = 0.931 + 2.53 * slam;
        let a = -0.059 + 0.02483 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let vr = 0.9277 - 3.6224 / (b - 2.0);
        loop {
            let u = self.uniform() - 0.5;
            let v = self.uniform();
            let us = 0.5 - u.abs();
            let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
            if us >= 0.07 && v <= vr {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
            let rhs = -lambda + k * loglam - ln_gamma(k + 1.0);
            if lhs <= rhs {
                return k as u64;
            }
        }
    }
}

impl RngCore for StreamRng {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut r = StreamRng::new(7, 3);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let mut r = StreamRng::new(7, 3);
        assert_eq!(a, (0..4).map(|_| r.next_u64()).collect::<Vec<_>>());
        let mut other = StreamRng::new(7, 4);
        assert_ne!(a[0], other.next_u64());
        let mut seed2 = StreamRng::new(8, 3);
        assert_ne!(a[0], seed2.next_u64());
    }

    #[test]
    fn uniform_in_open_interval() {
        let mut r = StreamRng::new(1, 0);
        let mut sum = 0.0;
        for _ in 0..100_000 {
            let u = r.uniform();
            assert!(u > 0.0 && u < 1.0);
            sum += u;
        }
        assert!((sum / 100_000.0 - 0.5).abs() < 0.005);
    }

    fn check_poisson(lambda: f64) {
        let mut r = StreamRng::new(42, lambda.to_bits());
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| r.poisson(lambda) as f64).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (lambda / n as f64).sqrt();
        assert!((mean - lambda).abs() < 5.0 * se, "lambda {lambda}: mean {mean}");
        assert!((var / lambda - 1.0).abs() < 0.03, "lambda {lambda}: var {var}");
        // pmf at the mode
        let mode = lambda.floor();
        let freq = draws.iter().filter(|&&x| x == mode).count() as f64 / n as f64;
        let p = (mode * lambda.ln() - lambda - ln_gamma(mode + 1.0)).exp();
        assert!((freq - p).abs() < 5.0 * (p * (1.0 - p) / n as f64).sqrt(), "lambda {lambda}: mode freq");
    }

    #[test]
    fn poisson_moments_both_regimes() {
        for &l in &[0.01, 0.7, 3.0, 9.9, 10.0, 37.5, 1000.0] {
            check_poisson(l);
        }
        let mut r = StreamRng::new(0, 0);
        assert_eq!(r.poisson(0.0), 0);
    }
}
