//! Cycle weights and the normalization constants `h_n`.
//!
//! `h_n` is the coefficient of `t^n` in `exp(Σ θ_m t^m / m)`. Differentiating
//! gives the recurrence `n h_n = Σ_{m=1}^n θ_m h_{n-m}` with `h_0 = 1`, which
//! is what [`NormalizationTable::build`] runs. Floating values are stored as
//! `log h_n`; exact rationals are available for integer weights.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::io::Write;

/// Cycle weights `θ_m`.
///
/// The shipped model is `θ_m = m^γ`. The two constant families are test
/// hooks with closed-form normalizations (uniform and Ewens measures).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSequence {
    /// `θ_m = m^γ`, `γ > 0`.
    Power { gamma: f64 },
    /// `θ_m ≡ θ`, `θ > 0`.
    Constant { theta: f64 },
}

impl WeightSequence {
    pub fn power(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidGamma(gamma));
        }
        Ok(WeightSequence::Power { gamma })
    }

    /// `θ_m ≡ 1`.
    pub fn uniform() -> Self {
        WeightSequence::Constant { theta: 1.0 }
    }

    /// `θ_m ≡ θ`.
    pub fn ewens(theta: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::InvalidArgument(format!("Ewens parameter must be positive, got {theta}")));
        }
        Ok(WeightSequence::Constant { theta })
    }

    /// The exponent `γ` of the power family, `None` for the constant hooks.
    pub fn gamma(&self) -> Option<f64> {
        match *self {
            WeightSequence::Power { gamma } => Some(gamma),
            WeightSequence::Constant { .. } => None,
        }
    }

    /// `θ_m` for `m ≥ 1`.
    pub fn theta(&self, m: usize) -> f64 {
        match *self {
            WeightSequence::Power { gamma } => {
                if m == 1 {
                    1.0
                } else {
                    (gamma * (m as f64).ln()).exp()
                }
            }
            WeightSequence::Constant { theta } => theta,
        }
    }

    pub fn ln_theta(&self, m: usize) -> f64 {
        match *self {
            WeightSequence::Power { gamma } => gamma * (m as f64).ln(),
            WeightSequence::Constant { theta } => theta.ln(),
        }
    }

    /// `θ_m` as an exact integer when the weights are integral.
    pub fn exact_theta(&self, m: usize) -> Option<BigInt> {
        match *self {
            WeightSequence::Power { gamma } if gamma.fract() == 0.0 && gamma <= 64.0 => {
                Some(num_traits::pow(BigInt::from(m), gamma as usize))
            }
            WeightSequence::Constant { theta } if theta.fract() == 0.0 && theta <= 1e15 => {
                Some(BigInt::from(theta as u64))
            }
            _ => None,
        }
    }

    pub fn has_exact_weights(&self) -> bool {
        self.exact_theta(1).is_some()
    }

    /// Poisson mean `θ_m t^m / m` of the randomized cycle count `Z_m`.
    pub fn poisson_mean(&self, m: usize, t: f64) -> f64 {
        (self.ln_theta(m) + m as f64 * t.ln() - (m as f64).ln()).exp()
    }

    /// Radius `r` at which `E[Σ m Z_m] ≈ n`.
    ///
    /// Power weights use `exp(-η_γ)` with `η_γ = (n/Γ(1+γ))^{-1/(1+γ)}`; the
    /// constant hooks solve `θ r / (1 - r) = n` exactly.
    pub fn saddle_radius(&self, n: usize) -> f64 {
        match *self {
            WeightSequence::Power { gamma: g } => crate::lattice::saddle_parameter(g, n),
            WeightSequence::Constant { theta } => n as f64 / (n as f64 + theta),
        }
    }

    /// Short label for output files.
    pub fn label(&self) -> String {
        match *self {
            WeightSequence::Power { gamma } => format!("power({gamma})"),
            WeightSequence::Constant { theta } => format!("constant({theta})"),
        }
    }
}

/// `γ` as a plain number for reporting: the exponent for power weights, `0`
/// for the constant hooks (`θ_m = θ m^0`).
pub(crate) fn reporting_gamma(w: &WeightSequence) -> f64 {
    w.gamma().unwrap_or(0.0)
}

const RESCALE_EXP: i32 = 600;
const FLUSH: f64 = 1e-280;

/// Immutable table of `log h_n` for `0 ≤ n ≤ N`, optionally with exact values.
#[derive(Debug, Clone)]
pub struct NormalizationTable {
    weights: WeightSequence,
    log_h: Vec<f64>,
    /// `ratio[n] = h_{n-1} / h_n` for `n ≥ 1`; `ratio[0]` is unused.
    ratio: Vec<f64>,
    exact_h: Option<Vec<BigRational>>,
}

impl NormalizationTable {
    /// Runs the recurrence up to `max_n`, with exact rationals up to `exact_upto`.
    ///
    /// The floating pass accumulates `a_k = h_k ρ^k 2^{-S}` with `ρ` the saddle
    /// radius for `max_n`, so every term of `Σ_m θ_m ρ^m a_{n-m}` is positive
    /// and in range; `S` is bumped by an exact power of two whenever the
    /// running values grow large.
    pub fn build(weights: WeightSequence, max_n: usize, exact_upto: usize) -> Result<Self> {
        if let WeightSequence::Power { gamma } = weights {
            if !(gamma > 0.0) || !gamma.is_finite() {
                return Err(Error::InvalidGamma(gamma));
            }
        }
        if max_n == 0 {
            return Err(Error::InvalidArgument("normalization table needs N >= 1".into()));
        }
        if exact_upto > max_n {
            return Err(Error::InvalidArgument(format!(
                "exact_upto = {exact_upto} exceeds table size N = {max_n}"
            )));
        }
        let (log_h, ratio) = float_recurrence(&weights, max_n)?;
        let exact_h = if exact_upto > 0 {
            Some(exact_recurrence(&weights, exact_upto)?)
        } else {
            None
        };
        Ok(NormalizationTable {
            weights,
            log_h,
            ratio,
            exact_h,
        })
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    /// Largest `n` covered.
    pub fn max_n(&self) -> usize {
        self.log_h.len() - 1
    }

    pub fn log_h(&self, n: usize) -> f64 {
        self.log_h[n]
    }

    pub fn log_h_slice(&self) -> &[f64] {
        &self.log_h
    }

    /// `h_{n-1} / h_n`.
    pub fn ratio(&self, n: usize) -> f64 {
        self.ratio[n]
    }

    pub fn exact_upto(&self) -> usize {
        self.exact_h.as_ref().map_or(0, |v| v.len() - 1)
    }

    pub fn exact_h(&self, n: usize) -> Option<&BigRational> {
        self.exact_h.as_ref().and_then(|v| v.get(n))
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.max_n() {
            return Err(Error::out_of_range("n", n as f64, format!("1..={}", self.max_n())));
        }
        Ok(())
    }

    /// Law of the length of the cycle through a fixed point:
    /// `p[m] = θ_m h_{n-m} / (n h_n)` for `1 ≤ m ≤ n`; `p[0] = 0`.
    pub fn first_cycle_length_law(&self, n: usize) -> Result<Vec<f64>> {
        self.check_n(n)?;
        let mut p = vec![0.0; n + 1];
        let mut h_ratio = 1.0; // h_{n-m} / h_n
        let nf = n as f64;
        for m in 1..=n {
            h_ratio *= self.ratio[n - m + 1];
            p[m] = self.weights.theta(m) * h_ratio / nf;
        }
        Ok(p)
    }

    /// `E[(C_m)_k] = (θ_m/m)^k h_{n-mk} / h_n`; zero when `mk > n`.
    pub fn factorial_moment(&self, n: usize, m: usize, k: usize) -> Result<f64> {
        self.check_n(n)?;
        if m == 0 || k == 0 {
            return Err(Error::InvalidArgument("factorial_moment needs m, k >= 1".into()));
        }
        let Some(mk) = m.checked_mul(k).filter(|&mk| mk <= n) else {
            return Ok(0.0);
        };
        let log = k as f64 * (self.weights.ln_theta(m) - (m as f64).ln()) + self.log_h[n - mk] - self.log_h[n];
        Ok(log.exp())
    }

    /// `E[C_{m1} C_{m2}]` for `m1 ≠ m2`.
    pub fn mixed_moment(&self, n: usize, m1: usize, m2: usize) -> Result<f64> {
        self.check_n(n)?;
        if m1 == m2 {
            return Err(Error::InvalidArgument(
                "mixed_moment needs m1 != m2; use factorial_moment for equal lengths".into(),
            ));
        }
        if m1 == 0 || m2 == 0 {
            return Err(Error::InvalidArgument("cycle lengths start at 1".into()));
        }
        if m1 + m2 > n {
            return Ok(0.0);
        }
        let w = &self.weights;
        let log = w.ln_theta(m1) - (m1 as f64).ln() + w.ln_theta(m2) - (m2 as f64).ln() + self.log_h[n - m1 - m2]
            - self.log_h[n];
        Ok(log.exp())
    }

    /// Exact `E[(C_m)_k]` when the exact table covers `n`.
    pub fn factorial_moment_exact(&self, n: usize, m: usize, k: usize) -> Option<BigRational> {
        let hn = self.exact_h(n)?;
        if m * k > n {
            return Some(BigRational::zero());
        }
        let ratio = BigRational::new(self.weights.exact_theta(m)?, BigInt::from(m));
        Some(num_traits::pow(ratio, k) * self.exact_h(n - m * k)? / hn)
    }

    /// Exact `E[C_{m1} C_{m2}]`, `m1 ≠ m2`.
    pub fn mixed_moment_exact(&self, n: usize, m1: usize, m2: usize) -> Option<BigRational> {
        if m1 == m2 {
            return None;
        }
        let hn = self.exact_h(n)?;
        if m1 + m2 > n {
            return Some(BigRational::zero());
        }
        let w = &self.weights;
        let r1 = BigRational::new(w.exact_theta(m1)?, BigInt::from(m1));
        let r2 = BigRational::new(w.exact_theta(m2)?, BigInt::from(m2));
        Some(r1 * r2 * self.exact_h(n - m1 - m2)? / hn)
    }

    /// CSV with columns `schema_version,n,log_h_n,h_n_exact`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "schema_version,n,log_h_n,h_n_exact")?;
        for (n, lh) in self.log_h.iter().enumerate() {
            let exact = self.exact_h(n).map(|r| r.to_string()).unwrap_or_default();
            writeln!(out, "{},{n},{lh},{exact}", crate::SCHEMA_VERSION)?;
        }
        Ok(())
    }
}

fn float_recurrence(weights: &WeightSequence, max_n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let rho = weights.saddle_radius(max_n);
    let ln_rho = rho.ln();
    // w[m] = θ_m ρ^m, flushed to zero once negligible.
    let mut w = vec![0.0; max_n + 1];
    let mut w_len = 0;
    for m in 1..=max_n {
        let v = (weights.ln_theta(m) + m as f64 * ln_rho).exp();
        if v >= FLUSH {
            w[m] = v;
            w_len = m;
        } else if m as f64 * -ln_rho > weights.ln_theta(m) {
            // past the peak of θ_m ρ^m: everything further is smaller still
            break;
        }
    }
    // rev[max_n - k] = a_k, so a_{n-m} for m = 1.. is contiguous in rev.
    let mut rev = vec![0.0; max_n + 1];
    rev[max_n] = 1.0;
    let mut first_live = 0usize; // a_k == 0 for k < first_live
    let mut shift = 0i64;
    let mut log_h = vec![0.0; max_n + 1];
    let mut ratio = vec![1.0; max_n + 1];
    for n in 1..=max_n {
        let m_hi = w_len.min(n - first_live);
        let start = max_n - n + 1;
        let dot = dot(&w[1..=m_hi], &rev[start..start + m_hi]);
        let a = dot / n as f64;
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Numeric(format!(
                "normalization recurrence lost range at n = {n} (a_n = {a})"
            )));
        }
        rev[max_n - n] = a;
        ratio[n] = rho * rev[max_n - n + 1] / a;
        log_h[n] = a.ln() + shift as f64 * std::f64::consts::LN_2 - n as f64 * ln_rho;
        if a > 2f64.powi(RESCALE_EXP) {
            let scale = 2f64.powi(-RESCALE_EXP);
            for k in first_live..=n {
                let slot = &mut rev[max_n - k];
                *slot *= scale;
                if *slot < FLUSH {
                    *slot = 0.0;
                }
            }
            while first_live < n && rev[max_n - first_live] == 0.0 {
                first_live += 1;
            }
            shift += RESCALE_EXP as i64;
        }
    }
    Ok((log_h, ratio))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for i in 0..8 {
            acc[i] += x[i] * y[i];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

fn exact_recurrence(weights: &WeightSequence, upto: usize) -> Result<Vec<BigRational>> {
    let theta: Vec<BigInt> = (1..=upto)
        .map(|m| weights.exact_theta(m))
        .collect::<Option<_>>()
        .ok_or_else(|| {
            Error::Unsupported(format!(
                "exact normalization needs integer weights; {} is not integral",
                weights.label()
            ))
        })?;
    let mut h: Vec<BigRational> = Vec::with_capacity(upto + 1);
    h.push(BigRational::one());
    for n in 1..=upto {
        let mut acc = BigRational::zero();
        for m in 1..=n {
            acc += &h[n - m] * BigRational::from_integer(theta[m - 1].clone());
        }
        h.push(acc / BigInt::from(n));
    }
    Ok(h)
}

/// `log` of a positive rational, accurate to double precision even when
/// numerator and denominator overflow `f64`.
pub fn ln_rational(r: &BigRational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

pub(crate) fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Extension for building a table directly from `γ`.
pub fn build_normalization_table(gamma: f64, max_n: usize, exact_upto: usize) -> Result<NormalizationTable> {
    NormalizationTable::build(WeightSequence::power(gamma)?, max_n, exact_upto)
}

/// `θ(θ+1)...(θ+n-1)/n!`, the Ewens normalization.
pub fn ewens_normalization(theta: f64, n: usize) -> f64 {
    (crate::special::ln_gamma(theta + n as f64) - crate::special::ln_gamma(theta) - crate::special::ln_gamma(n as f64 + 1.0))
        .exp()
}
