//! The independent-Poisson side: `Z_m ~ Poisson(θ_m t^m / m)`, the lattice
//! laws of `T_{ℓk} = Σ_{ℓ<m≤k} m Z_m`, and `d_b(n)` from
//!
//! `d_b(n) = Σ_k P[T_{0b}=k] (1 - P[T_{bn}=n-k] / P[T_{0n}=n])^+`.

use crate::error::{Error, Result};
use crate::partition::kahan_sum;
use crate::special::{gamma as gamma_fn, ln_gamma, normal_cdf};
use crate::weights::{NormalizationTable, WeightSequence};

/// Poisson masses below this, past the mode, are folded into the overflow bucket.
const POISSON_TAIL_CUT: f64 = 1e-18;
pub const MAX_DP_N: usize = 5000;

/// Saddle radius `t = exp(-η)` with `η = (n/Γ(1+γ))^{-1/(1+γ)}`.
pub fn saddle_parameter(gamma: f64, n: usize) -> f64 {
    let eta = (n as f64 / gamma_fn(1.0 + gamma)).powf(-1.0 / (1.0 + gamma));
    (-eta).exp()
}

/// Poisson means `λ_m = θ_m t^m / m` for `m = 1..=n`.
#[derive(Debug, Clone)]
pub struct PoissonSpec {
    pub weights: WeightSequence,
    pub n: usize,
    pub t: f64,
    /// `means[m] = λ_m`; `means[0] = 0`.
    pub means: Vec<f64>,
}

impl PoissonSpec {
    /// Spec at the default saddle radius for `n`.
    pub fn new(weights: WeightSequence, n: usize) -> Result<Self> {
        Self::with_t(weights, n, weights.saddle_radius(n.max(1)))
    }

    pub fn with_t(weights: WeightSequence, n: usize, t: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("PoissonSpec needs n >= 1".into()));
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::out_of_range("t", t, "(0, 1)"));
        }
        let mut means = vec![0.0; n + 1];
        for (m, slot) in means.iter_mut().enumerate().skip(1) {
            *slot = weights.poisson_mean(m, t);
        }
        Ok(PoissonSpec { weights, n, t, means })
    }

    /// `Σ_{m≤n} λ_m`.
    pub fn total_mean(&self) -> f64 {
        kahan_sum(self.means[1..].iter().copied())
    }

    /// Closed form `P[T_{0n} = n] = t^n h_n exp(-Σ_{m≤n} λ_m)`, in log space.
    pub fn ln_p_total_closed_form(&self, tab: &NormalizationTable) -> Result<f64> {
        if tab.max_n() < self.n {
            return Err(Error::InvalidArgument(format!(
                "normalization table covers {} but n = {}",
                tab.max_n(),
                self.n
            )));
        }
        Ok(self.n as f64 * self.t.ln() + tab.log_h(self.n) - self.total_mean())
    }
}

/// pmf over `{0..=cap}` plus the mass of all values above `cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDistribution {
    pub cap: usize,
    pub pmf: Vec<f64>,
    pub overflow: f64,
}

impl LatticeDistribution {
    pub fn point_mass_at_zero(cap: usize) -> Self {
        let mut pmf = vec![0.0; cap + 1];
        pmf[0] = 1.0;
        LatticeDistribution { cap, pmf, overflow: 0.0 }
    }

    pub fn total_mass(&self) -> f64 {
        kahan_sum(self.pmf.iter().copied()) + self.overflow
    }

    /// Mean and variance of the part below the cap (no overflow expected).
    pub fn mean_var(&self) -> (f64, f64) {
        let mean = kahan_sum(self.pmf.iter().enumerate().map(|(k, p)| k as f64 * p));
        let var = kahan_sum(self.pmf.iter().enumerate().map(|(k, p)| (k as f64 - mean).powi(2) * p));
        (mean, var)
    }

    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }

    /// Convolves in the law of `m Z` with `Z ~ Poisson(lambda)`.
    fn convolve_scaled_poisson(&mut self, m: usize, lambda: f64) {
        let cap = self.cap;
        let jmax_cap = cap / m;
        // Poisson pmf in log space up to the cap or past the mode below the cut.
        let ln_l = lambda.ln();
        let mut pois = Vec::new();
        let mut cut_tail = 0.0;
        for j in 0..=jmax_cap {
            let p = (j as f64 * ln_l - lambda - ln_gamma(j as f64 + 1.0)).exp();
            if j as f64 > lambda && p < POISSON_TAIL_CUT {
                cut_tail = tail_bound_mass(lambda, j);
                break;
            }
            pois.push(p);
        }
        // upper[j] = P[Z >= j] restricted to the stored support, plus the cut tail.
        let mut upper = vec![0.0; pois.len() + 1];
        upper[pois.len()] = if pois.len() == jmax_cap + 1 {
            poisson_upper_tail(lambda, jmax_cap + 1)
        } else {
            cut_tail
        };
        for j in (0..pois.len()).rev() {
            upper[j] = upper[j + 1] + pois[j];
        }
        let mut out = vec![0.0; cap + 1];
        let mut spill = 0.0;
        for (v, &pv) in self.pmf.iter().enumerate() {
            if pv == 0.0 {
                continue;
            }
            let room = (cap - v) / m; // largest j staying within the cap
            let jn = room.min(pois.len() - 1);
            for (j, &pj) in pois[..=jn].iter().enumerate() {
                out[v + m * j] += pv * pj;
            }
            spill += pv * upper[(jn + 1).min(pois.len())];
        }
        self.overflow += spill;
        self.pmf = out;
    }
}

/// `P[Z ≥ j]` for `j` past the mode, summed term by term until negligible.
fn poisson_upper_tail(lambda: f64, j: usize) -> f64 {
    if (j as f64) <= lambda {
        // not needed in the tail regime; fall back on the complement
        let below: f64 = (0..j).map(|i| (i as f64 * lambda.ln() - lambda - ln_gamma(i as f64 + 1.0)).exp()).sum();
        return (1.0 - below).max(0.0);
    }
    tail_bound_mass(lambda, j)
}

fn tail_bound_mass(lambda: f64, j: usize) -> f64 {
    let mut term = (j as f64 * lambda.ln() - lambda - ln_gamma(j as f64 + 1.0)).exp();
    let mut sum = 0.0;
    let mut i = j;
    while term > 0.0 {
        sum += term;
        i += 1;
        term *= lambda / i as f64;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Law of `T_{ℓk}` truncated at `cap`, by ascending convolution over `m = ℓ+1..=k`.
pub fn lattice_law(spec: &PoissonSpec, ell: usize, k: usize, cap: usize) -> Result<LatticeDistribution> {
    if ell > k || k > spec.n {
        return Err(Error::InvalidArgument(format!(
            "lattice_law needs 0 <= ell <= k <= n; got ell = {ell}, k = {k}, n = {}",
            spec.n
        )));
    }
    let mut d = LatticeDistribution::point_mass_at_zero(cap);
    for m in ell + 1..=k {
        d.convolve_scaled_poisson(m, spec.means[m]);
    }
    Ok(d)
}

/// `|P_DP[T_{0n} = n] / (t^n h_n e^{-Σλ}) - 1|`.
pub fn conditioning_identity_check(spec: &PoissonSpec, tab: &NormalizationTable) -> Result<f64> {
    let closed = spec.ln_p_total_closed_form(tab)?;
    let law = lattice_law(spec, 0, spec.n, spec.n)?;
    let dp = law.pmf[spec.n];
    Ok((dp.ln() - closed).exp_m1().abs())
}

/// `d_b(n)` for `0 ≤ b ≤ n ≤ 5000`; `b = n` gives `1 - P[T_{0n}=n]`.
pub fn dp_tv_distance(spec: &PoissonSpec, tab: &NormalizationTable, b: usize) -> Result<f64> {
    dp_tv_with_denominator(spec, tab, b).map(|(d, _)| d)
}

/// `d_b(n)` together with `P[T_{0n} = n]`.
pub fn dp_tv_with_denominator(spec: &PoissonSpec, tab: &NormalizationTable, b: usize) -> Result<(f64, f64)> {
    let n = spec.n;
    if n > MAX_DP_N {
        return Err(Error::out_of_range("n", n as f64, format!("1..={MAX_DP_N}")));
    }
    if b > n {
        return Err(Error::out_of_range("b", b as f64, format!("0..={n}")));
    }
    let ln_denom = spec.ln_p_total_closed_form(tab)?;
    let denom = ln_denom.exp();
    if !(denom > 1e-300) {
        return Err(Error::Numeric(format!("P[T_0n = n] underflows at n = {n} (log = {ln_denom})")));
    }
    if b == 0 {
        return Ok((0.0, denom));
    }
    let small = lattice_law(spec, 0, b, n)?;
    let large = lattice_law(spec, b, n, n)?;
    let terms = (0..=n).map(|k| small.pmf[k] * (1.0 - large.pmf[n - k] / denom).max(0.0));
    let d = kahan_sum(terms) + small.overflow;
    Ok((d.clamp(0.0, 1.0), denom))
}

/// Exact weighted sums `Σ θ_k t^k`, `Σ k θ_k t^k`, ... over `k ≤ b` and `b < k ≤ n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSums {
    /// `μ_{0b} = Σ_{k≤b} θ_k t^k`.
    pub mu_0b: f64,
    /// `σ²_{0b} = Σ_{k≤b} k θ_k t^k`.
    pub var_0b: f64,
    pub mu_bn: f64,
    pub var_bn: f64,
    /// `Σ_{k≤b} k² θ_k t^k`.
    pub third_0b: f64,
    /// `Σ_{k≤b} k³ θ_k t^k`.
    pub fourth_0b: f64,
}

pub fn moment_sums(spec: &PoissonSpec, b: usize) -> Result<MomentSums> {
    if b > spec.n {
        return Err(Error::out_of_range("b", b as f64, format!("0..={}", spec.n)));
    }
    // θ_k t^k = k λ_k
    let term = |k: usize, p: i32| (k as f64).powi(p) * spec.means[k];
    let sum = |lo: usize, hi: usize, p: i32| kahan_sum((lo..=hi).map(|k| term(k, p)));
    Ok(MomentSums {
        mu_0b: sum(1, b, 1),
        var_0b: sum(1, b, 2),
        mu_bn: sum(b + 1, spec.n, 1),
        var_bn: sum(b + 1, spec.n, 2),
        third_0b: sum(1, b, 3),
        fourth_0b: sum(1, b, 4),
    })
}

/// Kolmogorov distance of `T_{0b}/b^x` to its moment-matched Gaussian, with
/// `x = 1 + γ/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDiagnostic {
    pub mu_scaled: f64,
    pub sigma_scaled: f64,
    pub kolmogorov: f64,
    /// `d_K · b^{γ/6}`.
    pub scaled_ratio: f64,
}

pub fn gaussian_kolmogorov_diagnostic(spec: &PoissonSpec, b: usize) -> Result<GaussianDiagnostic> {
    if b == 0 {
        return Err(Error::InvalidArgument("gaussian diagnostic needs b >= 1".into()));
    }
    let g = crate::weights::reporting_gamma(&spec.weights);
    let ms = moment_sums(spec, b)?;
    let x = 1.0 + g / 3.0;
    let scale = (b as f64).powf(x);
    let sd = ms.var_0b.sqrt();
    // Enough room above the mean for the upper tail to be negligible.
    let cap = (ms.mu_0b + 12.0 * sd + 2.0 * b as f64).ceil() as usize;
    let cap = cap.max(b);
    let spec_b = PoissonSpec {
        weights: spec.weights,
        n: b,
        t: spec.t,
        means: spec.means[..=b].to_vec(),
    };
    let law = lattice_law(&spec_b, 0, b, cap)?;
    let mut dk: f64 = 0.0;
    let mut below = 0.0;
    for (k, p) in law.pmf.iter().enumerate() {
        let phi = normal_cdf((k as f64 - ms.mu_0b) / sd);
        dk = dk.max((below - phi).abs());
        below += p;
        dk = dk.max((below - phi).abs());
    }
    Ok(GaussianDiagnostic {
        mu_scaled: ms.mu_0b / scale,
        sigma_scaled: sd / scale,
        kolmogorov: dk,
        scaled_ratio: dk * (b as f64).powf(g / 6.0),
    })
}
