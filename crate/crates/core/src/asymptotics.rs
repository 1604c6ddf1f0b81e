//! Closed-form asymptotics for `θ_m = m^γ` and a numeric saddle-point solver.

use crate::error::{Error, Result};
use crate::special::{digamma, gamma as gamma_fn, ln_gamma, polylog, sigma_series, zeta};
use serde::Serialize;

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidGamma(gamma));
    }
    Ok(())
}

/// `η = (n/Γ(1+γ))^{-1/(1+γ)}`.
pub fn eta(gamma: f64, n: f64) -> f64 {
    (n / gamma_fn(1.0 + gamma)).powf(-1.0 / (1.0 + gamma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HnAsymptotic {
    /// Log of the leading asymptotic expression for `h_n`.
    pub log_value: f64,
    /// Relative error scale `n^{-γ/(1+γ)}`.
    pub error_scale: f64,
}

/// `h_n ≈ (2π Γ(2+γ))^{-1/2} (Γ(1+γ)/n)^{(2+γ)/(2(1+γ))}
///        · exp((1+γ)/γ · Γ(1+γ)^{1/(1+γ)} n^{γ/(1+γ)} + ζ(1-γ))`.
pub fn hn_asymptotic(gamma: f64, n: usize) -> Result<HnAsymptotic> {
    check_gamma(gamma)?;
    if n == 0 {
        return Err(Error::InvalidArgument("hn_asymptotic needs n >= 1".into()));
    }
    let g = gamma;
    let nf = n as f64;
    let lg1 = ln_gamma(1.0 + g);
    let log_value = -0.5 * ((2.0 * std::f64::consts::PI).ln() + ln_gamma(2.0 + g))
        + (2.0 + g) / (2.0 * (1.0 + g)) * (lg1 - nf.ln())
        + (1.0 + g) / g * (lg1 / (1.0 + g)).exp() * nf.powf(g / (1.0 + g))
        + zeta(1.0 - g)?;
    Ok(HnAsymptotic {
        log_value,
        error_scale: nf.powf(-g / (1.0 + g)),
    })
}

/// `γ̃_{1,s} = (1+γ+s) Γ(γ+s) / Γ(1+γ+s)^{1 - 1/(1+γ+s)}`.
pub fn gamma_tilde_1(gamma: f64, s: f64) -> f64 {
    let a = 1.0 + gamma + s;
    (a.ln() + ln_gamma(gamma + s) - (1.0 - 1.0 / a) * ln_gamma(a)).exp()
}

/// `γ̃_{2,s} = (1+γ) Γ(1+γ+s)^{1/(1+γ+s)} / ((1+γ+s) Γ(1+γ)^{1/(1+γ)})`.
pub fn gamma_tilde_2(gamma: f64, s: f64) -> f64 {
    let a = 1.0 + gamma + s;
    let b = 1.0 + gamma;
    (b.ln() + ln_gamma(a) / a - a.ln() - ln_gamma(b) / b).exp()
}

/// Asymptotic `log E[exp(s log Y_n)]`, valid for `s > -γ`.
pub fn mgf_log_y_asymptotic(gamma: f64, n: usize, s: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(s > -gamma) || !s.is_finite() {
        return Err(Error::out_of_range("s", s, format!("(-{gamma}, inf)")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let a0 = 1.0 + gamma;
    let as_ = 1.0 + gamma + s;
    Ok(0.5 * gamma_tilde_2(gamma, s).ln()
        + 0.5 * (1.0 / a0 - 1.0 / as_) * nf.ln()
        + gamma_tilde_1(gamma, s) * nf.powf(1.0 - 1.0 / as_)
        - gamma_tilde_1(gamma, 0.0) * nf.powf(1.0 - 1.0 / a0)
        + zeta(1.0 - s - gamma)?
        - zeta(1.0 - gamma)?)
}

/// Closed-form saddle point `r_ns = exp(-(n/Γ(2-a))^{1/(a-2)})`, `a = 1-s-γ`.
pub fn mgf_saddle_closed_form(gamma: f64, n: usize, s: f64) -> f64 {
    let a = 1.0 - s - gamma;
    (-(n as f64 / gamma_fn(2.0 - a)).powf(1.0 / (a - 2.0))).exp()
}

/// `K(γ) = Γ(γ) Γ(1+γ)^{-γ/(1+γ)}`, defined for every `γ > 0`.
pub fn k_constant(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok((ln_gamma(gamma) - gamma / (1.0 + gamma) * ln_gamma(1.0 + gamma)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErdosTuranConstants {
    pub gamma: f64,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: f64,
    /// Variance scale `K/(1+γ)^3 · n^{γ/(1+γ)} log² n`.
    #[serde(rename = "F")]
    pub f: f64,
    /// Centering `K/(1+γ) · n^{γ/(1+γ)} log n + n^{γ/(1+γ)} H`.
    #[serde(rename = "G")]
    pub g: f64,
    /// `K (ψ(γ) - log Γ(1+γ)/(1+γ))`; independent of `n`.
    #[serde(rename = "H")]
    pub h: f64,
}

fn check_unit_interval(gamma: f64) -> Result<()> {
    check_gamma(gamma)?;
    if gamma >= 1.0 {
        return Err(Error::Unsupported(format!(
            "the log-order CLT constants are only available for 0 < gamma < 1, got {gamma}"
        )));
    }
    Ok(())
}

/// Centering `G(n)` and scale `F(n)` for `log O_n`, `0 < γ < 1`.
pub fn erdos_turan_constants(gamma: f64, n: usize) -> Result<ErdosTuranConstants> {
    check_unit_interval(gamma)?;
    let k = k_constant(gamma)?;
    let nf = n as f64;
    let e = gamma / (1.0 + gamma);
    let np = nf.powf(e);
    let ln = nf.ln();
    let h = k * (digamma(gamma)? - ln_gamma(1.0 + gamma) / (1.0 + gamma));
    Ok(ErdosTuranConstants {
        gamma,
        n,
        k,
        f: k / (1.0 + gamma).powi(3) * np * ln * ln,
        g: k / (1.0 + gamma) * np * ln + np * h,
        h,
    })
}

/// `(G̃(n), H̃)` with `H̃ = -K log Γ(1+γ)/(1+γ)`: the centering obtained from
/// the independent-Poisson functional.
pub fn poisson_functional_centering(gamma: f64, n: usize) -> Result<(f64, f64)> {
    check_unit_interval(gamma)?;
    let k = k_constant(gamma)?;
    let nf = n as f64;
    let np = nf.powf(gamma / (1.0 + gamma));
    let tilde_h = -k * ln_gamma(1.0 + gamma) / (1.0 + gamma);
    Ok((k / (1.0 + gamma) * np * nf.ln() + np * tilde_h, tilde_h))
}

/// Leading forms for the Poisson moment sums and their error scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentAsymptotics {
    pub mu_0b: f64,
    pub var_0b: f64,
    pub mu_bn: f64,
    pub var_bn: f64,
    /// `b^γ`
    pub err_mu_0b: f64,
    /// `b^{1+γ}`
    pub err_var_0b: f64,
    /// `n^{γ/(1+γ)}`
    pub err_mu_bn: f64,
    /// `n`
    pub err_var_bn: f64,
}

/// With `y = bη` and `Σ_2` the incomplete-gamma tail from
/// [`sigma_series`]:
///
/// * `μ_{0b}  = b^{1+γ}/(1+γ) - n/Γ(1+γ) Σ_2(1+γ, y)`
/// * `σ²_{0b} = b^{2+γ}/(2+γ) - (n/Γ(1+γ))^{(2+γ)/(1+γ)} Σ_2(2+γ, y)`
/// * `μ_{bn}  = n - μ_{0b}`
/// * `σ²_{bn} = (1+γ) Γ(1+γ)^{-1/(1+γ)} n^{(2+γ)/(1+γ)} - σ²_{0b}`
pub fn lemma31_asymptotic(gamma: f64, n: usize, b: usize) -> Result<MomentAsymptotics> {
    check_gamma(gamma)?;
    let g = gamma;
    let nf = n as f64;
    let bf = b as f64;
    let y = bf * eta(g, nf);
    let scale = nf / gamma_fn(1.0 + g);
    let mu_0b = bf.powf(1.0 + g) / (1.0 + g) - scale * sigma_series(2, 1.0 + g, y)?;
    let var_0b = bf.powf(2.0 + g) / (2.0 + g) - scale.powf((2.0 + g) / (1.0 + g)) * sigma_series(2, 2.0 + g, y)?;
    let total_var = (1.0 + g) * gamma_fn(1.0 + g).powf(-1.0 / (1.0 + g)) * nf.powf((2.0 + g) / (1.0 + g));
    Ok(MomentAsymptotics {
        mu_0b,
        var_0b,
        mu_bn: nf - mu_0b,
        var_bn: total_var - var_0b,
        err_mu_0b: bf.powf(g),
        err_var_0b: bf.powf(1.0 + g),
        err_mu_bn: nf.powf(g / (1.0 + g)),
        err_var_bn: nf,
    })
}

/// `b^{2+γ} n^{-(2+γ)/(1+γ)} + b^{-γ/6} + n^{-γ/(1+γ)}`; infinite at `b = 0`.
pub fn tv_rate_bound(gamma: f64, n: usize, b: usize) -> f64 {
    let (nf, bf) = (n as f64, b as f64);
    bf.powf(2.0 + gamma) * nf.powf(-(2.0 + gamma) / (1.0 + gamma)) + bf.powf(-gamma / 6.0) + nf.powf(-gamma / (1.0 + gamma))
}

/// A function `g` analytic on `(0, ρ)` with positive coefficients.
pub trait SaddleEvaluator {
    fn g(&self, r: f64) -> Result<f64>;
    fn dg(&self, r: f64) -> Result<f64>;
    fn d2g(&self, r: f64) -> Result<f64>;

    /// `α(r) = r g'(r)`.
    fn alpha(&self, r: f64) -> Result<f64> {
        Ok(r * self.dg(r)?)
    }

    /// `β(r) = r α'(r) = r g'(r) + r² g''(r)`.
    fn beta(&self, r: f64) -> Result<f64> {
        Ok(r * self.dg(r)? + r * r * self.d2g(r)?)
    }
}

/// `g(r) = Σ_m m^{γ+s-1} r^m = Li_{1-γ-s}(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolylogEvaluator {
    pub gamma: f64,
    pub s: f64,
}

impl PolylogEvaluator {
    fn order(&self) -> f64 {
        1.0 - self.gamma - self.s
    }
}

impl SaddleEvaluator for PolylogEvaluator {
    fn g(&self, r: f64) -> Result<f64> {
        polylog(self.order(), r)
    }

    fn dg(&self, r: f64) -> Result<f64> {
        Ok(polylog(self.order() - 1.0, r)? / r)
    }

    fn d2g(&self, r: f64) -> Result<f64> {
        let a = self.order();
        Ok((polylog(a - 2.0, r)? - polylog(a - 1.0, r)?) / (r * r))
    }

    fn alpha(&self, r: f64) -> Result<f64> {
        polylog(self.order() - 1.0, r)
    }

    fn beta(&self, r: f64) -> Result<f64> {
        polylog(self.order() - 2.0, r)
    }
}

/// `g(r) = -θ log(1-r)`, the constant-weight case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantWeightEvaluator {
    pub theta: f64,
}

impl SaddleEvaluator for ConstantWeightEvaluator {
    fn g(&self, r: f64) -> Result<f64> {
        Ok(-self.theta * (-r).ln_1p())
    }

    fn dg(&self, r: f64) -> Result<f64> {
        Ok(self.theta / (1.0 - r))
    }

    fn d2g(&self, r: f64) -> Result<f64> {
        Ok(self.theta / ((1.0 - r) * (1.0 - r)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleSolution {
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub g_value: f64,
}

const SADDLE_TOL: f64 = 0.25;

/// Bisection in `u = -log(1-r)` for `α(r) = target` up to `0.25 √β(r)`.
pub fn solve_saddle_numeric<E: SaddleEvaluator + ?Sized>(eval: &E, target: f64) -> Result<SaddleSolution> {
    if !(target >= 1.0) {
        return Err(Error::InvalidArgument(format!("saddle target must be >= 1, got {target}")));
    }
    let r_of = |u: f64| -(-u).exp_m1();
    let mut lo = 1e-8;
    if eval.alpha(r_of(lo))? >= target {
        return Err(Error::Numeric(format!("saddle bracket: alpha already exceeds {target} near r = 0")));
    }
    let mut hi = 1.0;
    while eval.alpha(r_of(hi))? < target {
        lo = hi;
        hi *= 2.0;
        if hi > 700.0 {
            return Err(Error::Numeric(format!("saddle bracket: alpha stays below {target} as r -> 1")));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let r = r_of(mid);
        let alpha = eval.alpha(r)?;
        let beta = eval.beta(r)?;
        if (alpha - target).abs() <= SADDLE_TOL * beta.sqrt() {
            return Ok(SaddleSolution {
                r,
                alpha,
                beta,
                g_value: eval.g(r)?,
            });
        }
        if alpha < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numeric(format!("saddle bisection did not reach tolerance for target {target}")))
}
