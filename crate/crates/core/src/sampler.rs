//! Exact samplers for the cycle type under `P_Θ`.
//!
//! * Recursive: from remaining size `r`, pick the length `m` of the cycle
//!   through a fixed point with probability `θ_m h_{r-m} / (r h_r)`, then
//!   recurse on `r - m`.
//! * Rejection: draw `Z_m ~ Poisson(θ_m t^m / m)` at the saddle radius and
//!   accept when `Σ m Z_m = n`.

use crate::cycle_type::CycleType;
use crate::error::{Error, Result};
use crate::lattice::PoissonSpec;
use crate::rng::StreamRng;
use crate::weights::{NormalizationTable, WeightSequence};
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

pub const REJECTION_RETRY_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Recursive,
    Rejection,
}

impl Method {
    /// Recursive when a table covering `n` is at hand, rejection otherwise.
    pub fn default_for(n: usize, tab: Option<&NormalizationTable>) -> Method {
        match tab {
            Some(t) if t.max_n() >= n => Method::Recursive,
            _ => Method::Rejection,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursive" => Ok(Method::Recursive),
            "rejection" => Ok(Method::Rejection),
            _ => Err(Error::Config(format!("unknown sampler method '{s}' (recursive | rejection)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub weights: WeightSequence,
    pub n: usize,
    pub method: Method,
    pub seed: u64,
    pub stream: u64,
}

impl SamplerConfig {
    pub fn new(gamma: f64, n: usize, method: Method, seed: u64, stream: u64) -> Result<Self> {
        Ok(SamplerConfig {
            weights: WeightSequence::power(gamma)?,
            n,
            method,
            seed,
            stream,
        })
    }
}

struct RejectionState {
    total_mean: f64,
    alias: WeightedAliasIndex<f64>,
}

/// A single-threaded sampling worker bound to one `(seed, stream)`.
pub struct Sampler<'a> {
    cfg: SamplerConfig,
    rng: StreamRng,
    tab: Option<&'a NormalizationTable>,
    theta: Vec<f64>,
    rejection: Option<RejectionState>,
    attempts: u64,
    accepted: u64,
}

impl<'a> Sampler<'a> {
    pub fn new(cfg: SamplerConfig, tab: Option<&'a NormalizationTable>) -> Result<Self> {
        if cfg.n == 0 {
            return Err(Error::InvalidArgument("sampler needs n >= 1".into()));
        }
        let mut theta = Vec::new();
        let mut rejection = None;
        match cfg.method {
            Method::Recursive => {
                let t = tab.ok_or_else(|| Error::InvalidArgument("recursive sampler needs a normalization table".into()))?;
                if t.max_n() < cfg.n {
                    return Err(Error::InvalidArgument(format!(
                        "normalization table covers {} but n = {}",
                        t.max_n(),
                        cfg.n
                    )));
                }
                if t.weights() != &cfg.weights {
                    return Err(Error::InvalidArgument("table weights differ from sampler weights".into()));
                }
                theta = (0..=cfg.n).map(|m| if m == 0 { 0.0 } else { cfg.weights.theta(m) }).collect();
            }
            Method::Rejection => {
                let spec = PoissonSpec::new(cfg.weights, cfg.n)?;
                let total_mean = spec.total_mean();
                let alias = WeightedAliasIndex::new(spec.means[1..].to_vec())
                    .map_err(|e| Error::Numeric(format!("alias table for Poisson means: {e}")))?;
                rejection = Some(RejectionState { total_mean, alias });
            }
        }
        Ok(Sampler {
            cfg,
            rng: StreamRng::new(cfg.seed, cfg.stream),
            tab,
            theta,
            rejection,
            attempts: 0,
            accepted: 0,
        })
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    pub fn sample(&mut self) -> Result<CycleType> {
        let ct = CycleType::from_lengths(&self.sample_lengths()?).expect("nonempty");
        ct.check_size(self.cfg.n);
        Ok(ct)
    }

    /// Cycle lengths in the order drawn. For the recursive method the first
    /// entry is the length of the cycle through a fixed element.
    pub fn sample_lengths(&mut self) -> Result<Vec<usize>> {
        match self.cfg.method {
            Method::Recursive => Ok(self.sample_recursive()),
            Method::Rejection => self.sample_rejection(),
        }
    }

    fn sample_recursive(&mut self) -> Vec<usize> {
        let tab = self.tab.expect("checked in new");
        let mut lengths = Vec::new();
        let mut r = self.cfg.n;
        while r > 0 {
            let rf = r as f64;
            let mut u = self.rng.uniform();
            let m = loop {
                // h_{r-m}/h_r = Π_{j=r-m+1}^{r} h_{j-1}/h_j
                let mut h_ratio = 1.0;
                let mut acc = 0.0;
                let mut pick = None;
                for m in 1..=r {
                    h_ratio *= tab.ratio(r - m + 1);
                    acc += self.theta[m] * h_ratio / rf;
                    if u < acc {
                        pick = Some(m);
                        break;
                    }
                }
                match pick {
                    Some(m) => break m,
                    // rounding left total mass `acc` slightly below one
                    None => u *= acc,
                }
            };
            lengths.push(m);
            r -= m;
        }
        lengths
    }

    fn sample_rejection(&mut self) -> Result<Vec<usize>> {
        let state = self.rejection.as_ref().expect("checked in new");
        let n = self.cfg.n;
        let mut lengths = Vec::new();
        for _ in 0..REJECTION_RETRY_CAP {
            self.attempts += 1;
            // Σ_m Z_m ~ Poisson(Σ λ_m), labels i.i.d. with P[m] ∝ λ_m.
            let count = self.rng.poisson(state.total_mean);
            lengths.clear();
            let mut total = 0usize;
            for _ in 0..count {
                let m = state.alias.sample(&mut self.rng) + 1;
                total += m;
                if total > n {
                    break;
                }
                lengths.push(m);
            }
            if total == n {
                self.accepted += 1;
                return Ok(lengths);
            }
        }
        Err(Error::Numeric(format!(
            "rejection sampler hit the retry cap of {REJECTION_RETRY_CAP} at n = {n}"
        )))
    }

    pub fn attempts(&self) -> u64 {
        self.attempts
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    /// `accepted / attempted` so far; `NaN` before the first attempt.
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.attempts as f64
    }
}

/// One draw with a fresh worker for `cfg`.
pub fn sample_cycle_type(cfg: &SamplerConfig, tab: Option<&NormalizationTable>) -> Result<CycleType> {
    Sampler::new(*cfg, tab)?.sample()
}

/// Acceptance rate of the rejection sampler over `accepted_draws` accepted samples.
pub fn acceptance_rate_estimate(cfg: &SamplerConfig, accepted_draws: usize) -> Result<f64> {
    if cfg.method != Method::Rejection {
        return Err(Error::InvalidArgument("acceptance rate is defined for the rejection method".into()));
    }
    let mut s = Sampler::new(*cfg, None)?;
    for _ in 0..accepted_draws {
        s.sample()?;
    }
    Ok(s.acceptance_rate())
}
