//! Browser bindings for the `www/` demo page.
//!
//! Each export has a plain Rust twin returning `permlab::Result` so the
//! numerics can be tested natively.

use permlab::asymptotics::erdos_turan_constants;
use permlab::lattice::{dp_tv_distance, PoissonSpec};
use permlab::order::order_stats;
use permlab::sampler::{Method, Sampler, SamplerConfig};
use permlab::special::MangoldtSieve;
use permlab::weights::{NormalizationTable, WeightSequence};
use permlab::{Error, Result};
use wasm_bindgen::prelude::*;

/// Interactive size limits; the page stays responsive below these.
pub const MAX_LAW_N: usize = 20_000;
pub const MAX_TV_N: usize = 2_000;
pub const MAX_SAMPLE_N: usize = 20_000;
pub const MAX_SAMPLES: usize = 20_000;

fn check(what: &'static str, value: usize, max: usize) -> Result<()> {
    if value == 0 || value > max {
        return Err(Error::InvalidArgument(format!("{what} must be in 1..={max}, got {value}")));
    }
    Ok(())
}

/// `P[L = m]` for `m = 1..=n`, `L` the length of the cycle through 1.
pub fn first_cycle_law(gamma: f64, n: usize) -> Result<Vec<f64>> {
    check("n", n, MAX_LAW_N)?;
    let tab = NormalizationTable::build(WeightSequence::power(gamma)?, n, 0)?;
    let mut p = tab.first_cycle_length_law(n)?;
    p.remove(0);
    Ok(p)
}

/// `d_b(n)` for `b = 0..=b_max`.
pub fn tv_profile(gamma: f64, n: usize, b_max: usize) -> Result<Vec<f64>> {
    check("n", n, MAX_TV_N)?;
    let w = WeightSequence::power(gamma)?;
    let tab = NormalizationTable::build(w, n, 0)?;
    let spec = PoissonSpec::new(w, n)?;
    (0..=b_max.min(n)).map(|b| dp_tv_distance(&spec, &tab, b)).collect()
}

/// `log O` for `samples` recursive draws, seeded by `seed`.
pub fn log_order_draws(gamma: f64, n: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    check("n", n, MAX_SAMPLE_N)?;
    check("samples", samples, MAX_SAMPLES)?;
    let cfg = SamplerConfig::new(gamma, n, Method::Recursive, seed, 0)?;
    let tab = NormalizationTable::build(cfg.weights, n, 0)?;
    let sieve = MangoldtSieve::new(n);
    let mut s = Sampler::new(cfg, Some(&tab))?;
    (0..samples).map(|_| Ok(order_stats(&s.sample()?, &sieve)?.log_o)).collect()
}

/// `[G(n), F(n)]`, the log-order centering and variance scale (`0 < γ < 1`).
pub fn clt_scale(gamma: f64, n: usize) -> Result<Vec<f64>> {
    let c = erdos_turan_constants(gamma, n)?;
    Ok(vec![c.g, c.f])
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = firstCycleLaw)]
pub fn first_cycle_law_js(gamma: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(first_cycle_law(gamma, n))
}

#[wasm_bindgen(js_name = tvProfile)]
pub fn tv_profile_js(gamma: f64, n: usize, b_max: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(tv_profile(gamma, n, b_max))
}

#[wasm_bindgen(js_name = logOrderDraws)]
pub fn log_order_draws_js(gamma: f64, n: usize, samples: usize, seed: u32) -> std::result::Result<Vec<f64>, JsError> {
    js(log_order_draws(gamma, n, samples, seed as u64))
}

#[wasm_bindgen(js_name = cltScale)]
pub fn clt_scale_js(gamma: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(clt_scale(gamma, n))
}
