use super::mc::{map_indexed, run_chunks};
use super::output::{ExperimentOutput, Table};
use super::record::{Cell, ExperimentRecord, Provenance};
use super::stats::{covariance, ks_null_sd, ks_statistic, summarize, variance_ratio};
use super::{with_context, ExperimentConfig, Kind, DEFAULT_TABLE_LIMIT};
use crate::asymptotics::{erdos_turan_constants, hn_asymptotic, poisson_functional_centering, tv_rate_bound};
use crate::cycle_type::CycleType;
use crate::error::{Error, Result};
use crate::lattice::{dp_tv_with_denominator, PoissonSpec};
use crate::order::{order_stats, partial_orders};
use crate::partition::{enumerate_law, exact_order_law};
use crate::sampler::{Method, Sampler, SamplerConfig};
use crate::special::{ln_gamma, normal_cdf, MangoldtSieve};
use crate::weights::{ln_rational, reporting_gamma, NormalizationTable, WeightSequence};
use serde::Serialize;

/// Dispatches on `cfg.kind`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.kind {
        Kind::HnCheck => run_hn_check(cfg),
        Kind::TvTable => run_tv_table(cfg),
        Kind::Sample => run_sample(cfg),
        Kind::CltOrder => run_clt_order(cfg),
        Kind::Closeness => run_closeness(cfg),
        Kind::Fclt => run_fclt(cfg),
        Kind::OracleDump => run_oracle_dump(cfg),
        Kind::Table => run_table(cfg),
        Kind::Constants => run_constants(cfg),
    }
}

fn cell(cfg: &ExperimentConfig, n: usize, b: Option<usize>) -> Cell {
    let stochastic = cfg.kind.is_stochastic();
    Cell {
        kind: cfg.kind,
        weights: cfg.weights.label(),
        gamma: reporting_gamma(&cfg.weights),
        n,
        b,
        samples: stochastic.then_some(cfg.samples),
        seed: if stochastic { cfg.seed } else { None },
    }
}

fn output(kind: Kind, records: Vec<ExperimentRecord>, table: Option<Table>) -> ExperimentOutput {
    ExperimentOutput {
        kind,
        records,
        table,
        json: None,
    }
}

fn unit_gamma(cfg: &ExperimentConfig) -> Result<f64> {
    match cfg.weights.gamma() {
        Some(g) if g > 0.0 && g < 1.0 => Ok(g),
        _ => Err(Error::Unsupported(format!(
            "'{}' needs power weights with 0 < gamma < 1, got {}",
            cfg.kind,
            cfg.weights.label()
        ))),
    }
}

/// `log h_n` in closed form for the constant hooks.
fn constant_log_h(theta: f64, n: usize) -> f64 {
    ln_gamma(theta + n as f64) - ln_gamma(theta) - ln_gamma(n as f64 + 1.0)
}

/// Recurrence `log h_n` against the saddle-point asymptotic (power weights)
/// or the closed form (constant hooks).
pub fn run_hn_check(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let tab = NormalizationTable::build(cfg.weights, cfg.max_n(), 0)?;
    let mut table = Table::new(&[
        "weights",
        "gamma",
        "n",
        "log_h_n",
        "log_h_n_reference",
        "reference",
        "log_diff",
        "scaled_diff",
    ]);
    let mut records = Vec::new();
    for &n in &cfg.n_grid {
        let c = cell(cfg, n, None);
        let lh = tab.log_h(n);
        let (reference, prov, scale) = match cfg.weights {
            WeightSequence::Power { gamma } => {
                let a = hn_asymptotic(gamma, n).map_err(|e| with_context(e, cfg.kind, n))?;
                (a.log_value, Provenance::Asymptotic, (n as f64).powf(gamma / (1.0 + gamma)))
            }
            WeightSequence::Constant { theta } => (constant_log_h(theta, n), Provenance::Exact, 1.0),
        };
        let diff = lh - reference;
        records.push(c.record("log_h_n", lh, Provenance::Exact));
        records.push(c.record("log_h_n_reference", reference, prov));
        records.push(c.record("log_diff", diff, prov));
        records.push(c.record("scaled_diff", diff.abs() * scale, prov));
        table.push(vec![
            cfg.weights.label().into(),
            c.gamma.into(),
            n.into(),
            lh.into(),
            reference.into(),
            prov.name().to_string().into(),
            diff.into(),
            (diff.abs() * scale).into(),
        ]);
    }
    Ok(output(cfg.kind, records, Some(table)))
}

/// `log h_n` for `0..=max(n grid)`, with exact rationals up to `exact_upto`.
pub fn run_table(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let tab = NormalizationTable::build(cfg.weights, cfg.max_n(), cfg.exact_upto)?;
    let mut table = Table::new(&["n", "log_h_n", "h_n_exact"]);
    let mut records = Vec::new();
    for n in 0..=tab.max_n() {
        let exact = tab.exact_h(n);
        table.push(vec![n.into(), tab.log_h(n).into(), exact.map(|r| r.to_string()).into()]);
        let c = cell(cfg, n, None);
        match exact {
            Some(r) => records.push(c.record("log_h_n", ln_rational(r), Provenance::Exact)),
            None => records.push(c.record("log_h_n", tab.log_h(n), Provenance::Exact)),
        }
    }
    Ok(output(cfg.kind, records, Some(table)))
}

/// `d_b(n)` by the lattice DP next to the rate bound, one row per grid cell.
pub fn run_tv_table(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let tab = NormalizationTable::build(cfg.weights, cfg.max_n(), 0)?;
    let rows = map_indexed(cfg.n_grid.len(), cfg.workers, |i| -> Result<(usize, usize, f64, f64)> {
        let n = cfg.n_grid[i];
        let b = cfg.b_for(n)?.min(n);
        let spec = PoissonSpec::new(cfg.weights, n)?;
        let (d, p) = dp_tv_with_denominator(&spec, &tab, b).map_err(|e| with_context(e, cfg.kind, n))?;
        Ok((n, b, d, p))
    });
    let mut table = Table::new(&["gamma", "n", "b", "d_b_n", "bound_thm11", "p_T0n_eq_n"]);
    let mut records = Vec::new();
    for row in rows {
        let (n, b, d, p) = row?;
        let c = cell(cfg, n, Some(b));
        let bound = cfg.weights.gamma().map(|g| tv_rate_bound(g, n, b));
        records.push(c.record("d_b_n", d, Provenance::Dp));
        if let Some(v) = bound {
            records.push(c.record("bound_thm11", v, Provenance::Asymptotic));
        }
        records.push(c.record("p_T0n_eq_n", p, Provenance::Dp));
        table.push(vec![c.gamma.into(), n.into(), b.into(), d.into(), bound.into(), p.into()]);
    }
    Ok(output(cfg.kind, records, Some(table)))
}

/// Enumerated law of the cycle type with `log O` and `log Y` per class.
pub fn run_oracle_dump(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut table = Table::new(&["cycle_type", "probability", "log_order", "log_y"]);
    let mut records = Vec::new();
    for &n in &cfg.n_grid {
        let ctx = |e| with_context(e, cfg.kind, n);
        let law = enumerate_law(&cfg.weights, n).map_err(ctx)?;
        let orders = exact_order_law(&cfg.weights, n).map_err(ctx)?;
        let c = cell(cfg, n, None);
        let log_h = law.total_weight_exact.as_ref().map_or(law.total_weight.ln(), ln_rational);
        records.push(c.record("log_h_n", log_h, Provenance::Exact));
        records.push(c.record("classes", law.entries.len() as f64, Provenance::Exact));
        records.push(c.record("mean_log_order", orders.mean_log_order(), Provenance::Exact));
        records.push(c.record("mean_log_y", orders.mean_log_y(), Provenance::Exact));
        for e in &orders.entries {
            table.push(vec![
                e.cycle_type.to_string().into(),
                e.probability.into(),
                e.log_order.into(),
                e.log_y.into(),
            ]);
        }
    }
    Ok(output(cfg.kind, records, Some(table)))
}

/// Centering and scale constants of the log-order CLT, one object per `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsDump {
    pub gamma: f64,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "tildeG")]
    pub tilde_g: f64,
    #[serde(rename = "tildeH")]
    pub tilde_h: f64,
}

impl ConstantsDump {
    pub fn new(gamma: f64, n: usize) -> Result<ConstantsDump> {
        let c = erdos_turan_constants(gamma, n)?;
        let (tilde_g, tilde_h) = poisson_functional_centering(gamma, n)?;
        Ok(ConstantsDump {
            gamma,
            n,
            k: c.k,
            f: c.f,
            g: c.g,
            h: c.h,
            tilde_g,
            tilde_h,
        })
    }
}

/// JSON output is the bare constants object for a single `n` and an array otherwise.
pub fn run_constants(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let gamma = unit_gamma(cfg)?;
    let dumps: Vec<ConstantsDump> = cfg
        .n_grid
        .iter()
        .map(|&n| ConstantsDump::new(gamma, n).map_err(|e| with_context(e, cfg.kind, n)))
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    for d in &dumps {
        let c = cell(cfg, d.n, None);
        for (name, v) in [
            ("K", d.k),
            ("F", d.f),
            ("G", d.g),
            ("H", d.h),
            ("tildeG", d.tilde_g),
            ("tildeH", d.tilde_h),
        ] {
            records.push(c.record(name, v, Provenance::Asymptotic));
        }
    }
    let json = if dumps.len() == 1 {
        serde_json::to_value(dumps[0])?
    } else {
        serde_json::to_value(&dumps)?
    };
    Ok(ExperimentOutput {
        kind: cfg.kind,
        records,
        table: None,
        json: Some(json),
    })
}

/// Picks the sampler and builds the table it needs.
fn prepare_sampling(cfg: &ExperimentConfig) -> Result<(Method, Option<NormalizationTable>)> {
    let max_n = cfg.max_n();
    let method = cfg.method.unwrap_or(if max_n <= DEFAULT_TABLE_LIMIT {
        Method::Recursive
    } else {
        Method::Rejection
    });
    let tab = match method {
        Method::Recursive => Some(NormalizationTable::build(cfg.weights, max_n, 0)?),
        Method::Rejection => None,
    };
    Ok((method, tab))
}

/// Draws `cfg.samples` cycle types of size `n` and maps each through `f`.
fn sample_map<T, F>(
    cfg: &ExperimentConfig,
    method: Method,
    tab: Option<&NormalizationTable>,
    cell_index: usize,
    n: usize,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&CycleType) -> Result<T> + Sync,
{
    let seed = cfg.seed()?;
    run_chunks(cell_index, cfg.samples, cfg.chunk_size, cfg.workers, |stream, _, len| {
        let sc = SamplerConfig {
            weights: cfg.weights,
            n,
            method,
            seed,
            stream,
        };
        let mut s = Sampler::new(sc, tab)?;
        (0..len).map(|_| f(&s.sample()?)).collect()
    })
    .map_err(|e| with_context(e, cfg.kind, n))
}

fn mc_mean(c: &Cell, name: &str, xs: &[f64]) -> ExperimentRecord {
    let s = summarize(xs);
    c.monte_carlo(name, s.mean, s.std_error)
}

/// Raw samples: one row per draw with its stream and index within the stream.
pub fn run_sample(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let (method, tab) = prepare_sampling(cfg)?;
    let sieve = MangoldtSieve::new(cfg.max_n());
    let seed = cfg.seed()?;
    let mut table = Table::new(&["seed", "stream", "index", "cycle_type", "log_order", "log_y"]);
    let mut records = Vec::new();
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        let draws = run_chunks(i, cfg.samples, cfg.chunk_size, cfg.workers, |stream, _, len| {
            let sc = SamplerConfig {
                weights: cfg.weights,
                n,
                method,
                seed,
                stream,
            };
            let mut s = Sampler::new(sc, tab.as_ref())?;
            (0..len)
                .map(|j| {
                    let ct = s.sample()?;
                    let st = order_stats(&ct, &sieve)?;
                    Ok((stream, j, ct.to_string(), st.log_o, st.log_y))
                })
                .collect()
        })
        .map_err(|e| with_context(e, cfg.kind, n))?;
        let c = cell(cfg, n, None);
        let lo: Vec<f64> = draws.iter().map(|d| d.3).collect();
        let ly: Vec<f64> = draws.iter().map(|d| d.4).collect();
        records.push(mc_mean(&c, "mean_log_order", &lo));
        records.push(mc_mean(&c, "mean_log_y", &ly));
        for (stream, j, ct, log_o, log_y) in draws {
            table.push(vec![seed.into(), stream.into(), j.into(), ct.into(), log_o.into(), log_y.into()]);
        }
    }
    Ok(output(cfg.kind, records, Some(table)))
}

/// `log n · log log n`, the threshold for `Δ_n`.
pub(crate) fn delta_threshold(n: usize) -> f64 {
    let l = (n as f64).ln();
    l * l.ln()
}

fn check_loglog(cfg: &ExperimentConfig) -> Result<()> {
    if let Some(&n) = cfg.n_grid.iter().find(|&&n| n < 3) {
        return Err(Error::Config(format!(
            "'{}' needs every n >= 3 so that log log n > 0, got n = {n}",
            cfg.kind
        )));
    }
    Ok(())
}

fn delta_records(c: &Cell, n: usize, deltas: &[f64]) -> Vec<ExperimentRecord> {
    let thr = delta_threshold(n);
    let hits: Vec<f64> = deltas.iter().map(|&d| if d >= thr { 1.0 } else { 0.0 }).collect();
    vec![
        c.record("delta_threshold", thr, Provenance::Exact),
        mc_mean(c, "p_delta_ge_threshold", &hits),
        mc_mean(c, "mean_delta", deltas),
    ]
}

/// Standardized `(log O_n - G(n))/√F(n)` against `N(0,1)`, plus the
/// frequency of `Δ_n ≥ log n log log n`.
pub fn run_clt_order(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let gamma = unit_gamma(cfg)?;
    check_loglog(cfg)?;
    if cfg.samples < 1000 {
        return Err(Error::Config(format!("'clt-order' needs at least 1000 samples, got {}", cfg.samples)));
    }
    let (method, tab) = prepare_sampling(cfg)?;
    let sieve = MangoldtSieve::new(cfg.max_n());
    let mut records = Vec::new();
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        let k = erdos_turan_constants(gamma, n)?;
        let sd = k.f.sqrt();
        let draws = sample_map(cfg, method, tab.as_ref(), i, n, |ct| {
            let st = order_stats(ct, &sieve)?;
            Ok(((st.log_o - k.g) / sd, (st.log_y - k.g) / sd, st.delta))
        })?;
        let z: Vec<f64> = draws.iter().map(|d| d.0).collect();
        let zy: Vec<f64> = draws.iter().map(|d| d.1).collect();
        let deltas: Vec<f64> = draws.iter().map(|d| d.2).collect();
        let c = cell(cfg, n, None);
        let s = summarize(&z);
        records.push(c.record("G", k.g, Provenance::Asymptotic));
        records.push(c.record("F", k.f, Provenance::Asymptotic));
        records.push(c.monte_carlo(
            "ks_standard_normal",
            ks_statistic(&z, normal_cdf),
            ks_null_sd() / (z.len() as f64).sqrt(),
        ));
        records.push(c.monte_carlo("mean_standardized", s.mean, s.std_error));
        records.push(c.monte_carlo("var_standardized", s.variance, s.variance_std_error));
        // the same standardization applied to log Y, for comparison
        let sy = summarize(&zy);
        records.push(c.monte_carlo(
            "ks_standard_normal_log_y",
            ks_statistic(&zy, normal_cdf),
            ks_null_sd() / (zy.len() as f64).sqrt(),
        ));
        records.push(c.monte_carlo("mean_standardized_log_y", sy.mean, sy.std_error));
        records.push(c.monte_carlo("var_standardized_log_y", sy.variance, sy.variance_std_error));
        records.extend(delta_records(&c, n, &deltas));
    }
    Ok(output(cfg.kind, records, None))
}

/// `Δ_n = log Y_n - log O_n` and `log O_n`, `log Y_n` sample means.
pub fn run_closeness(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    check_loglog(cfg)?;
    let (method, tab) = prepare_sampling(cfg)?;
    let sieve = MangoldtSieve::new(cfg.max_n());
    let mut records = Vec::new();
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        let draws = sample_map(cfg, method, tab.as_ref(), i, n, |ct| {
            let st = order_stats(ct, &sieve)?;
            Ok((st.log_o, st.log_y, st.delta))
        })?;
        let c = cell(cfg, n, None);
        let lo: Vec<f64> = draws.iter().map(|d| d.0).collect();
        let ly: Vec<f64> = draws.iter().map(|d| d.1).collect();
        let deltas: Vec<f64> = draws.iter().map(|d| d.2).collect();
        records.push(mc_mean(&c, "mean_log_order", &lo));
        records.push(mc_mean(&c, "mean_log_y", &ly));
        records.extend(delta_records(&c, n, &deltas));
    }
    Ok(output(cfg.kind, records, None))
}

/// `x* = ⌊x n^{γ/(1+γ)}⌋`.
pub fn fclt_cutoff(gamma: f64, n: usize, x: f64) -> usize {
    (x * (n as f64).powf(gamma / (1.0 + gamma)) * (1.0 + 1e-12)).floor() as usize
}

/// `(centering, scale)` of `B_n(x)`: `x^γ log n n^{γ²/(1+γ)}/(1+γ)` and
/// `√(γ/(1+γ)² log² n n^{γ²/(1+γ)})`.
pub fn fclt_normalization(gamma: f64, n: usize, x: f64) -> (f64, f64) {
    let nf = n as f64;
    let ln = nf.ln();
    let np = nf.powf(gamma * gamma / (1.0 + gamma));
    let centre = x.powf(gamma) * ln * np / (1.0 + gamma);
    let scale = (gamma / (1.0 + gamma).powi(2) * ln * ln * np).sqrt();
    (centre, scale)
}

/// The rescaled partial-order process `B_n(x)` over the x grid.
pub fn run_fclt(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let gamma = unit_gamma(cfg)?;
    let (method, tab) = prepare_sampling(cfg)?;
    let sieve = MangoldtSieve::new(cfg.max_n());
    let xs = &cfg.x_grid;
    let mut records = Vec::new();
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        let cutoffs: Vec<usize> = xs.iter().map(|&x| fclt_cutoff(gamma, n, x)).collect();
        if let Some(j) = cutoffs.iter().position(|&c| c == 0) {
            return Err(Error::Config(format!(
                "fclt at n = {n}: cutoff for x = {} is 0; use larger x or n",
                xs[j]
            )));
        }
        let norms: Vec<(f64, f64)> = xs.iter().map(|&x| fclt_normalization(gamma, n, x)).collect();
        let draws = sample_map(cfg, method, tab.as_ref(), i, n, |ct| {
            let po = partial_orders(ct, &sieve, &cutoffs)?;
            Ok(po.iter().zip(&norms).map(|(p, (c, s))| (p - c) / s).collect::<Vec<f64>>())
        })?;
        let cols: Vec<Vec<f64>> = (0..xs.len()).map(|j| draws.iter().map(|d| d[j]).collect()).collect();
        let c = cell(cfg, n, None);
        for (j, &x) in xs.iter().enumerate() {
            let s = summarize(&cols[j]);
            let sd = x.powf(gamma / 2.0);
            records.push(c.record_at("cutoff", x, cutoffs[j] as f64, Provenance::Exact));
            records.push(c.monte_carlo_at("mean_B", x, s.mean, s.std_error));
            records.push(c.monte_carlo_at("var_B", x, s.variance, s.variance_std_error));
            records.push(c.monte_carlo_at(
                "ks_brownian_marginal",
                x,
                ks_statistic(&cols[j], |v| normal_cdf(v / sd)),
                ks_null_sd() / (cols[j].len() as f64).sqrt(),
            ));
        }
        for j in 0..xs.len() {
            for k in j..xs.len() {
                let (v, se) = covariance(&cols[j], &cols[k]);
                records.push(c.monte_carlo(&format!("cov_B({},{})", xs[j], xs[k]), v, se));
            }
        }
        for j in 1..xs.len() {
            let (r, se) = variance_ratio(&cols[0], &cols[j]);
            records.push(c.monte_carlo_at(&format!("var_ratio_to_x{}", xs[0]), xs[j], r, se));
            let inc: Vec<f64> = cols[j].iter().zip(&cols[j - 1]).map(|(a, b)| a - b).collect();
            let (v, se) = covariance(&cols[j - 1], &inc);
            records.push(c.monte_carlo_at(&format!("cov_increment_from_x{}", xs[j - 1]), xs[j], v, se));
        }
    }
    Ok(output(cfg.kind, records, None))
}
