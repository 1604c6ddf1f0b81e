//! Configuration-driven experiment runner behind the `permlab` CLI.
//!
//! A config names one [`Kind`], a weight sequence, an `n` grid and the
//! sampling parameters; [`run`] turns it into typed [`ExperimentRecord`]s
//! plus, for the table-shaped kinds, a kind-specific CSV table.

pub mod grid;
mod mc;
mod output;
mod record;
mod runners;
pub mod stats;

use crate::error::{Error, Result};
use crate::sampler::Method;
use crate::weights::WeightSequence;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub use grid::{parse_n_grid, parse_x_grid, BRule, BSpec};
pub use output::{write_output, ExperimentOutput, Table, Value};
pub use record::{ExperimentRecord, Provenance};
pub use runners::{
    run, run_closeness, run_clt_order, run_constants, run_fclt, run_hn_check, run_oracle_dump, run_sample,
    run_table, run_tv_table, ConstantsDump,
};

/// Samples per Monte Carlo chunk; each chunk owns one RNG stream.
pub const DEFAULT_CHUNK_SIZE: usize = 1000;
/// Largest `n` for which the O(n²) normalization table is built by default.
pub const DEFAULT_TABLE_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    HnCheck,
    TvTable,
    Sample,
    CltOrder,
    Closeness,
    Fclt,
    OracleDump,
    /// `log h_n` table export.
    Table,
    /// Centering and scale constants of the log-order CLT.
    Constants,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::HnCheck,
        Kind::TvTable,
        Kind::Sample,
        Kind::CltOrder,
        Kind::Closeness,
        Kind::Fclt,
        Kind::OracleDump,
        Kind::Table,
        Kind::Constants,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::HnCheck => "hn-check",
            Kind::TvTable => "tv-table",
            Kind::Sample => "sample",
            Kind::CltOrder => "clt-order",
            Kind::Closeness => "closeness",
            Kind::Fclt => "fclt",
            Kind::OracleDump => "oracle-dump",
            Kind::Table => "table",
            Kind::Constants => "constants",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Kind::Sample | Kind::CltOrder | Kind::Closeness | Kind::Fclt)
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format '{s}' (csv | json)"))),
        }
    }
}

/// `power` (θ_m = m^γ, the default), `uniform` (θ ≡ 1) or `ewens:<θ>`.
pub fn parse_weights(spec: &str, gamma: Option<f64>) -> Result<WeightSequence> {
    match spec {
        "power" => {
            let g = gamma.ok_or_else(|| Error::Config("--gamma is required for power weights".into()))?;
            WeightSequence::power(g)
        }
        "uniform" => Ok(WeightSequence::uniform()),
        _ => match spec.strip_prefix("ewens:") {
            Some(t) => {
                let theta: f64 = t.parse().map_err(|_| Error::Config(format!("bad Ewens parameter '{t}'")))?;
                WeightSequence::ewens(theta)
            }
            None => Err(Error::Config(format!(
                "unknown weights '{spec}' (power | uniform | ewens:<theta>)"
            ))),
        },
    }
}

/// Either a bare integer or a grid string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NValue {
    Int(usize),
    List(Vec<usize>),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XValue {
    List(Vec<f64>),
    Text(String),
}

/// Unvalidated settings, as read from a JSON config file or the command line.
/// Field names match the long CLI flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RawConfig {
    pub kind: Option<Kind>,
    pub gamma: Option<f64>,
    pub weights: Option<String>,
    pub n: Option<NValue>,
    pub b: Option<usize>,
    pub b_rule: Option<String>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub deterministic: Option<bool>,
    pub workers: Option<usize>,
    pub x: Option<XValue>,
    pub method: Option<String>,
    pub chunk_size: Option<usize>,
    pub exact_upto: Option<usize>,
}

impl RawConfig {
    pub fn from_json_file(path: &Path) -> Result<RawConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: RawConfig) -> RawConfig {
        RawConfig {
            kind: over.kind.or(self.kind),
            gamma: over.gamma.or(self.gamma),
            weights: over.weights.or(self.weights),
            n: over.n.or(self.n),
            b: over.b.or(self.b),
            b_rule: over.b_rule.or(self.b_rule),
            samples: over.samples.or(self.samples),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            deterministic: over.deterministic.or(self.deterministic),
            workers: over.workers.or(self.workers),
            x: over.x.or(self.x),
            method: over.method.or(self.method),
            chunk_size: over.chunk_size.or(self.chunk_size),
            exact_upto: over.exact_upto.or(self.exact_upto),
        }
    }

    pub fn validate(self) -> Result<ExperimentConfig> {
        let kind = self.kind.ok_or_else(|| Error::Config("experiment kind missing".into()))?;
        let weights = parse_weights(self.weights.as_deref().unwrap_or("power"), self.gamma)?;
        let n_grid = match self.n {
            None => return Err(Error::Config("--n is required".into())),
            Some(NValue::Int(n)) => parse_n_grid(&n.to_string())?,
            Some(NValue::List(v)) => parse_n_grid(&v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","))?,
            Some(NValue::Text(s)) => parse_n_grid(&s)?,
        };
        let b = match (self.b, self.b_rule) {
            (Some(_), Some(_)) => return Err(Error::Config("give either --b or --b-rule, not both".into())),
            (Some(b), None) => Some(BSpec::Fixed(b)),
            (None, Some(r)) => Some(BSpec::Rule(BRule::parse(&r)?)),
            (None, None) => None,
        };
        let samples = self.samples.unwrap_or(1);
        if samples == 0 {
            return Err(Error::Config("--samples must be at least 1".into()));
        }
        if kind.is_stochastic() && self.seed.is_none() {
            return Err(Error::Config(format!("--seed is required for '{kind}'")));
        }
        let x_grid = match self.x {
            None => vec![1.0, 2.0],
            Some(XValue::List(v)) => parse_x_grid(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))?,
            Some(XValue::Text(s)) => parse_x_grid(&s)?,
        };
        let method = self.method.as_deref().map(str::parse::<Method>).transpose()?;
        let chunk_size = self.chunk_size.unwrap_or(DEFAULT_CHUNK_SIZE);
        if chunk_size == 0 {
            return Err(Error::Config("--chunk-size must be at least 1".into()));
        }
        let workers = match self.workers {
            Some(0) => return Err(Error::Config("--workers must be at least 1".into())),
            Some(w) => w,
            None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        };
        Ok(ExperimentConfig {
            kind,
            weights,
            n_grid,
            b,
            samples,
            seed: self.seed,
            out: self.out,
            format: self.format.unwrap_or_default(),
            deterministic: self.deterministic.unwrap_or(false),
            workers,
            x_grid,
            method,
            chunk_size,
            exact_upto: self.exact_upto.unwrap_or(0),
        })
    }
}

/// A validated experiment. `workers` only affects wall time, never output.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub weights: WeightSequence,
    pub n_grid: Vec<usize>,
    pub b: Option<BSpec>,
    pub samples: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub deterministic: bool,
    pub workers: usize,
    pub x_grid: Vec<f64>,
    pub method: Option<Method>,
    pub chunk_size: usize,
    pub exact_upto: usize,
}

impl ExperimentConfig {
    /// Defaults for `kind` with power weights at `gamma` over `n_grid`.
    pub fn new(kind: Kind, gamma: f64, n_grid: Vec<usize>) -> Result<ExperimentConfig> {
        RawConfig {
            kind: Some(kind),
            gamma: Some(gamma),
            n: Some(NValue::List(n_grid)),
            seed: kind.is_stochastic().then_some(0),
            ..RawConfig::default()
        }
        .validate()
    }

    pub fn max_n(&self) -> usize {
        self.n_grid.iter().copied().max().unwrap_or(0)
    }

    pub(crate) fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config(format!("--seed is required for '{}'", self.kind)))
    }

    pub(crate) fn b_for(&self, n: usize) -> Result<usize> {
        self.b
            .map(|b| b.eval(n))
            .ok_or_else(|| Error::Config(format!("'{}' needs --b or --b-rule", self.kind)))
    }
}

/// Prefixes string-carrying errors with the kind and grid cell.
pub(crate) fn with_context(e: Error, kind: Kind, n: usize) -> Error {
    let ctx = |m: String| format!("{kind} at n = {n}: {m}");
    match e {
        Error::InvalidArgument(m) => Error::InvalidArgument(ctx(m)),
        Error::Unsupported(m) => Error::Unsupported(ctx(m)),
        Error::Numeric(m) => Error::Numeric(ctx(m)),
        Error::Config(m) => Error::Config(ctx(m)),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(kind: Kind) -> RawConfig {
        RawConfig {
            kind: Some(kind),
            gamma: Some(0.5),
            n: Some(NValue::Text("10:40:2".into())),
            ..RawConfig::default()
        }
    }

    #[test]
    fn validation() {
        let cfg = raw(Kind::TvTable).validate().unwrap();
        assert_eq!(cfg.n_grid, vec![10, 20, 40]);
        assert_eq!(cfg.samples, 1);
        assert_eq!(cfg.x_grid, vec![1.0, 2.0]);
        assert!(matches!(raw(Kind::Sample).validate(), Err(Error::Config(_))));
        let mut r = raw(Kind::Fclt);
        r.seed = Some(3);
        r.samples = Some(0);
        assert!(matches!(r.validate(), Err(Error::Config(_))));
        let mut r = raw(Kind::TvTable);
        r.b = Some(2);
        r.b_rule = Some("n^0.5".into());
        assert!(r.validate().is_err());
        let mut r = raw(Kind::TvTable);
        r.gamma = None;
        assert!(r.clone().validate().is_err());
        r.weights = Some("uniform".into());
        assert_eq!(r.validate().unwrap().weights, WeightSequence::uniform());
        let mut r = raw(Kind::TvTable);
        r.gamma = Some(-1.0);
        assert!(matches!(r.validate(), Err(Error::InvalidGamma(_))));
    }

    #[test]
    fn json_config_and_override() {
        let file: RawConfig = serde_json::from_str(
            r#"{"kind":"clt-order","gamma":0.5,"n":[1000,10000],"samples":100,"seed":9,"format":"json","x":"1,2,4"}"#,
        )
        .unwrap();
        let cli = RawConfig {
            samples: Some(50),
            n: Some(NValue::Int(500)),
            ..RawConfig::default()
        };
        let cfg = file.merge(cli).validate().unwrap();
        assert_eq!(cfg.kind, Kind::CltOrder);
        assert_eq!(cfg.samples, 50);
        assert_eq!(cfg.n_grid, vec![500]);
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.x_grid, vec![1.0, 2.0, 4.0]);
        assert!(serde_json::from_str::<RawConfig>(r#"{"kind":"sample","bogus":1}"#).is_err());
    }

    #[test]
    fn kinds_round_trip() {
        for k in Kind::ALL {
            assert_eq!(k.name().parse::<Kind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!("nope".parse::<Kind>().is_err());
    }
}
