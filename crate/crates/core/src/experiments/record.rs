use super::Kind;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    Dp,
    Asymptotic,
    MonteCarlo,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Exact => "exact",
            Provenance::Dp => "dp",
            Provenance::Asymptotic => "asymptotic",
            Provenance::MonteCarlo => "monte-carlo",
        }
    }
}

/// One output row. The standard error is set exactly when the provenance is
/// Monte Carlo; the constructors are the only way to build a record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    kind: Kind,
    weights: String,
    gamma: f64,
    n: usize,
    b: Option<usize>,
    x: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
    statistic: String,
    #[serde(serialize_with = "finite_or_null")]
    value: f64,
    std_error: Option<f64>,
    provenance: Provenance,
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

/// The config echo shared by every record of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Cell {
    pub kind: Kind,
    pub weights: String,
    pub gamma: f64,
    pub n: usize,
    pub b: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl Cell {
    fn base(&self, statistic: &str, value: f64, x: Option<f64>, se: Option<f64>, p: Provenance) -> ExperimentRecord {
        ExperimentRecord {
            kind: self.kind,
            weights: self.weights.clone(),
            gamma: self.gamma,
            n: self.n,
            b: self.b,
            x,
            samples: self.samples,
            seed: self.seed,
            statistic: statistic.to_string(),
            value,
            std_error: se,
            provenance: p,
        }
    }

    /// A deterministic value; panics on `MonteCarlo`.
    pub fn record(&self, statistic: &str, value: f64, p: Provenance) -> ExperimentRecord {
        assert_ne!(p, Provenance::MonteCarlo, "Monte Carlo records need a standard error");
        self.base(statistic, value, None, None, p)
    }

    pub fn record_at(&self, statistic: &str, x: f64, value: f64, p: Provenance) -> ExperimentRecord {
        assert_ne!(p, Provenance::MonteCarlo, "Monte Carlo records need a standard error");
        self.base(statistic, value, Some(x), None, p)
    }

    pub fn monte_carlo(&self, statistic: &str, value: f64, std_error: f64) -> ExperimentRecord {
        self.base(statistic, value, None, Some(std_error), Provenance::MonteCarlo)
    }

    pub fn monte_carlo_at(&self, statistic: &str, x: f64, value: f64, std_error: f64) -> ExperimentRecord {
        self.base(statistic, value, Some(x), Some(std_error), Provenance::MonteCarlo)
    }
}

impl ExperimentRecord {
    pub const CSV_HEADER: &'static str =
        "schema_version,kind,weights,gamma,n,b,x,samples,seed,statistic,value,std_error,provenance";

    pub fn kind(&self) -> Kind {
        self.kind
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn b(&self) -> Option<usize> {
        self.b
    }
    pub fn x(&self) -> Option<f64> {
        self.x
    }
    pub fn samples(&self) -> Option<usize> {
        self.samples
    }
    pub fn statistic(&self) -> &str {
        &self.statistic
    }
    pub fn value(&self) -> f64 {
        self.value
    }
    pub fn std_error(&self) -> Option<f64> {
        self.std_error
    }
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            crate::SCHEMA_VERSION,
            self.kind,
            self.weights,
            self.gamma,
            self.n,
            opt(self.b.map(|v| v.to_string())),
            opt(self.x.map(|v| v.to_string())),
            opt(self.samples.map(|v| v.to_string())),
            opt(self.seed.map(|v| v.to_string())),
            self.statistic,
            self.value,
            opt(self.std_error.map(|v| v.to_string())),
            self.provenance.name()
        )
    }
}
