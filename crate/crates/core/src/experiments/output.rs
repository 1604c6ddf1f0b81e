use super::record::ExperimentRecord;
use super::{ExperimentConfig, Format, Kind};
use crate::error::Result;
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v}"),
            Value::Text(s) => f.write_str(s),
            Value::Empty => Ok(()),
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Value {
        Value::Int(v as u64)
    }
}
impl From<u64> for Value {
    fn from(v: u64) -> Value {
        Value::Int(v)
    }
}
impl From<f64> for Value {
    fn from(v: f64) -> Value {
        Value::Float(v)
    }
}
impl From<String> for Value {
    fn from(v: String) -> Value {
        Value::Text(v)
    }
}
impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Value {
        v.map_or(Value::Empty, Into::into)
    }
}

/// A kind-specific CSV table; `schema_version` is prepended on output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Table {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "schema_version,{}", self.columns.join(","))?;
        for row in &self.rows {
            write!(out, "{}", crate::SCHEMA_VERSION)?;
            for v in row {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub kind: Kind,
    pub records: Vec<ExperimentRecord>,
    /// Present for the table-shaped kinds; it replaces the record rows in CSV output.
    pub table: Option<Table>,
    /// Replaces the whole JSON document (the constants dump).
    pub json: Option<serde_json::Value>,
}

impl ExperimentOutput {
    pub fn records_named<'a>(&'a self, statistic: &'a str) -> impl Iterator<Item = &'a ExperimentRecord> + 'a {
        self.records.iter().filter(move |r| r.statistic() == statistic)
    }
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at_unix: Option<u64>,
    kind: Kind,
    records: &'a [ExperimentRecord],
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<&'a Table>,
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// CSV gets a `# generated_at_unix=` first line and JSON a
/// `generated_at_unix` field unless `cfg.deterministic` is set.
pub fn write_output<W: Write>(output: &ExperimentOutput, cfg: &ExperimentConfig, mut out: W) -> Result<()> {
    let stamp = (!cfg.deterministic).then(unix_now);
    match cfg.format {
        Format::Csv => {
            if let Some(t) = stamp {
                writeln!(out, "# generated_at_unix={t}")?;
            }
            match &output.table {
                Some(table) => table.write_csv(&mut out)?,
                None => {
                    writeln!(out, "{}", ExperimentRecord::CSV_HEADER)?;
                    for r in &output.records {
                        writeln!(out, "{}", r.csv_row())?;
                    }
                }
            }
        }
        Format::Json => {
            match &output.json {
                Some(v) => serde_json::to_writer_pretty(&mut out, v)?,
                None => serde_json::to_writer_pretty(
                    &mut out,
                    &JsonDoc {
                        schema_version: crate::SCHEMA_VERSION,
                        generated_at_unix: stamp,
                        kind: output.kind,
                        records: &output.records,
                        table: output.table.as_ref(),
                    },
                )?,
            }
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}
