//! Experiment reports and their CSV/JSON serialization.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::Serialize;
use serde_json::{Map, Number, Value};
use tempfile::NamedTempFile;

use crate::error::{LabError, Result};

/// A single table entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Real(f64),
    Bool(bool),
    Text(String),
    Null,
}

impl Cell {
    /// Exact when it fits in `u64`, rounded otherwise.
    pub fn from_u128(v: u128) -> Cell {
        u64::try_from(v).map_or(Cell::Real(v as f64), Cell::UInt)
    }

    /// `Null` for non-finite values.
    pub fn real_or_null(v: f64) -> Cell {
        if v.is_finite() {
            Cell::Real(v)
        } else {
            Cell::Null
        }
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// `v` with 17 significant digits: positional notation for moderate
/// magnitudes, scientific otherwise. Non-finite values become `NaN`, `inf`, `-inf`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{v:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, v)
    } else {
        sci
    }
}

impl Cell {
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::UInt(v) => Value::from(*v),
            Cell::Real(v) => real_json(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Null => Value::Null,
        }
    }
}

/// JSON number with 17 significant digits; `null` for non-finite values.
pub fn real_json(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&format_real(v)).expect("valid JSON number"))
}

/// Rows and summary produced by one experiment run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl ExperimentOutput {
    pub fn new(columns: &[&str]) -> Self {
        ExperimentOutput {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_owned(), value.into()));
    }

    pub fn summary_value(&self, key: &str) -> Option<&Cell> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl FromStr for OutputFormat {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            _ => Err(LabError::param("format", format!("expected csv, json or both, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    /// Validated parameters in declaration order.
    pub params: Vec<(String, Cell)>,
    pub seed: u64,
    pub version: String,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    pub output: ExperimentOutput,
}

impl ExperimentReport {
    pub fn csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.output.columns)?;
        for row in &self.output.rows {
            w.write_record(row.iter().map(Cell::to_csv))?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    /// The report as JSON: `{experiment, params, seed, version, rows, summary}`.
    pub fn json_value(&self) -> Value {
        let mut top = Map::new();
        top.insert("experiment".into(), Value::String(self.experiment.clone()));
        top.insert(
            "params".into(),
            Value::Object(self.params.iter().map(|(k, v)| (k.clone(), v.to_json())).collect()),
        );
        top.insert("seed".into(), Value::from(self.seed));
        top.insert("version".into(), Value::String(self.version.clone()));
        let rows = self
            .output
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.output
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.to_json()))
                        .collect(),
                )
            })
            .collect();
        top.insert("rows".into(), Value::Array(rows));
        top.insert(
            "summary".into(),
            Value::Object(self.output.summary.iter().map(|(k, v)| (k.clone(), v.to_json())).collect()),
        );
        Value::Object(top)
    }

    pub fn json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.json_value())?;
        s.push('\n');
        Ok(s)
    }

    fn timing_string(&self) -> Result<String> {
        let mut m = BTreeMap::new();
        m.insert("started_at", Value::String(self.started_at.to_rfc3339()));
        m.insert("finished_at", Value::String(self.finished_at.to_rfc3339()));
        let elapsed = (self.finished_at - self.started_at).num_microseconds().unwrap_or(0) as f64 / 1e6;
        m.insert("elapsed_seconds", real_json(elapsed));
        let mut s = serde_json::to_string_pretty(&m)?;
        s.push('\n');
        Ok(s)
    }

    /// Write `<dir>/<experiment>.{csv,json}` and the timing sidecar
    /// `<dir>/<experiment>.timing.json`, each atomically. Returns the data files.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
            let path = dir.join(format!("{}.csv", self.experiment));
            write_atomic(&path, self.csv_string()?.as_bytes())?;
            written.push(path);
        }
        if matches!(format, OutputFormat::Json | OutputFormat::Both) {
            let path = dir.join(format!("{}.json", self.experiment));
            write_atomic(&path, self.json_string()?.as_bytes())?;
            written.push(path);
        }
        write_atomic(
            &dir.join(format!("{}.timing.json", self.experiment)),
            self.timing_string()?.as_bytes(),
        )?;
        Ok(written)
    }
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| LabError::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(1.0), "1.0000000000000000");
        assert_eq!(format_real(2.0), "2.0000000000000000");
        assert_eq!(format_real(-0.25), "-0.25000000000000000");
        assert_eq!(format_real(123.5), "123.50000000000000");
        assert_eq!(format_real(0.0), "0.0");
        assert_eq!(format_real(1e-7), "9.9999999999999995e-8");
        assert_eq!(format_real(f64::NAN), "NaN");
        for v in [std::f64::consts::PI, 1.0 / 3.0, 6.02e23, -1e-300, 0.1, 99999.99999] {
            assert_eq!(format_real(v).parse::<f64>().unwrap(), v);
            let digits: String = format_real(v)
                .split('e')
                .next()
                .unwrap()
                .chars()
                .filter(|c| c.is_ascii_digit())
                .collect();
            assert_eq!(digits.trim_start_matches('0').len(), 17, "{v}");
        }
    }

    #[test]
    fn json_numbers_keep_digits() {
        let v = real_json(0.1);
        assert_eq!(serde_json::to_string(&v).unwrap(), "0.10000000000000001");
        assert_eq!(real_json(f64::INFINITY), Value::Null);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
