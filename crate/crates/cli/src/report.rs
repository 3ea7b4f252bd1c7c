//! Experiment reports: tolerance checks, the JSON summary and CSV tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::RunError;

/// How a check compares `value` against `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|value − target| ≤ tolerance`.
    Absolute,
    /// `|value − target| ≤ tolerance·|target|`.
    Relative,
    /// `value ≤ target`.
    AtMost,
    /// `value ≥ target`.
    AtLeast,
    /// `value` is 1 (true) or 0 (false).
    Flag,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Acceptance criterion this check belongs to, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u32>,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Diagnostics are reported but do not count towards the overall verdict.
    pub diagnostic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn make(name: &str, value: f64, target: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = match comparison {
            Comparison::Absolute => (value - target).abs() <= tolerance,
            Comparison::Relative => (value - target).abs() <= tolerance * target.abs(),
            Comparison::AtMost => value <= target,
            Comparison::AtLeast => value >= target,
            Comparison::Flag => value == 1.0,
        };
        Self {
            name: name.to_string(),
            criterion: None,
            value,
            target,
            tolerance,
            comparison,
            pass,
            diagnostic: false,
            note: None,
        }
    }

    pub fn absolute(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Self::make(name, value, target, tolerance, Comparison::Absolute)
    }

    pub fn relative(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Self::make(name, value, target, tolerance, Comparison::Relative)
    }

    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self::make(name, value, bound, 0.0, Comparison::AtMost)
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self::make(name, value, bound, 0.0, Comparison::AtLeast)
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Self::make(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0, Comparison::Flag)
    }

    pub fn criterion(mut self, n: u32) -> Self {
        self.criterion = Some(n);
        self
    }

    pub fn diagnostic(mut self) -> Self {
        self.diagnostic = true;
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.note = Some(text.into());
        self
    }

    /// One-line human rendering.
    pub fn describe(&self) -> String {
        let rel = match self.comparison {
            Comparison::Absolute => format!("target {} ± {}", g(self.target), g(self.tolerance)),
            Comparison::Relative => format!("target {} ± {}%", g(self.target), g(100.0 * self.tolerance)),
            Comparison::AtMost => format!("bound ≤ {}", g(self.target)),
            Comparison::AtLeast => format!("bound ≥ {}", g(self.target)),
            Comparison::Flag => "must hold".to_string(),
        };
        let value = if self.comparison == Comparison::Flag {
            (self.value == 1.0).to_string()
        } else {
            g(self.value)
        };
        format!("{}: {} ({})", self.name, value, rel)
    }
}

fn g(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e5) {
        format!("{x:.4e}")
    } else {
        format!("{x:.6}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Floats carry 17 significant digits so that every value round-trips.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.to_string(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), RunError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(RunError::io)?;
        for row in &self.rows {
            let rec: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(f) => format_float(*f),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            w.write_record(&rec).map_err(RunError::io)?;
        }
        w.flush().map_err(RunError::io)?;
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Int(v) => *v as f64,
                    Cell::Float(v) => *v,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }
}

/// What a run produces.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub parameters: serde_json::Value,
    pub results: serde_json::Value,
    pub checks: Vec<Check>,
    /// All non-diagnostic checks pass.
    pub pass: bool,
    #[serde(skip)]
    pub tables: Vec<CsvTable>,
}

impl Report {
    pub fn new(experiment: &str, parameters: serde_json::Value) -> Self {
        Self {
            experiment: experiment.to_string(),
            parameters,
            results: serde_json::Value::Null,
            checks: Vec::new(),
            pass: true,
            tables: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        if !c.diagnostic && !c.pass {
            self.pass = false;
        }
        self.checks.push(c);
    }

    pub fn criterion_checks(&self, n: u32) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.criterion == Some(n))
    }

    pub fn table(&self, name: &str) -> Option<&CsvTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `<experiment>.json` and one `<experiment>_<table>.csv` per table.
    pub fn write_files(&self, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
        std::fs::create_dir_all(dir).map_err(RunError::io)?;
        let mut written = Vec::new();
        let json = dir.join(format!("{}.json", self.experiment));
        std::fs::write(&json, self.to_json() + "\n").map_err(RunError::io)?;
        written.push(json);
        for t in &self.tables {
            let path = dir.join(format!("{}_{}.csv", self.experiment, t.name));
            let file = std::fs::File::create(&path).map_err(RunError::io)?;
            t.write(std::io::BufWriter::new(file))?;
            written.push(path);
        }
        Ok(written)
    }
}
