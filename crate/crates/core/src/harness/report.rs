//! CSV data tables and JSON summaries.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

/// One CSV cell; `None` renders as an empty field.
pub type Cell = Option<f64>;

/// Seventeen significant digits, so the text round-trips to the same f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(format_float).unwrap_or_default()).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Parse a CSV written by [`Table::to_csv`].
pub fn parse_csv(text: &str) -> Result<Table> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| crate::Error::Scenario("empty CSV".into()))?;
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let row = line
            .split(',')
            .map(|c| {
                if c.is_empty() {
                    Ok(None)
                } else {
                    c.parse::<f64>()
                        .map(Some)
                        .map_err(|_| crate::Error::Scenario(format!("bad CSV cell '{c}'")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != columns.len() {
            return Err(crate::Error::Scenario("ragged CSV row".into()));
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance rule.
    pub criterion: String,
    pub passed: bool,
    /// e.g. `picometer scale: PASS`
    pub tag: String,
}

impl Verdict {
    pub fn new(name: &str, label: &str, value: f64, criterion: String, passed: bool) -> Self {
        Self {
            name: name.into(),
            value,
            criterion,
            passed,
            tag: format!("{label}: {}", if passed { "PASS" } else { "FAIL" }),
        }
    }

    /// Passes when |value − reference| ≤ tol·|reference|.
    pub fn relative(name: &str, label: &str, value: f64, reference: f64, tol: f64) -> Self {
        let err = ((value - reference) / reference).abs();
        Self::new(
            name,
            label,
            value,
            format!("|value/{reference:e} - 1| <= {tol:e} (got {err:e})"),
            err <= tol,
        )
    }

    pub fn absolute(name: &str, label: &str, value: f64, reference: f64, tol: f64) -> Self {
        let err = (value - reference).abs();
        Self::new(
            name,
            label,
            value,
            format!("|value - {reference:e}| <= {tol:e} (got {err:e})"),
            err <= tol,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flag {
    pub code: String,
    pub message: String,
}

impl Flag {
    pub fn new(code: &str, message: &str) -> Self {
        Self {
            code: code.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    /// Input coordinate of the skipped point, m.
    pub separation: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: String,
    pub version: String,
    pub inputs: Value,
    pub results: Value,
    pub fits: Value,
    pub verdicts: Vec<Verdict>,
    pub point_failures: Vec<PointFailure>,
    pub flags: Vec<Flag>,
    #[serde(skip)]
    pub table: Table,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn has_flag(&self, code: &str) -> bool {
        self.flags.iter().any(|f| f.code == code)
    }

    /// Summary JSON; the wall-clock timestamp lives only under `metadata`.
    pub fn summary_json(&self, workers: usize) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        let generated = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        v["passed"] = Value::Bool(self.passed());
        v["metadata"] = serde_json::json!({
            "generated_unix_seconds": generated,
            "workers": workers,
        });
        Ok(serde_json::to_string_pretty(&v)?)
    }

    /// Writes `<dir>/<scenario>.csv` and `<dir>/<scenario>.json`.
    pub fn write(&self, dir: &Path, workers: usize) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.scenario));
        let json = dir.join(format!("{}.json", self.scenario));
        std::fs::write(&csv, self.table.to_csv())?;
        std::fs::write(&json, self.summary_json(workers)?)?;
        Ok((csv, json))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_exactly() {
        let mut t = Table::new(&["separation_m", "log_amplitude"]);
        let xs = [1e-6, 0.1 + 0.2, -169_743.844_373_326_14, f64::MIN_POSITIVE, 5e-324];
        for &x in &xs {
            t.push(vec![Some(x), None]);
        }
        let back = parse_csv(&t.to_csv()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn verdict_tags() {
        let v = Verdict::relative("ell", "picometer scale", 1.005, 1.0, 0.01);
        assert!(v.passed);
        assert_eq!(v.tag, "picometer scale: PASS");
        assert!(!Verdict::absolute("x", "x", 2.0, 1.0, 0.5).passed);
    }
}
