//! Structured experiment results: measured point series, fitted exponents,
//! recorded constants, and pass flags. Pass flags are pure functions of the
//! stored measurements, so a report loaded from disk can be re-evaluated
//! and checked against what it claims.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::fit::FitSummary;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            name: name.into(),
            points,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Measured data; the first series is the primary one (what
    /// `points.csv` and the plot show).
    pub series: Vec<Series>,
    /// Fits recomputed from `series` by the kind's evaluation rule.
    pub fits: BTreeMap<String, FitSummary>,
    /// Scalar measurements that are not point series.
    pub constants: BTreeMap<String, f64>,
    /// Named acceptance sub-checks.
    pub flags: BTreeMap<String, bool>,
    /// Conjunction of all flags.
    pub pass: bool,
    pub duration_secs: f64,
}

impl ExperimentReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let report: ExperimentReport = serde_json::from_str(s)?;
        report.config.validate()?;
        Ok(report)
    }

    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        let report: ExperimentReport = serde_json::from_slice(bytes)?;
        report.config.validate()?;
        Ok(report)
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    /// The primary series rendered as `x,y` CSV with a header row.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        if let Some(primary) = self.series.first() {
            for (x, y) in &primary.points {
                out.push_str(&format!("{x},{y}\n"));
            }
        }
        out
    }

    /// Re-runs the kind's evaluation rule on the stored measurements and
    /// checks the stored verdict against it.
    pub fn reevaluate(&self) -> Result<bool> {
        let (fits, flags, pass) =
            super::experiments::evaluate(&self.config, &self.series, &self.constants)?;
        if flags != self.flags || pass != self.pass {
            return Err(Error::Parse(format!(
                "stored verdict (pass = {}) disagrees with re-evaluation (pass = {pass})",
                self.pass
            )));
        }
        let _ = fits;
        Ok(pass)
    }
}

/// Parses `x,y` CSV as produced by [`ExperimentReport::points_csv`].
pub fn parse_points_csv(s: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = s.lines();
    match lines.next() {
        Some(h) if h.trim() == "x,y" => {}
        other => return Err(Error::Parse(format!("missing x,y header, found {other:?}"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let (Some(xs), Some(ys), None) = (cells.next(), cells.next(), cells.next()) else {
            return Err(Error::Parse(format!("line {}: expected two cells", i + 2)));
        };
        let x: f64 = xs
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?;
        let y: f64 = ys
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Parse(format!("line {}: non-finite value", i + 2)));
        }
        out.push((x, y));
    }
    Ok(out)
}
