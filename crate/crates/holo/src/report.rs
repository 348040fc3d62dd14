//! Experiment reports.
//!
//! JSON field order is fixed: `name, params, scalars, seriesColumns, series,
//! residuals, passed, seed, toolVersion`. Map entries keep insertion order.

use std::path::Path;

use holo_core::{CMat, C64};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::HoloResult;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a residual measures; drives the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualClass {
    Unitarity,
    Covariance,
    CrossRoute,
    Periodicity,
    Fixture,
    Convergence,
    Transport,
    Other,
}

impl ResidualClass {
    pub fn code(self) -> i32 {
        match self {
            ResidualClass::Unitarity => 1,
            ResidualClass::Covariance => 2,
            ResidualClass::CrossRoute => 3,
            ResidualClass::Periodicity => 4,
            ResidualClass::Fixture => 5,
            ResidualClass::Convergence => 6,
            ResidualClass::Transport => 7,
            ResidualClass::Other => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    pub threshold: f64,
    pub class: ResidualClass,
}

impl Residual {
    pub fn passed(&self) -> bool {
        self.value < self.threshold
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Real(x)
    }
}

impl From<C64> for Scalar {
    fn from(z: C64) -> Self {
        Scalar::Complex([z.re, z.im])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub x: f64,
    pub columns: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub name: String,
    pub params: IndexMap<String, String>,
    pub scalars: IndexMap<String, Scalar>,
    /// Names of `x` and of each series column.
    pub series_columns: Vec<String>,
    pub series: Vec<SeriesRow>,
    pub residuals: IndexMap<String, Residual>,
    pub passed: bool,
    pub seed: u64,
    pub tool_version: String,
}

impl ExperimentReport {
    pub fn new(name: &str, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            params: IndexMap::new(),
            scalars: IndexMap::new(),
            series_columns: Vec::new(),
            series: Vec::new(),
            residuals: IndexMap::new(),
            passed: true,
            seed,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Non-finite reals are dropped so the JSON round trip stays exact.
    pub fn scalar(&mut self, key: &str, value: impl Into<Scalar>) -> &mut Self {
        let value = value.into();
        let finite = match value {
            Scalar::Real(x) => x.is_finite(),
            Scalar::Complex([a, b]) => a.is_finite() && b.is_finite(),
        };
        if finite {
            self.scalars.insert(key.to_string(), value);
        }
        self
    }

    /// Entries `prefix[i][j]`, row-major.
    pub fn matrix(&mut self, prefix: &str, m: &CMat) -> &mut Self {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                self.scalar(&format!("{prefix}[{i}][{j}]"), m[(i, j)]);
            }
        }
        self
    }

    pub fn columns(&mut self, names: &[&str]) -> &mut Self {
        self.series_columns = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn row(&mut self, x: f64, columns: Vec<f64>) -> &mut Self {
        self.series.push(SeriesRow { x, columns });
        self
    }

    /// Records a residual and updates `passed`. A value that is negative or
    /// not finite is stored as `f64::MAX` and fails.
    pub fn residual(&mut self, key: &str, value: f64, threshold: f64, class: ResidualClass) -> &mut Self {
        let value = if value.is_finite() && value >= 0.0 { value } else { f64::MAX };
        self.residuals.insert(key.to_string(), Residual { value, threshold, class });
        self.passed = self.residuals.values().all(Residual::passed);
        self
    }

    /// `0` when passed, otherwise `10 +` the class code of the first failing residual.
    pub fn exit_code(&self) -> i32 {
        self.residuals.values().find(|r| !r.passed()).map_or(0, |r| 10 + r.class.code())
    }

    pub fn to_json(&self) -> HoloResult<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> HoloResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_json(&self, path: &Path) -> HoloResult<()> {
        crate::io::write_json(path, self)
    }

    pub fn read_json(path: &Path) -> HoloResult<Self> {
        crate::io::read_json(path)
    }

    /// Series only: header `seriesColumns`, one line per row.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> HoloResult<()> {
        let mut w = csv::Writer::from_writer(out);
        if !self.series_columns.is_empty() {
            w.write_record(&self.series_columns)?;
        }
        for row in &self.series {
            let mut rec = Vec::with_capacity(row.columns.len() + 1);
            rec.push(row.x.to_string());
            rec.extend(row.columns.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passed_tracks_residuals() {
        let mut r = ExperimentReport::new("t", 1);
        assert!(r.passed);
        r.residual("a", 1e-12, 1e-9, ResidualClass::Unitarity);
        assert!(r.passed);
        assert_eq!(r.exit_code(), 0);
        r.residual("b", 1.0, 1e-9, ResidualClass::Fixture);
        r.residual("c", 1.0, 1e-9, ResidualClass::Periodicity);
        assert!(!r.passed);
        assert_eq!(r.exit_code(), 15);
        r.residual("d", f64::NAN, 1.0, ResidualClass::Other);
        assert_eq!(r.residuals["d"].value, f64::MAX);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut r = ExperimentReport::new("t", 0);
        r.columns(&["phi", "p"]).row(0.0, vec![1.0]).row(0.5, vec![0.25]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "phi,p\n0,1\n0.5,0.25\n");
    }

    #[test]
    fn scalars_skip_non_finite() {
        let mut r = ExperimentReport::new("t", 0);
        r.scalar("nan", f64::NAN).scalar("z", C64::new(1.0, -2.0));
        assert!(!r.scalars.contains_key("nan"));
        assert_eq!(r.scalars["z"], Scalar::Complex([1.0, -2.0]));
    }
}
