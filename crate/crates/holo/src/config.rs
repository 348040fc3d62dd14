//! `key = value` configuration and tolerance precedence.
//!
//! Precedence, lowest first: built-in defaults, config file, `HOLO_TOL`,
//! command-line flags.

use std::path::Path;

use holo_core::tol;

use crate::error::{HoloError, HoloResult};

pub const TOL_ENV: &str = "HOLO_TOL";

/// Values read from a config file. Absent keys stay `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub tol: Option<f64>,
    pub steps: Option<usize>,
    pub schrodinger_steps: Option<usize>,
    pub reference_steps: Option<usize>,
    pub chi_points: Option<usize>,
    pub seed: Option<u64>,
}

impl Config {
    /// Blank lines and `#` comments are ignored; unknown keys are errors.
    pub fn parse(text: &str) -> HoloResult<Self> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| HoloError::Config { line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "tol" => cfg.tol = Some(parse_tol(value).map_err(bad)?),
                "steps" => cfg.steps = Some(parse_count(value).map_err(bad)?),
                "schrodinger_steps" => cfg.schrodinger_steps = Some(parse_count(value).map_err(bad)?),
                "reference_steps" => cfg.reference_steps = Some(parse_count(value).map_err(bad)?),
                "chi_points" => cfg.chi_points = Some(parse_count(value).map_err(bad)?),
                "seed" => cfg.seed = Some(value.parse().map_err(|_| bad(format!("bad seed {value:?}")))?),
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> HoloResult<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

pub fn parse_tol(value: &str) -> Result<f64, String> {
    match value.trim().parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
        _ => Err(format!("tolerance must be a positive number, got {value:?}")),
    }
}

fn parse_count(value: &str) -> Result<usize, String> {
    match value.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer, got {value:?}")),
    }
}

/// Resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Overrides each experiment's default residual threshold when set.
    pub tol: Option<f64>,
    pub steps: usize,
    pub schrodinger_steps: usize,
    pub reference_steps: usize,
    pub chi_points: usize,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol: None,
            steps: tol::DEFAULT_STEPS,
            schrodinger_steps: tol::DEFAULT_SCHRODINGER_STEPS,
            reference_steps: 4096,
            chi_points: 720,
            seed: 42,
            jobs: 1,
        }
    }
}

impl Settings {
    pub fn resolve(config: Option<&Config>, env_tol: Option<&str>, flag_tol: Option<f64>) -> HoloResult<Self> {
        let mut s = Settings::default();
        if let Some(c) = config {
            s.tol = c.tol.or(s.tol);
            s.steps = c.steps.unwrap_or(s.steps);
            s.schrodinger_steps = c.schrodinger_steps.unwrap_or(s.schrodinger_steps);
            s.reference_steps = c.reference_steps.unwrap_or(s.reference_steps);
            s.chi_points = c.chi_points.unwrap_or(s.chi_points);
            s.seed = c.seed.unwrap_or(s.seed);
        }
        if let Some(v) = env_tol.filter(|v| !v.trim().is_empty()) {
            s.tol = Some(parse_tol(v).map_err(|m| HoloError::Usage(format!("{TOL_ENV}: {m}")))?);
        }
        if let Some(t) = flag_tol {
            s.tol = Some(parse_tol(&t.to_string()).map_err(HoloError::Usage)?);
        }
        Ok(s)
    }

    /// `tol` if set, else `default`.
    pub fn threshold(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg = Config::parse("# defaults\ntol = 1e-7\n\nsteps=256 # coarse\nseed = 9\n").unwrap();
        assert_eq!(cfg.tol, Some(1e-7));
        assert_eq!(cfg.steps, Some(256));
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.schrodinger_steps, None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(Config::parse("colour = red"), Err(HoloError::Config { line: 1, .. })));
        assert!(matches!(Config::parse("\ntol = -1"), Err(HoloError::Config { line: 2, .. })));
        assert!(matches!(Config::parse("steps"), Err(HoloError::Config { .. })));
    }

    #[test]
    fn precedence() {
        let cfg = Config { tol: Some(1e-3), steps: Some(10), ..Config::default() };
        let s = Settings::resolve(None, None, None).unwrap();
        assert_eq!(s.tol, None);
        let s = Settings::resolve(Some(&cfg), None, None).unwrap();
        assert_eq!((s.tol, s.steps), (Some(1e-3), 10));
        let s = Settings::resolve(Some(&cfg), Some("1e-4"), None).unwrap();
        assert_eq!(s.tol, Some(1e-4));
        let s = Settings::resolve(Some(&cfg), Some("1e-4"), Some(1e-5)).unwrap();
        assert_eq!(s.tol, Some(1e-5));
        assert!(Settings::resolve(None, Some("abc"), None).is_err());
        assert_eq!(s.threshold(0.5), 1e-5);
        assert_eq!(Settings::default().threshold(0.5), 0.5);
    }
}
