//! Length sweeps of the curvature model, log-log fits, and the flat-file
//! formats the command-line tool reads and writes.

mod checks;
mod fit;
mod output;

pub use checks::{operator_check, CheckRow, MapSummary};
pub use fit::{fit_loglog, LogLogFit, MIN_FIT_POINTS};
pub use output::{read_sweep, write_sweep, Report, SweepRow, Verdict, SCHEMA_VERSION};

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{curvature_report, BcMode, BoundaryData, CouplingProfile, CurvatureReport, ModelParams};
use crate::error::{Error, Result};

/// Smallest grid accepted for a sweep.
pub const MIN_SWEEP_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format {s:?} (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub lengths: Vec<f64>,
    pub grid: usize,
    pub c1: f64,
    pub a1: f64,
    pub b1: f64,
    pub b2: f64,
    #[serde(rename = "bcMode", serialize_with = "as_display")]
    pub bc_mode: BcMode,
    pub offset: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub workers: usize,
}

fn as_display<S: serde::Serializer, T: fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lengths: vec![0.3, 0.2, 0.1, 0.05, 0.025],
            grid: 4096,
            c1: 1.0,
            a1: 1.0,
            b1: 1.0,
            b2: 1.0,
            bc_mode: BcMode::Mixed,
            offset: 0.0,
            out: None,
            format: Format::Csv,
            workers: 0,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

/// Comma-separated list of lengths.
pub fn parse_lengths(v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_num("lengths", s)).collect()
}

impl SweepConfig {
    /// Sets one option by its flag name (without the leading dashes).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "lengths" => self.lengths = parse_lengths(value)?,
            "grid" => self.grid = parse_num(key, value)?,
            "c1" => self.c1 = parse_num(key, value)?,
            "a1" => self.a1 = parse_num(key, value)?,
            "b1" => self.b1 = parse_num(key, value)?,
            "b2" => self.b2 = parse_num(key, value)?,
            "bc-mode" => self.bc_mode = value.trim().parse()?,
            "offset" => self.offset = parse_num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "format" => self.format = value.trim().parse()?,
            "workers" => self.workers = parse_num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            self.set(k.trim(), v.trim()).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", no + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_file_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() {
            return Err(Error::Config("no lengths given".into()));
        }
        if let Some(l) = self.lengths.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return Err(Error::Config(format!("length {l} outside (0, 1)")));
        }
        if self.lengths.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("lengths must be strictly decreasing".into()));
        }
        if self.grid < MIN_SWEEP_GRID {
            return Err(Error::Config(format!("grid {} below the minimum {MIN_SWEEP_GRID}", self.grid)));
        }
        for (name, v) in [("c1", self.c1), ("a1", self.a1), ("b1", self.b1), ("b2", self.b2), ("offset", self.offset)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} = {v} must be finite and nonnegative")));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            profile: CouplingProfile { c1: self.c1, cap: None },
            boundary: BoundaryData { a1: self.a1, b1: self.b1, b2: self.b2 },
            bc_mode: self.bc_mode,
            compact_offset: self.offset,
        }
    }
}

/// Reports in the order of `config.lengths` and the three fits.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub reports: Vec<CurvatureReport>,
    /// Fits of `|K|`, `lemma7Bound` and `Pi` against `l`; absent below
    /// [`MIN_FIT_POINTS`].
    pub fits: Option<SweepFits>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SweepFits {
    #[serde(rename = "K")]
    pub k: LogLogFit,
    #[serde(rename = "lemma7Bound")]
    pub lemma7_bound: LogLogFit,
    #[serde(rename = "Pi")]
    pub pi: LogLogFit,
}

/// Fits the three scaling exponents; `None` when any fit lacks data.
pub fn fit_reports(ls: &[f64], k: &[f64], bound: &[f64], pi: &[f64]) -> Option<SweepFits> {
    Some(SweepFits { k: fit_loglog(ls, k)?, lemma7_bound: fit_loglog(ls, bound)?, pi: fit_loglog(ls, pi)? })
}

/// Evaluates every length, in parallel over at most `config.workers`
/// threads (0 means one per core).
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let params = config.params();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let reports: Vec<CurvatureReport> = pool.install(|| {
        config.lengths.par_iter().map(|&l| curvature_report(l, config.grid, &params)).collect::<Result<_>>()
    })?;
    let ls: Vec<f64> = reports.iter().map(|r| r.l).collect();
    let col = |f: fn(&CurvatureReport) -> f64| reports.iter().map(f).collect::<Vec<_>>();
    let fits = fit_reports(&ls, &col(|r| r.k), &col(|r| r.lemma7_bound), &col(|r| r.pi));
    Ok(SweepResult { reports, fits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_and_overrides() {
        let mut c = SweepConfig::default();
        c.apply_file_text("# sweep\nlengths = 0.4, 0.2,0.1\ngrid=512 # coarse\nbc-mode = dirichlet\nformat=json\n")
            .unwrap();
        assert_eq!(c.lengths, vec![0.4, 0.2, 0.1]);
        assert_eq!(c.grid, 512);
        assert_eq!(c.bc_mode, BcMode::Dirichlet);
        assert_eq!(c.format, Format::Json);
        c.set("grid", "1024").unwrap();
        assert_eq!(c.grid, 1024);
        c.validate().unwrap();
    }

    #[test]
    fn config_errors() {
        let mut c = SweepConfig::default();
        assert!(matches!(c.apply_file_text("colour = red"), Err(Error::Config(_))));
        assert!(matches!(c.apply_file_text("grid"), Err(Error::Config(_))));
        assert!(matches!(c.set("grid", "many"), Err(Error::Config(_))));
        for (k, v) in [("lengths", "0.3,1.5"), ("lengths", "0.1,0.2"), ("grid", "100"), ("c1", "-1")] {
            let mut c = SweepConfig::default();
            c.set(k, v).unwrap();
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{k} = {v}");
        }
        let mut c = SweepConfig::default();
        assert!(c.set("format", "xml").is_err());
    }

    #[test]
    fn invalid_length_fails_before_computing() {
        let mut c = SweepConfig::default();
        c.set("lengths", "0.3,1.5").unwrap();
        let e = run_sweep(&c).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn curvature_slope_insensitive_to_boundary_value() {
        let slopes: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&a1| {
                run_sweep(&SweepConfig { a1, grid: 1024, ..SweepConfig::default() }).unwrap().fits.unwrap().k.slope
            })
            .collect();
        let spread = slopes.iter().cloned().fold(f64::MIN, f64::max) - slopes.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 0.1, "{slopes:?}");
    }

    #[test]
    fn sweep_keeps_order_across_workers() {
        let mut c = SweepConfig { grid: 512, ..SweepConfig::default() };
        c.lengths = vec![0.4, 0.3, 0.2, 0.1];
        c.workers = 3;
        let a = run_sweep(&c).unwrap();
        c.workers = 1;
        let b = run_sweep(&c).unwrap();
        let la: Vec<f64> = a.reports.iter().map(|r| r.l).collect();
        assert_eq!(la, c.lengths);
        assert_eq!(a.reports, b.reports);
        assert!(a.fits.is_some());
    }
}
