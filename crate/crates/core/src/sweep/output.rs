use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{fit_reports, SweepConfig, SweepFits, SweepResult, MIN_FIT_POINTS};
use crate::curvature::CurvatureReport;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

const HEADER: [&str; 12] = [
    "l",
    "K",
    "R",
    "Pi",
    "inner00",
    "inner11",
    "inner01",
    "lemma7Bound",
    "gridSize",
    "bcMode",
    "profileC1",
    "schema_version",
];

const FEW_POINTS: &str = "fits require at least 3 lengths";

/// One output row; field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub l: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "Pi")]
    pub pi: f64,
    pub inner00: f64,
    pub inner11: f64,
    pub inner01: f64,
    #[serde(rename = "lemma7Bound")]
    pub lemma7_bound: f64,
    #[serde(rename = "gridSize")]
    pub grid_size: usize,
    #[serde(rename = "bcMode")]
    pub bc_mode: String,
    #[serde(rename = "profileC1")]
    pub profile_c1: f64,
    pub schema_version: u32,
}

impl From<&CurvatureReport> for SweepRow {
    fn from(r: &CurvatureReport) -> Self {
        Self {
            l: r.l,
            k: r.k,
            r: r.r,
            pi: r.pi,
            inner00: r.inner.i00,
            inner11: r.inner.i11,
            inner01: r.inner.i01,
            lemma7_bound: r.lemma7_bound,
            grid_size: r.grid_size,
            bc_mode: r.bc_mode.to_string(),
            profile_c1: r.profile_c1,
            schema_version: SCHEMA_VERSION,
        }
    }
}

#[derive(Serialize)]
struct JsonMeta<'a> {
    #[serde(flatten)]
    config: &'a SweepConfig,
    schema_version: u32,
}

#[derive(Serialize)]
struct JsonOut<'a> {
    meta: JsonMeta<'a>,
    rows: Vec<SweepRow>,
    fits: Option<SweepFits>,
    warnings: Vec<&'static str>,
}

#[derive(Deserialize)]
struct JsonIn {
    rows: Vec<SweepRow>,
}

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        if let csv::ErrorKind::Io(io) = e.into_kind() {
            return Error::Io(io);
        }
        unreachable!()
    }
    let offset = e.position().map_or(0, |p| p.byte());
    Error::Parse { offset, message: e.to_string() }
}

/// Writes the sweep in `config.format`. Numbers are written in shortest
/// round-trip form; identical inputs give identical bytes.
pub fn write_sweep<W: Write>(mut w: W, config: &SweepConfig, result: &SweepResult) -> Result<()> {
    let rows: Vec<SweepRow> = result.reports.iter().map(SweepRow::from).collect();
    match config.format {
        super::Format::Csv => {
            {
                let mut cw = csv::Writer::from_writer(&mut w);
                for row in &rows {
                    cw.serialize(row).map_err(csv_err)?;
                }
                if rows.is_empty() {
                    cw.write_record(HEADER).map_err(csv_err)?;
                }
                cw.flush()?;
            }
            match &result.fits {
                Some(f) => {
                    for (name, fit) in [("K", f.k), ("lemma7Bound", f.lemma7_bound), ("Pi", f.pi)] {
                        writeln!(
                            w,
                            "# fit {name} slope={:?} intercept={:?} rms={:?} n={}",
                            fit.slope, fit.intercept, fit.rms_residual, fit.points
                        )?;
                    }
                }
                None => writeln!(w, "# warning: {FEW_POINTS}")?,
            }
        }
        super::Format::Json => {
            let out = JsonOut {
                meta: JsonMeta { config, schema_version: SCHEMA_VERSION },
                rows,
                fits: result.fits,
                warnings: if result.fits.is_none() { vec![FEW_POINTS] } else { vec![] },
            };
            serde_json::to_writer_pretty(&mut w, &out).map_err(|e| Error::Io(e.into()))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    InsufficientData,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::InsufficientData => "insufficient-data",
        })
    }
}

/// A parsed sweep file with refitted exponents.
#[derive(Debug, Clone)]
pub struct Report {
    pub rows: Vec<SweepRow>,
    pub fits: Option<SweepFits>,
}

impl Report {
    pub fn from_rows(rows: Vec<SweepRow>) -> Self {
        let col = |f: fn(&SweepRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
        let fits = fit_reports(&col(|r| r.l), &col(|r| r.k), &col(|r| r.lemma7_bound), &col(|r| r.pi));
        Self { rows, fits }
    }

    /// Verdicts for the `|K|`, `lemma7Bound` and `Pi` exponents.
    pub fn verdicts(&self) -> [(&'static str, Verdict); 3] {
        let judge = |ok: fn(&SweepFits) -> bool| match &self.fits {
            None => Verdict::InsufficientData,
            Some(f) if ok(f) => Verdict::Pass,
            Some(_) => Verdict::Fail,
        };
        [
            ("|K| slope >= 0.8", judge(|f| f.k.slope >= 0.8)),
            ("lemma7Bound slope in [-2.3, -1.7]", judge(|f| (-2.3..=-1.7).contains(&f.lemma7_bound.slope))),
            ("Pi slope <= -3", judge(|f| f.pi.slope <= -3.0)),
        ]
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>8} {:>13} {:>13} {:>13} {:>13} {:>6} {:>9}", "l", "K", "R", "Pi", "lemma7Bound", "grid", "bc")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>8} {:>13.5e} {:>13.5e} {:>13.5e} {:>13.5e} {:>6} {:>9}",
                r.l, r.k, r.r, r.pi, r.lemma7_bound, r.grid_size, r.bc_mode
            )?;
        }
        writeln!(f)?;
        match &self.fits {
            Some(fits) => {
                for (name, fit) in [("|K|", fits.k), ("lemma7Bound", fits.lemma7_bound), ("Pi", fits.pi)] {
                    writeln!(
                        f,
                        "fit {name:<12} slope {:>8.4}  intercept {:>9.4}  rms residual {:.2e}",
                        fit.slope, fit.intercept, fit.rms_residual
                    )?;
                }
            }
            None => writeln!(f, "fits: insufficient data (need at least {MIN_FIT_POINTS} lengths)")?,
        }
        for (name, v) in self.verdicts() {
            writeln!(f, "{name:<36} {v}")?;
        }
        Ok(())
    }
}

fn byte_offset(text: &str, line: usize, column: usize) -> u64 {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len()) as u64
}

/// Parses a file written by [`write_sweep`] in either format.
pub fn read_sweep(text: &str) -> Result<Report> {
    let rows = if text.trim_start().starts_with('{') {
        let parsed: JsonIn = serde_json::from_str(text)
            .map_err(|e| Error::Parse { offset: byte_offset(text, e.line(), e.column()), message: e.to_string() })?;
        parsed.rows
    } else {
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header = rd.headers().map_err(csv_err)?.clone();
        if header.iter().ne(HEADER.iter().copied()) {
            return Err(Error::Parse { offset: 0, message: format!("unexpected header {:?}", header.as_slice()) });
        }
        let mut rows = Vec::new();
        for rec in rd.deserialize::<SweepRow>() {
            rows.push(rec.map_err(csv_err)?);
        }
        rows
    };
    if rows.is_empty() {
        return Err(Error::Parse { offset: text.len() as u64, message: "no data rows".into() });
    }
    Ok(Report::from_rows(rows))
}
