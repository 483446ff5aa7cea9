//! CSV tables. Numbers are written with 10 significant digits in scientific
//! notation, LF line endings, no quoting (no cell contains a comma).

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analytic::FormulaMode;
use crate::montecarlo::{GridPoint, PointResult};
use crate::poweropt::{AllocationResult, Boundary};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("nothing to write to {0}")]
    Empty(PathBuf),
    #[error("{0} exists; pass --overwrite to replace it")]
    Exists(PathBuf),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A table row with a fixed header.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.9e}")
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "inf".into())
}

fn flag(b: bool) -> String {
    (if b { "1" } else { "0" }).into()
}

pub fn render_csv<R: CsvRecord>(rows: &[R]) -> String {
    let mut out = R::header().join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.cells().join(","));
        out.push('\n');
    }
    out
}

/// Writes `contents` to `path`, refusing to replace an existing file unless
/// `overwrite` is set.
pub fn write_new(path: &Path, contents: &str, overwrite: bool) -> Result<(), OutputError> {
    if !overwrite && path.exists() {
        return Err(OutputError::Exists(path.to_path_buf()));
    }
    fs::write(path, contents).map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_csv<R: CsvRecord>(rows: &[R], path: &Path, overwrite: bool) -> Result<(), OutputError> {
    if rows.is_empty() {
        return Err(OutputError::Empty(path.to_path_buf()));
    }
    write_new(path, &render_csv(rows), overwrite)
}

/// One simulated grid point next to both closed-form variants.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    pub alpha: f64,
    pub delta: f64,
    pub ber1_mc: f64,
    pub stderr1: f64,
    pub ber2_mc: f64,
    pub stderr2: f64,
    pub ber_sic_mc: f64,
    pub stderr_sic: f64,
    pub p1_analytic: f64,
    pub p2_analytic: f64,
    pub p_sic_analytic: f64,
    /// Analytic `p1 / p2`; `None` when `p2` is zero.
    pub pf: Option<f64>,
    pub mode: FormulaMode,
    pub low_confidence: bool,
    pub p1_alt: f64,
    pub p2_alt: f64,
    pub p_sic_alt: f64,
    pub alt_mode: FormulaMode,
    /// Either mode's evaluation was clamped into `[0, ½]`.
    pub clamped: bool,
    pub pf_mc: Option<f64>,
    pub trials: u64,
}

impl ResultRow {
    pub fn new(snr_db: f64, gp: &GridPoint, r: &PointResult) -> Self {
        let (a, alt, b) = (&r.analytic, &r.alternate, &r.ber);
        ResultRow {
            snr_db,
            alpha: gp.config.point.alpha(),
            delta: gp.config.point.profile().delta(),
            ber1_mc: b.ber_ue1,
            stderr1: b.stderr_ue1,
            ber2_mc: b.ber_ue2,
            stderr2: b.stderr_ue2,
            ber_sic_mc: b.ber_sic,
            stderr_sic: b.stderr_sic,
            p1_analytic: a.p1.value(),
            p2_analytic: a.p2.value(),
            p_sic_analytic: a.p_sic.value(),
            pf: a.pf,
            mode: a.mode,
            low_confidence: b.low_confidence(),
            p1_alt: alt.p1.value(),
            p2_alt: alt.p2.value(),
            p_sic_alt: alt.p_sic.value(),
            alt_mode: alt.mode,
            clamped: a.clamped || alt.clamped,
            pf_mc: b.pf_index(),
            trials: b.trials,
        }
    }
}

impl CsvRecord for ResultRow {
    fn header() -> &'static [&'static str] {
        &[
            "snr_db", "alpha", "delta", "ber1_mc", "stderr1", "ber2_mc", "stderr2", "ber_sic_mc", "p1_analytic",
            "p2_analytic", "p_sic_analytic", "pf", "mode", "low_confidence_flag", "stderr_sic", "p1_alt", "p2_alt",
            "p_sic_alt", "alt_mode", "clamped", "pf_mc", "trials",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            num(self.snr_db),
            num(self.alpha),
            num(self.delta),
            num(self.ber1_mc),
            num(self.stderr1),
            num(self.ber2_mc),
            num(self.stderr2),
            num(self.ber_sic_mc),
            num(self.p1_analytic),
            num(self.p2_analytic),
            num(self.p_sic_analytic),
            opt_num(self.pf),
            self.mode.to_string(),
            flag(self.low_confidence),
            num(self.stderr_sic),
            num(self.p1_alt),
            num(self.p2_alt),
            num(self.p_sic_alt),
            self.alt_mode.to_string(),
            flag(self.clamped),
            opt_num(self.pf_mc),
            self.trials.to_string(),
        ]
    }
}

/// Optimised allocation for one `(snr, delta)` cell, with an optional
/// simulation at `alpha_star`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeRow {
    pub snr_db: f64,
    pub delta: f64,
    pub mode: FormulaMode,
    pub result: AllocationResult,
    /// `(ber1, stderr1, ber2, stderr2, low_confidence)` at `alpha_star`.
    pub mc: Option<(f64, f64, f64, f64, bool)>,
}

impl CsvRecord for OptimizeRow {
    fn header() -> &'static [&'static str] {
        &[
            "snr_db", "delta", "mode", "alpha_star", "p1_analytic", "p2_analytic", "worst", "pf", "iterations",
            "bracket_width", "crossing", "boundary", "ber1_mc", "stderr1", "ber2_mc", "stderr2", "pf_mc",
            "low_confidence_flag",
        ]
    }

    fn cells(&self) -> Vec<String> {
        let r = &self.result;
        let boundary = match r.boundary {
            None => "none",
            Some(Boundary::Lower) => "lower",
            Some(Boundary::Upper) => "upper",
        };
        let (b1, s1, b2, s2, low) = self.mc.unwrap_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN, true));
        let pf_mc = if b2 > 0.0 { b1 / b2 } else if b2 == 0.0 { f64::INFINITY } else { f64::NAN };
        vec![
            num(self.snr_db),
            num(self.delta),
            self.mode.to_string(),
            num(r.alpha_star),
            num(r.p1_at_star.value()),
            num(r.p2_at_star.value()),
            num(r.worst.value()),
            opt_num(r.pf_at_star),
            r.iterations.to_string(),
            num(r.bracket_width),
            flag(r.crossing),
            boundary.into(),
            num(b1),
            num(s1),
            num(b2),
            num(s2),
            num(pf_mc),
            flag(low),
        ]
    }
}

/// One compared quantity at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub snr_db: f64,
    pub alpha: f64,
    pub delta: f64,
    /// `ue1`, `ue2` or `sic`.
    pub quantity: &'static str,
    pub mc: f64,
    pub stderr: f64,
    pub analytic: f64,
    pub tolerance: f64,
    pub errors: u64,
    pub low_confidence: bool,
    pub pass: bool,
}

impl ValidationRow {
    /// Outcome label: `pass`, `fail` or `skipped` (low confidence).
    pub fn verdict(&self) -> &'static str {
        if self.low_confidence {
            "skipped"
        } else if self.pass {
            "pass"
        } else {
            "fail"
        }
    }
}

impl CsvRecord for ValidationRow {
    fn header() -> &'static [&'static str] {
        &[
            "snr_db", "alpha", "delta", "quantity", "mc", "stderr", "analytic", "abs_diff", "tolerance", "errors",
            "low_confidence_flag", "verdict",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            num(self.snr_db),
            num(self.alpha),
            num(self.delta),
            self.quantity.into(),
            num(self.mc),
            num(self.stderr),
            num(self.analytic),
            num((self.mc - self.analytic).abs()),
            num(self.tolerance),
            self.errors.to_string(),
            flag(self.low_confidence),
            self.verdict().into(),
        ]
    }
}
