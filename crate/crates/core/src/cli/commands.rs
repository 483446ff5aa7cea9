//! The batch commands behind the binary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analytic::FormulaMode;
use crate::montecarlo::{run_grid, run_point, BerEstimate, GridPoint, SystemConfig, MIN_ERROR_EVENTS};
use crate::poweropt::{optimize_alpha, DEFAULT_TOL};

use super::config::{SweepAxis, SweepSpec};
use super::csv::{emit_csv, write_new, OptimizeRow, ResultRow, ValidationRow};
use super::plot::{emit_plot, PlotSpec, Series, YScale};
use super::{CliError, RunReport};

/// Relative slack allowed by `validate` on top of three standard errors.
pub const VALIDATE_REL_TOL: f64 = 0.05;

pub(crate) fn prepare_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })
}

/// Simulates every point of `spec`; failed points become notes.
pub fn simulate(spec: &SweepSpec, axis: SweepAxis) -> Result<(Vec<ResultRow>, Vec<String>), CliError> {
    let cfgs = spec.system_configs(axis)?;
    let grid = run_grid(&cfgs.iter().map(|(_, c)| *c).collect::<Vec<_>>())?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut notes = Vec::new();
    for ((snr, _), gp) in cfgs.iter().zip(&grid) {
        match &gp.outcome {
            Ok(r) => rows.push(ResultRow::new(snr.to_db(), gp, r)),
            Err(e) => notes.push(format!("{}: {e}", describe(snr.to_db(), gp))),
        }
    }
    Ok((rows, notes))
}

fn describe(snr_db: f64, gp: &GridPoint) -> String {
    format!(
        "snr {snr_db} dB, alpha {}, delta {}",
        gp.config.point.alpha(),
        gp.config.point.profile().delta()
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum User {
    Near,
    Far,
}

impl User {
    pub fn tag(self) -> &'static str {
        match self {
            User::Near => "ue1",
            User::Far => "ue2",
        }
    }
}

/// BER-vs-axis chart for one user: a series per `(other axis, delta)` pair.
pub fn ber_plot(rows: &[ResultRow], user: User, axis: SweepAxis, title: &str) -> PlotSpec {
    // keyed by bit patterns so the grouping is exact and ordered
    let mut groups: BTreeMap<(u64, u64), Series> = BTreeMap::new();
    let multi_alpha = rows.iter().any(|r| r.alpha != rows[0].alpha);
    let multi_snr = rows.iter().any(|r| r.snr_db != rows[0].snr_db);
    for r in rows {
        let (x, other) = match axis {
            SweepAxis::Snr => (r.snr_db, r.alpha),
            SweepAxis::Alpha => (r.alpha, r.snr_db),
        };
        let label = match axis {
            SweepAxis::Snr if multi_alpha => format!("α={}, δ={}", r.alpha, r.delta),
            SweepAxis::Alpha if multi_snr => format!("{} dB, δ={}", r.snr_db, r.delta),
            _ => format!("δ={}", r.delta),
        };
        let s = groups.entry((other.to_bits(), r.delta.to_bits())).or_insert_with(|| Series {
            label,
            ..Series::default()
        });
        let (mc, an) = match user {
            User::Near => (r.ber1_mc, r.p1_analytic),
            User::Far => (r.ber2_mc, r.p2_analytic),
        };
        s.markers.push((x, mc));
        s.line.push((x, an));
    }
    PlotSpec {
        title: title.to_string(),
        x_label: match axis {
            SweepAxis::Snr => "transmit SNR (dB)".into(),
            SweepAxis::Alpha => "power allocation α".into(),
        },
        y_label: format!("BER {}", user.tag().to_uppercase()),
        y_scale: YScale::Log,
        series: groups.into_values().collect(),
    }
}

/// Writes `<stem>.csv` and one SVG per user into `out`.
pub(crate) fn write_sweep(
    rows: &[ResultRow],
    axis: SweepAxis,
    out: &Path,
    stem: &str,
    title: &str,
    overwrite: bool,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let csv = out.join(format!("{stem}.csv"));
    emit_csv(rows, &csv, overwrite)?;
    report.files.push(csv);
    for user in [User::Near, User::Far] {
        let path = out.join(format!("{stem}_{}.svg", user.tag()));
        let notes = emit_plot(&ber_plot(rows, user, axis, &format!("{title}, {}", user.tag().to_uppercase())), &path, overwrite)?;
        report.notes.extend(notes.into_iter().map(|n| format!("{}: {n}", path.display())));
        report.files.push(path);
    }
    Ok(())
}

/// Sidecar describing how a file set was produced. Contains nothing that
/// depends on the machine or the worker count.
pub(crate) fn write_provenance(
    path: PathBuf,
    spec: &SweepSpec,
    extra: &[(&str, String)],
    overwrite: bool,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let mut text = format!("software = {} {}\n", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
    for (k, v) in extra {
        text.push_str(&format!("{k} = {v}\n"));
    }
    text.push_str("# effective configuration\n");
    text.push_str(&spec.to_config_string());
    write_new(&path, &text, overwrite)?;
    report.files.push(path);
    Ok(())
}

pub fn sweep(spec: &SweepSpec, axis: SweepAxis, out: &Path, overwrite: bool) -> Result<RunReport, CliError> {
    prepare_dir(out)?;
    let stem = match axis {
        SweepAxis::Snr => "sweep_snr",
        SweepAxis::Alpha => "sweep_alpha",
    };
    let (rows, notes) = simulate(spec, axis)?;
    let mut report = RunReport {
        notes,
        ..RunReport::default()
    };
    if rows.is_empty() {
        return Err(CliError::Usage("every grid point failed; nothing written".into()));
    }
    let title = match axis {
        SweepAxis::Snr => "BER vs transmit SNR",
        SweepAxis::Alpha => "BER vs power allocation",
    };
    write_sweep(&rows, axis, out, stem, title, overwrite, &mut report)?;
    write_provenance(out.join(format!("{stem}_provenance.txt")), spec, &[], overwrite, &mut report)?;
    report.summary.push(format!("{} points simulated, {} trials each", rows.len(), spec.trials));
    Ok(report)
}

fn mc_summary(b: &BerEstimate) -> (f64, f64, f64, f64, bool) {
    (b.ber_ue1, b.stderr_ue1, b.ber_ue2, b.stderr_ue2, b.low_confidence())
}

/// Min-max allocation per `(snr, delta)` cell with a simulation at `α*`.
/// The `alpha` key of the config is not used.
pub fn optimize(spec: &SweepSpec, out: &Path, overwrite: bool) -> Result<RunReport, CliError> {
    prepare_dir(out)?;
    let mut report = RunReport::default();
    let mut rows = Vec::new();
    for &delta in &spec.deltas {
        let profile = spec.profile(delta)?;
        for snr in spec.snr.levels() {
            let rho = snr.to_linear();
            let result = match optimize_alpha(rho, &profile, spec.mode, DEFAULT_TOL) {
                Ok(r) => r,
                Err(e) => {
                    report.notes.push(format!("snr {} dB, delta {delta}: {e}", snr.to_db()));
                    continue;
                }
            };
            let pt = crate::analytic::OperatingPoint::new(result.alpha_star, rho, profile)?;
            let cfg = SystemConfig::with_block_size(pt, spec.trials, spec.seed, spec.block_size.min(spec.trials))?;
            let mc = run_point(&cfg).map(|b| mc_summary(&b));
            if let Err(e) = &mc {
                report.notes.push(format!("snr {} dB, delta {delta}: simulation failed: {e}", snr.to_db()));
            }
            rows.push(OptimizeRow {
                snr_db: snr.to_db(),
                delta,
                mode: spec.mode,
                result,
                mc: mc.ok(),
            });
        }
    }
    if rows.is_empty() {
        return Err(CliError::Usage("optimisation failed in every cell; nothing written".into()));
    }
    let csv = out.join("optimize.csv");
    emit_csv(&rows, &csv, overwrite)?;
    report.files.push(csv);
    write_provenance(
        out.join("optimize_provenance.txt"),
        spec,
        &[("note", "alpha key unused; alpha_star found on the closed forms, simulated once".into())],
        overwrite,
        &mut report,
    )?;
    report.summary.push(format!("{} cells optimised", rows.len()));
    Ok(report)
}

/// Compares simulation against the closed forms of `spec.mode` for the far
/// user, the SIC stage and the near user. A quantity passes when
/// `|mc − analytic| ≤ max(3·stderr, 5%·analytic)`; quantities with fewer
/// than the minimum number of error events are skipped.
pub fn validate_rows(rows: &[ResultRow], errors: &[(u64, u64, u64)]) -> Vec<ValidationRow> {
    let mut out = Vec::new();
    for (r, &(e1, e2, es)) in rows.iter().zip(errors) {
        for (quantity, mc, se, an, n) in [
            ("ue2", r.ber2_mc, r.stderr2, r.p2_analytic, e2),
            ("sic", r.ber_sic_mc, r.stderr_sic, r.p_sic_analytic, es),
            ("ue1", r.ber1_mc, r.stderr1, r.p1_analytic, e1),
        ] {
            let tolerance = (3.0 * se).max(VALIDATE_REL_TOL * an);
            out.push(ValidationRow {
                snr_db: r.snr_db,
                alpha: r.alpha,
                delta: r.delta,
                quantity,
                mc,
                stderr: se,
                analytic: an,
                tolerance,
                errors: n,
                low_confidence: n < MIN_ERROR_EVENTS,
                pass: (mc - an).abs() <= tolerance,
            });
        }
    }
    out
}

pub fn validate(spec: &SweepSpec, out: &Path, overwrite: bool) -> Result<RunReport, CliError> {
    prepare_dir(out)?;
    let cfgs = spec.system_configs(SweepAxis::Snr)?;
    let grid = run_grid(&cfgs.iter().map(|(_, c)| *c).collect::<Vec<_>>())?;
    let mut report = RunReport::default();
    let mut rows = Vec::new();
    let mut counts = Vec::new();
    for ((snr, _), gp) in cfgs.iter().zip(&grid) {
        match &gp.outcome {
            Ok(r) => {
                rows.push(ResultRow::new(snr.to_db(), gp, r));
                counts.push((r.ber.errors_ue1, r.ber.errors_ue2, r.ber.errors_sic_stage));
            }
            Err(e) => {
                report.failures += 1;
                report.notes.push(format!("{}: {e}", describe(snr.to_db(), gp)));
            }
        }
    }
    let checks = validate_rows(&rows, &counts);
    if checks.is_empty() {
        return Err(CliError::Usage("every grid point failed; nothing to validate".into()));
    }
    let failed = checks.iter().filter(|c| c.verdict() == "fail").count();
    let skipped = checks.iter().filter(|c| c.verdict() == "skipped").count();
    report.failures += failed;
    for c in checks.iter().filter(|c| c.verdict() == "fail") {
        report.notes.push(format!(
            "FAIL {} at snr {} dB, alpha {}, delta {}: mc {:.4e} vs {} {:.4e} (tolerance {:.2e})",
            c.quantity, c.snr_db, c.alpha, c.delta, c.mc, spec.mode, c.analytic, c.tolerance
        ));
    }
    let csv = out.join("validate.csv");
    emit_csv(&checks, &csv, overwrite)?;
    report.files.push(csv);
    write_provenance(out.join("validate_provenance.txt"), spec, &[], overwrite, &mut report)?;
    report.summary.push(format!(
        "{} checks: {} pass, {failed} fail, {skipped} skipped (fewer than {MIN_ERROR_EVENTS} error events)",
        checks.len(),
        checks.len() - failed - skipped
    ));
    Ok(report)
}

pub(crate) fn mode_label(mode: FormulaMode) -> String {
    format!("{mode} (alternate {} also reported)", mode.other())
}

