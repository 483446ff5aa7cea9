//! Presets for the four published figures.
//!
//! Figures 1 and 2 sweep SNR over 0–40 dB for `α = 0.1` and `α = 0.2`;
//! figure 3 sweeps `α` over 0.01–0.49 at 30 dB; figure 4 compares the PF
//! index of fixed and optimised allocations with equal channel gains.

use std::path::Path;

use crate::analytic::{AbepBreakdown, FormulaMode, OperatingPoint};
use crate::montecarlo::{run_grid, SystemConfig};
use crate::poweropt::{optimize_alpha, DEFAULT_TOL};

use super::commands::{mode_label, prepare_dir, simulate, write_provenance, write_sweep};
use super::config::{Level, LevelList, SweepAxis, SweepSpec};
use super::csv::{emit_csv, num, CsvRecord};
use super::plot::{emit_plot, PlotSpec, Series, YScale};
use super::{CliError, RunReport};

pub const FIGURES: std::ops::RangeInclusive<u8> = 1..=4;
pub const FIGURE_TRIALS: u64 = 10_000_000;
pub const FIGURE_SEED: u64 = 42;
pub const DELTAS: [f64; 5] = [0.0, 0.01, 0.02, 0.05, 0.1];
/// Fixed allocations compared against the optimised one in figure 4.
pub const FIG4_FIXED: [f64; 2] = [0.1, 0.2];

fn snr_axis() -> LevelList {
    LevelList {
        values: (0..=20).map(|k| 2.0 * k as f64).collect(),
        db: true,
    }
}

/// Parameter grid of figure `n` at full scale (10⁷ trials, seed 42).
pub fn figure_spec(n: u8) -> Result<SweepSpec, CliError> {
    let base = SweepSpec {
        alphas: vec![],
        snr: snr_axis(),
        deltas: DELTAS.to_vec(),
        sigma1: Level::db(10.0),
        sigma2: Level::db(0.0),
        trials: FIGURE_TRIALS,
        seed: FIGURE_SEED,
        block_size: crate::montecarlo::DEFAULT_BLOCK_SIZE,
        mode: FormulaMode::AsDerived,
    };
    Ok(match n {
        1 => SweepSpec { alphas: vec![0.1], ..base },
        2 => SweepSpec { alphas: vec![0.2], ..base },
        3 => SweepSpec {
            alphas: (1..=49).map(|k| k as f64 / 100.0).collect(),
            snr: LevelList {
                values: vec![30.0],
                db: true,
            },
            ..base
        },
        4 => SweepSpec {
            alphas: FIG4_FIXED.to_vec(),
            sigma1: Level::db(0.0),
            ..base
        },
        _ => return Err(CliError::Usage(format!("no preset for figure {n}; choose 1-4"))),
    })
}

fn preset_notes(n: u8) -> Vec<(&'static str, String)> {
    let mut v = vec![("figure", n.to_string())];
    match n {
        1 | 2 => v.push(("note", "SNR axis 0-40 dB in 2 dB steps is a preset choice; the source figure gives no range".into())),
        3 => {
            v.push(("note", "caption SNR `030dB` read as 30 dB".into()));
            v.push(("note", "alpha axis 0.01-0.49 in steps of 0.01 is a preset choice".into()));
        }
        _ => {
            v.push(("note", "SNR axis 0-40 dB in 2 dB steps is a preset choice".into()));
            v.push(("note", "optimised alpha found on the closed forms of the configured mode".into()));
        }
    }
    v
}

/// Runs figure `n` with `spec` (normally [`figure_spec`] plus overrides)
/// and writes `figN.csv`, SVG charts and `figN_provenance.txt` into `out`.
pub fn reproduce_figure(n: u8, spec: &SweepSpec, out: &Path, overwrite: bool) -> Result<RunReport, CliError> {
    if !FIGURES.contains(&n) {
        return Err(CliError::Usage(format!("no preset for figure {n}; choose 1-4")));
    }
    prepare_dir(out)?;
    let stem = format!("fig{n}");
    let mut report = RunReport::default();
    let mut extra = preset_notes(n);
    extra.push(("seed", spec.seed.to_string()));
    extra.push(("trials", spec.trials.to_string()));
    extra.push(("mode", mode_label(spec.mode)));

    if n == 4 {
        let rows = figure4_rows(spec, &mut report)?;
        let csv = out.join(format!("{stem}.csv"));
        emit_csv(&rows, &csv, overwrite)?;
        report.files.push(csv);
        let svg = out.join(format!("{stem}_pf.svg"));
        let notes = emit_plot(&pf_plot(&rows, spec.mode), &svg, overwrite)?;
        report.notes.extend(notes.into_iter().map(|m| format!("{}: {m}", svg.display())));
        report.files.push(svg);
    } else {
        let axis = if n == 3 { SweepAxis::Alpha } else { SweepAxis::Snr };
        let (rows, notes) = simulate(spec, axis)?;
        report.notes.extend(notes);
        if rows.is_empty() {
            return Err(CliError::Usage("every grid point failed; nothing written".into()));
        }
        let title = if n == 3 {
            format!("Figure 3: BER vs α at {} dB", spec.snr.values[0])
        } else {
            format!("Figure {n}: BER vs SNR, α={}", spec.alphas[0])
        };
        write_sweep(&rows, axis, out, &stem, &title, overwrite, &mut report)?;
    }
    write_provenance(out.join(format!("{stem}_provenance.txt")), spec, &extra, overwrite, &mut report)?;
    Ok(report)
}

/// One scheme at one `(snr, delta)` cell of the fairness comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Row {
    pub snr_db: f64,
    pub delta: f64,
    /// `fixed` or `optimized`.
    pub scheme: &'static str,
    pub alpha: f64,
    pub ber1_mc: f64,
    pub stderr1: f64,
    pub ber2_mc: f64,
    pub stderr2: f64,
    pub pf_mc: Option<f64>,
    pub low_confidence: bool,
    pub derived: AbepBreakdown,
    pub printed: AbepBreakdown,
    pub mode: FormulaMode,
}

impl Fig4Row {
    pub fn analytic(&self) -> &AbepBreakdown {
        match self.mode {
            FormulaMode::AsDerived => &self.derived,
            FormulaMode::AsPrinted => &self.printed,
        }
    }
}

impl CsvRecord for Fig4Row {
    fn header() -> &'static [&'static str] {
        &[
            "snr_db", "delta", "scheme", "alpha", "ber1_mc", "stderr1", "ber2_mc", "stderr2", "pf_mc",
            "low_confidence_flag", "p1_derived", "p2_derived", "pf_derived", "p1_printed", "p2_printed",
            "pf_printed", "clamped", "mode",
        ]
    }

    fn cells(&self) -> Vec<String> {
        let pf = |x: Option<f64>| x.map(num).unwrap_or_else(|| "inf".into());
        vec![
            num(self.snr_db),
            num(self.delta),
            self.scheme.into(),
            num(self.alpha),
            num(self.ber1_mc),
            num(self.stderr1),
            num(self.ber2_mc),
            num(self.stderr2),
            pf(self.pf_mc),
            (if self.low_confidence { "1" } else { "0" }).into(),
            num(self.derived.p1.value()),
            num(self.derived.p2.value()),
            pf(self.derived.pf),
            num(self.printed.p1.value()),
            num(self.printed.p2.value()),
            pf(self.printed.pf),
            (if self.printed.clamped || self.derived.clamped { "1" } else { "0" }).into(),
            self.mode.to_string(),
        ]
    }
}

/// Simulates each fixed `α` in `spec.alphas` and the optimised `α*` for
/// every `(delta, snr)` cell. Cells whose optimisation fails are reported
/// as notes.
pub fn figure4_rows(spec: &SweepSpec, report: &mut RunReport) -> Result<Vec<Fig4Row>, CliError> {
    let mut plan = Vec::new();
    for &delta in &spec.deltas {
        let profile = spec.profile(delta)?;
        for snr in spec.snr.levels() {
            let rho = snr.to_linear();
            for &alpha in &spec.alphas {
                plan.push((snr.to_db(), delta, "fixed", OperatingPoint::new(alpha, rho, profile)?));
            }
            match optimize_alpha(rho, &profile, spec.mode, DEFAULT_TOL) {
                Ok(r) => plan.push((snr.to_db(), delta, "optimized", OperatingPoint::new(r.alpha_star, rho, profile)?)),
                Err(e) => report.notes.push(format!("snr {} dB, delta {delta}: {e}", snr.to_db())),
            }
        }
    }
    let block = spec.block_size.min(spec.trials);
    let cfgs = plan
        .iter()
        .map(|(_, _, _, pt)| SystemConfig::with_block_size(*pt, spec.trials, spec.seed, block).map(|c| c.with_mode(spec.mode)))
        .collect::<crate::Result<Vec<_>>>()?;
    let grid = run_grid(&cfgs)?;
    let mut rows = Vec::with_capacity(grid.len());
    for ((snr_db, delta, scheme, pt), gp) in plan.iter().zip(&grid) {
        let r = match &gp.outcome {
            Ok(r) => r,
            Err(e) => {
                report.notes.push(format!("snr {snr_db} dB, delta {delta}, {scheme}: {e}"));
                continue;
            }
        };
        let b = &r.ber;
        rows.push(Fig4Row {
            snr_db: *snr_db,
            delta: *delta,
            scheme,
            alpha: pt.alpha(),
            ber1_mc: b.ber_ue1,
            stderr1: b.stderr_ue1,
            ber2_mc: b.ber_ue2,
            stderr2: b.stderr_ue2,
            pf_mc: b.pf_index(),
            low_confidence: b.low_confidence(),
            derived: AbepBreakdown::evaluate(pt, FormulaMode::AsDerived),
            printed: AbepBreakdown::evaluate(pt, FormulaMode::AsPrinted),
            mode: spec.mode,
        });
    }
    if rows.is_empty() {
        return Err(CliError::Usage("every cell failed; nothing written".into()));
    }
    Ok(rows)
}

/// PF index against SNR on a linear axis, a series per `(scheme, delta)`.
pub fn pf_plot(rows: &[Fig4Row], mode: FormulaMode) -> PlotSpec {
    let mut series: Vec<(String, Series)> = Vec::new();
    for r in rows {
        let key = if r.scheme == "fixed" {
            format!("α={}, δ={}", r.alpha, r.delta)
        } else {
            format!("optimised, δ={}", r.delta)
        };
        let idx = match series.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                series.push((
                    key.clone(),
                    Series {
                        label: key,
                        ..Series::default()
                    },
                ));
                series.len() - 1
            }
        };
        let s = &mut series[idx].1;
        if let Some(pf) = r.pf_mc {
            s.markers.push((r.snr_db, pf));
        }
        if let Some(pf) = r.analytic().pf {
            s.line.push((r.snr_db, pf));
        }
    }
    PlotSpec {
        title: format!("Figure 4: PF index P1/P2 vs SNR ({mode} closed forms)"),
        x_label: "transmit SNR (dB)".into(),
        y_label: "PF index".into(),
        y_scale: YScale::Linear,
        series: series.into_iter().map(|(_, s)| s).collect(),
    }
}
