//! Min-max fair power allocation.
//!
//! Picks `α* = argmin_α max(P₁(e; α), P₂(e; α))` over `α ∈ [1e-4, 0.5 − 1e-4]`
//! using the closed forms. The search scans a coarse grid (step 0.005), then
//! refines around the best grid point. It bisects on `P₁ − P₂` when the
//! curves cross next to that point. Otherwise it runs a golden-section search
//! on the max objective. Both refinements run when a crossing exists, and the
//! lower objective wins.

use crate::analytic::{pf_index, AbepBreakdown, FormulaMode, OperatingPoint};
use crate::channel::FadingProfile;
use crate::error::{domain, Error, Result};
use crate::mathkit::Probability;

pub const ALPHA_LO: f64 = 1e-4;
pub const ALPHA_HI: f64 = 0.5 - 1e-4;
pub const COARSE_STEP: f64 = 0.005;
pub const DEFAULT_TOL: f64 = 1e-6;

const MAX_ITER: u32 = 200;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Which end of the search interval the optimum landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Lower,
    Upper,
}

/// Result of the generic min-max search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    pub x: f64,
    pub f1: f64,
    pub f2: f64,
    pub iterations: u32,
    pub bracket_width: f64,
    /// The two curves change order inside the refined bracket.
    pub crossing: bool,
    pub boundary: Option<Boundary>,
}

impl SearchOutcome {
    pub fn objective(&self) -> f64 {
        self.f1.max(self.f2)
    }
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    x: f64,
    f1: f64,
    f2: f64,
}

impl Eval {
    fn objective(&self) -> f64 {
        self.f1.max(self.f2)
    }

    fn gap(&self) -> f64 {
        self.f1 - self.f2
    }
}

fn better(a: Eval, b: Eval) -> Eval {
    if b.objective() < a.objective() {
        b
    } else {
        a
    }
}

/// Minimises `max(f(x).0, f(x).1)` over `[lo, hi]` with the grid + refine
/// strategy described in the module docs. `tol` is an absolute tolerance on
/// the objective.
pub fn minmax_search<F>(f: F, lo: f64, hi: f64, step: f64, tol: f64) -> Result<SearchOutcome>
where
    F: Fn(f64) -> (f64, f64),
{
    if !(tol > 0.0) {
        return Err(domain("tol", tol, "(0, inf)"));
    }
    if !(lo < hi && step > 0.0) {
        return Err(domain("hi - lo", hi - lo, "(0, inf)"));
    }
    let eval = |x: f64| {
        let (f1, f2) = f(x);
        Eval { x, f1, f2 }
    };

    let n = ((hi - lo) / step).floor() as usize;
    let mut grid: Vec<Eval> = (0..=n).map(|i| eval(lo + i as f64 * step)).collect();
    if grid.last().is_some_and(|e| e.x < hi) {
        grid.push(eval(hi));
    }
    if let Some(bad) = grid.iter().find(|e| !(e.f1.is_finite() && e.f2.is_finite())) {
        return Err(Error::NonFiniteObjective {
            alpha: bad.x,
            p1: bad.f1,
            p2: bad.f2,
        });
    }

    let best_idx = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.objective().total_cmp(&b.1.objective()))
        .map(|(i, _)| i)
        .expect("grid is nonempty");
    let left = best_idx.saturating_sub(1);
    let right = (best_idx + 1).min(grid.len() - 1);

    let mut best = grid[best_idx];
    let mut iterations = 0;
    let mut bracket_width = grid[right].x - grid[left].x;
    let mut crossing = false;

    // a sign change of f1 - f2 in either neighbouring cell
    let crossing_cell = [(left, best_idx), (best_idx, right)]
        .into_iter()
        .filter(|(a, b)| a != b)
        .find(|&(a, b)| grid[a].gap().signum() != grid[b].gap().signum() || grid[b].gap() == 0.0);
    if let Some((a, b)) = crossing_cell {
        crossing = true;
        let (e, it, w) = bisect_gap(&eval, grid[a], grid[b], tol);
        iterations += it;
        if e.objective() <= best.objective() {
            best = e;
            bracket_width = w;
        }
    }

    let (e, it, w) = golden(&eval, grid[left], grid[right], tol);
    iterations += it;
    if e.objective() < best.objective() {
        best = e;
        bracket_width = w;
    }

    let boundary = if best.x - lo < step {
        Some(Boundary::Lower)
    } else if hi - best.x < step {
        Some(Boundary::Upper)
    } else {
        None
    };

    Ok(SearchOutcome {
        x: best.x,
        f1: best.f1,
        f2: best.f2,
        iterations,
        bracket_width,
        crossing,
        boundary,
    })
}

fn bisect_gap<F: Fn(f64) -> Eval>(eval: &F, mut a: Eval, mut b: Eval, tol: f64) -> (Eval, u32, f64) {
    let mut best = better(a, b);
    let mut it = 0;
    while it < MAX_ITER && b.x - a.x > f64::EPSILON * b.x.abs() {
        let m = eval(0.5 * (a.x + b.x));
        it += 1;
        best = better(best, m);
        if m.gap().abs() <= 0.1 * tol {
            best = m;
            break;
        }
        if m.gap().signum() == a.gap().signum() {
            a = m;
        } else {
            b = m;
        }
    }
    (best, it, b.x - a.x)
}

fn golden<F: Fn(f64) -> Eval>(eval: &F, mut a: Eval, mut b: Eval, tol: f64) -> (Eval, u32, f64) {
    let mut c = eval(b.x - INV_PHI * (b.x - a.x));
    let mut d = eval(a.x + INV_PHI * (b.x - a.x));
    let mut best = better(better(a, b), better(c, d));
    let mut it = 0;
    while it < MAX_ITER && b.x - a.x > 1e-14 {
        let spread = a.objective().max(b.objective()) - c.objective().min(d.objective());
        if spread <= tol / 30.0 {
            break;
        }
        if c.objective() < d.objective() {
            b = d;
            d = c;
            c = eval(b.x - INV_PHI * (b.x - a.x));
            best = better(best, c);
        } else {
            a = c;
            c = d;
            d = eval(a.x + INV_PHI * (b.x - a.x));
            best = better(best, d);
        }
        it += 1;
    }
    (best, it, b.x - a.x)
}

/// Optimal allocation and the analytic error rates it achieves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationResult {
    pub alpha_star: f64,
    pub p1_at_star: Probability,
    pub p2_at_star: Probability,
    /// `max(p1_at_star, p2_at_star)`.
    pub worst: Probability,
    /// `p1 / p2` at `alpha_star`; `None` if `p2` vanished.
    pub pf_at_star: Option<f64>,
    pub iterations: u32,
    pub bracket_width: f64,
    pub crossing: bool,
    pub boundary: Option<Boundary>,
}

/// Solves the min-max allocation for fixed SNR and fading statistics.
pub fn optimize_alpha(
    rho_s: f64,
    profile: &FadingProfile,
    mode: FormulaMode,
    tol: f64,
) -> Result<AllocationResult> {
    // validates rho_s once; α is swapped in per evaluation
    let base = OperatingPoint::new(0.25, rho_s, *profile)?;
    let objective = |alpha: f64| match base.with_alpha(alpha) {
        Ok(pt) => {
            let b = AbepBreakdown::evaluate(&pt, mode);
            (b.p1.value(), b.p2.value())
        }
        Err(_) => (f64::NAN, f64::NAN),
    };
    let out = minmax_search(objective, ALPHA_LO, ALPHA_HI, COARSE_STEP, tol)?;
    let at_star = AbepBreakdown::evaluate(&base.with_alpha(out.x)?, mode);
    Ok(AllocationResult {
        alpha_star: out.x,
        p1_at_star: at_star.p1,
        p2_at_star: at_star.p2,
        worst: if at_star.p1 >= at_star.p2 { at_star.p1 } else { at_star.p2 },
        pf_at_star: pf_index(at_star.p1, at_star.p2).ok(),
        iterations: out.iterations,
        bracket_width: out.bracket_width,
        crossing: out.crossing,
        boundary: out.boundary,
    })
}

/// Fairness comparison for one `(rho_s, delta)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FairnessRow {
    pub rho_s: f64,
    pub delta: f64,
    /// `(alpha, analytic breakdown)` for each fixed allocation.
    pub fixed: Vec<(f64, Result<AbepBreakdown>)>,
    pub optimized: Result<AllocationResult>,
}

/// PF index of fixed and optimised allocations over an SNR × δ grid.
/// Cell-level failures are stored in the row.
pub fn fairness_sweep(
    rho_grid: &[f64],
    profile: &FadingProfile,
    deltas: &[f64],
    fixed_alphas: &[f64],
    mode: FormulaMode,
) -> Result<Vec<FairnessRow>> {
    if rho_grid.is_empty() {
        return Err(Error::EmptyGrid("SNR"));
    }
    if deltas.is_empty() {
        return Err(Error::EmptyGrid("delta"));
    }
    let mut rows = Vec::with_capacity(rho_grid.len() * deltas.len());
    for &delta in deltas {
        for &rho_s in rho_grid {
            let cell = profile.with_delta(delta);
            let fixed = fixed_alphas
                .iter()
                .map(|&alpha| {
                    let b = cell
                        .clone()
                        .and_then(|p| OperatingPoint::new(alpha, rho_s, p))
                        .map(|pt| AbepBreakdown::evaluate(&pt, mode));
                    (alpha, b)
                })
                .collect();
            let optimized = cell.and_then(|p| optimize_alpha(rho_s, &p, mode, DEFAULT_TOL));
            rows.push(FairnessRow {
                rho_s,
                delta,
                fixed,
                optimized,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::db_to_linear;

    fn brute_force(rho_s: f64, profile: &FadingProfile, mode: FormulaMode) -> (f64, f64) {
        let mut best = (0.0, f64::INFINITY);
        let mut alpha = ALPHA_LO;
        while alpha <= ALPHA_HI {
            let pt = OperatingPoint::new(alpha, rho_s, *profile).unwrap();
            let w = AbepBreakdown::evaluate(&pt, mode).worst();
            if w < best.1 {
                best = (alpha, w);
            }
            alpha += 1e-4;
        }
        best
    }

    #[test]
    fn equal_channels_twenty_db() {
        let profile = FadingProfile::from_db(0.0, 0.0, 0.05).unwrap();
        let r = optimize_alpha(100.0, &profile, FormulaMode::AsDerived, DEFAULT_TOL).unwrap();
        let pf = r.pf_at_star.unwrap();
        assert!((1.0..=2.0).contains(&pf), "{r:?}");
        assert!((pf - 1.5).abs() < 0.05, "{pf}");
        assert_eq!(r.worst.value(), r.p1_at_star.value().max(r.p2_at_star.value()));
        assert!(r.alpha_star > 0.0 && r.alpha_star < 0.5);
        let (_, brute) = brute_force(100.0, &profile, FormulaMode::AsDerived);
        assert!(r.worst.value() <= brute + 1e-6);
    }

    #[test]
    fn interior_crossing_is_equalised() {
        let profile = FadingProfile::from_db(10.0, 0.0, 0.02).unwrap();
        let r = optimize_alpha(db_to_linear(20.0), &profile, FormulaMode::AsDerived, DEFAULT_TOL).unwrap();
        assert!(r.crossing && r.boundary.is_none(), "{r:?}");
        assert!((r.p1_at_star.value() - r.p2_at_star.value()).abs() <= 10.0 * DEFAULT_TOL);
        let (_, brute) = brute_force(db_to_linear(20.0), &profile, FormulaMode::AsDerived);
        assert!(r.worst.value() <= brute + 1e-6);
    }

    #[test]
    fn far_user_dominance_lands_on_an_edge() {
        // curve 2 dominates everywhere and falls with x: optimum at the upper edge
        let out = minmax_search(|x| (0.1 * x, 1.0 - x), ALPHA_LO, ALPHA_HI, COARSE_STEP, 1e-6).unwrap();
        assert_eq!(out.boundary, Some(Boundary::Upper));
        assert!(ALPHA_HI - out.x < COARSE_STEP);
        // dominance with a rising curve: optimum at the lower edge
        let out = minmax_search(|x| (0.0, 0.2 + x), ALPHA_LO, ALPHA_HI, COARSE_STEP, 1e-6).unwrap();
        assert_eq!(out.boundary, Some(Boundary::Lower));
        assert!(!out.crossing);
    }

    #[test]
    fn non_finite_objective_names_alpha() {
        let err = minmax_search(
            |x| if (x - 0.2501).abs() < 1e-9 { (f64::NAN, 0.0) } else { (x, 1.0 - x) },
            ALPHA_LO,
            ALPHA_HI,
            COARSE_STEP,
            1e-6,
        )
        .unwrap_err();
        match err {
            Error::NonFiniteObjective { alpha, .. } => assert!((alpha - 0.2501).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn smooth_interior_minimum_without_crossing() {
        let out = minmax_search(
            |x| ((x - 0.3137).powi(2) + 0.01, 0.0),
            ALPHA_LO,
            ALPHA_HI,
            COARSE_STEP,
            1e-12,
        )
        .unwrap();
        assert!(!out.crossing);
        assert!((out.x - 0.3137).abs() < 1e-4, "{out:?}");
        assert!(out.objective() - 0.01 < 1e-12);
    }

    #[test]
    fn tighter_tolerance_never_worse() {
        let profile = FadingProfile::from_db(6.0, 0.0, 0.1).unwrap();
        let mut last = f64::INFINITY;
        for tol in [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8] {
            let r = optimize_alpha(300.0, &profile, FormulaMode::AsDerived, tol).unwrap();
            assert!(r.worst.value() <= last);
            last = r.worst.value();
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        let profile = FadingProfile::from_db(0.0, 0.0, 0.0).unwrap();
        assert!(optimize_alpha(10.0, &profile, FormulaMode::AsDerived, 0.0).is_err());
        assert!(optimize_alpha(-1.0, &profile, FormulaMode::AsDerived, 1e-6).is_err());
    }

    #[test]
    fn sweep_shape_and_fairness_ordering() {
        let profile = FadingProfile::from_db(0.0, 0.0, 0.0).unwrap();
        let rhos: Vec<f64> = (0..=8).map(|k| db_to_linear(5.0 * k as f64)).collect();
        let rows = fairness_sweep(&rhos, &profile, &[0.0, 0.05], &[0.1, 0.2], FormulaMode::AsDerived).unwrap();
        assert_eq!(rows.len(), 18);
        for row in rows.iter().filter(|r| r.delta == 0.0) {
            let opt = row.optimized.as_ref().unwrap();
            let opt_pf = opt.pf_at_star.unwrap();
            for (_, fixed) in &row.fixed {
                let pf = fixed.as_ref().unwrap().pf.unwrap();
                if pf >= 1.0 && opt_pf >= 1.0 {
                    assert!(opt_pf <= pf + 1e-9, "{opt_pf} vs {pf} at {}", row.rho_s);
                }
            }
        }
        assert!(fairness_sweep(&[], &profile, &[0.0], &[0.1], FormulaMode::AsDerived).is_err());
    }
}
