//! Closed-form average bit error probabilities for both users.
//!
//! Two formula variants are carried side by side:
//!
//! * [`FormulaMode::AsDerived`] re-derives every average from the conditional
//!   BEP with the exponential-average identity
//!   `E[Q(sqrt(2cγ))] = ½(1 − sqrt(cγ̄ / (1 + cγ̄)))`, using the squared
//!   superposition amplitudes `β = (sqrt(1 − α) ± sqrt(α))² = 1 ± 2 sqrt(α − α²)`.
//! * [`FormulaMode::AsPrinted`] evaluates the published expressions literally,
//!   with `β = 1 ± sqrt(α − α²)`. Those expressions can leave `[0, ½]`, so
//!   their results are clamped and the clamp is reported.
//!
//! The near user's average always composes as
//! `P₁ = ½·P_SIC + (1 − P_SIC)·P₁(e|correct)`, taking the erroneous-SIC
//! branch at its worst case ½.

use std::fmt;
use std::str::FromStr;

use crate::channel::FadingProfile;
use crate::error::{domain, Result};
use crate::mathkit::{half_tail_avg, Probability};

/// Which closed-form variant to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FormulaMode {
    #[default]
    AsDerived,
    AsPrinted,
}

impl FormulaMode {
    pub fn other(self) -> FormulaMode {
        match self {
            FormulaMode::AsDerived => FormulaMode::AsPrinted,
            FormulaMode::AsPrinted => FormulaMode::AsDerived,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaMode::AsDerived => "derived",
            FormulaMode::AsPrinted => "printed",
        }
    }
}

impl fmt::Display for FormulaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "derived" | "as-derived" | "asderived" => Ok(FormulaMode::AsDerived),
            "printed" | "as-printed" | "asprinted" => Ok(FormulaMode::AsPrinted),
            other => Err(format!("unknown formula mode `{other}` (expected derived|printed)")),
        }
    }
}

/// Power split, transmit SNR and fading statistics of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    alpha: f64,
    rho_s: f64,
    profile: FadingProfile,
}

impl OperatingPoint {
    /// `rho_s` is the linear transmit SNR `P_s / N_0`.
    pub fn new(alpha: f64, rho_s: f64, profile: FadingProfile) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(domain("alpha", alpha, "(0, 0.5)"));
        }
        if !(rho_s > 0.0 && rho_s.is_finite()) {
            return Err(domain("rho_s", rho_s, "(0, inf)"));
        }
        Ok(OperatingPoint {
            alpha,
            rho_s,
            profile,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho_s(&self) -> f64 {
        self.rho_s
    }

    pub fn profile(&self) -> &FadingProfile {
        &self.profile
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.rho_s, self.profile)
    }
}

/// Superposition energy factors `(β₁, β₂)` for the aligned and opposed
/// symbol pairs.
pub fn beta_coeffs(alpha: f64, mode: FormulaMode) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(domain("alpha", alpha, "(0, 0.5)"));
    }
    let r = (alpha - alpha * alpha).sqrt();
    let spread = match mode {
        FormulaMode::AsDerived => 2.0 * r,
        FormulaMode::AsPrinted => r,
    };
    Ok((1.0 + spread, 1.0 - spread))
}

/// Unclamped average error probability of the far-symbol detector on a
/// channel with mean power `sigma_sq`.
fn far_symbol_raw(pt: &OperatingPoint, mode: FormulaMode, sigma_sq: f64, sic_form: bool) -> f64 {
    let (b1, b2) = beta_coeffs(pt.alpha, mode).expect("alpha validated by OperatingPoint");
    let rho = pt.rho_s;
    let d2 = pt.profile.delta_sq();
    [b1, b2]
        .into_iter()
        .map(|beta| match mode {
            FormulaMode::AsDerived => {
                let c = beta * rho / (beta * d2 * rho + 1.0);
                0.5 * half_tail_avg(c * sigma_sq)
            }
            FormulaMode::AsPrinted => {
                // the P_SIC expression carries an extra σ₁² in its denominator
                let denom = if sic_form {
                    beta * d2 * rho * sigma_sq + 1.0
                } else {
                    beta * d2 * rho + 1.0
                };
                0.25 * (1.0 - (beta * rho * sigma_sq / denom).sqrt())
            }
        })
        .sum()
}

fn near_correct_raw(pt: &OperatingPoint, mode: FormulaMode) -> f64 {
    let rho = pt.rho_s;
    let d2 = pt.profile.delta_sq();
    let s1 = pt.profile.sigma1_sq();
    match mode {
        FormulaMode::AsDerived => {
            let c = pt.alpha * rho / (d2 * rho + 1.0);
            half_tail_avg(c * s1)
        }
        FormulaMode::AsPrinted => 0.5 * (1.0 - (pt.alpha * rho * s1 / (d2 * rho + 1.0)).sqrt()),
    }
}

fn settle(raw: f64) -> (Probability, bool) {
    Probability::clamp_into(raw, 0.0, 0.5)
}

/// Far-user ABEP `P₂(e)`.
pub fn abep_far(pt: &OperatingPoint, mode: FormulaMode) -> Result<Probability> {
    Ok(settle(far_symbol_raw(pt, mode, pt.profile.sigma2_sq(), false)).0)
}

/// Probability that the near user decides the far symbol wrongly, `P_SIC`.
pub fn p_sic(pt: &OperatingPoint, mode: FormulaMode) -> Result<Probability> {
    Ok(settle(far_symbol_raw(pt, mode, pt.profile.sigma1_sq(), true)).0)
}

/// Near-user ABEP given a correct SIC stage, `P₁(e|correct)`.
pub fn abep_near_correct(pt: &OperatingPoint, mode: FormulaMode) -> Result<Probability> {
    Ok(settle(near_correct_raw(pt, mode)).0)
}

/// Near-user ABEP `P₁(e) = ½·P_SIC + (1 − P_SIC)·P₁(e|correct)`.
pub fn abep_near(pt: &OperatingPoint, mode: FormulaMode) -> Result<Probability> {
    let ps = p_sic(pt, mode)?.value();
    let pc = abep_near_correct(pt, mode)?.value();
    Ok(settle(compose_near(ps, pc)).0)
}

#[inline]
fn compose_near(p_sic: f64, p1_correct: f64) -> f64 {
    0.5 * p_sic + (1.0 - p_sic) * p1_correct
}

/// Proportional-fairness index `p1 / p2`. Values `κ` and `1/κ` describe the
/// same imbalance with the users swapped.
pub fn pf_index(p1: Probability, p2: Probability) -> Result<f64> {
    if !(p2.value() > 0.0) {
        return Err(domain("p2", p2.value(), "(0, 1]"));
    }
    Ok(p1.value() / p2.value())
}

/// Every analytic quantity at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbepBreakdown {
    pub mode: FormulaMode,
    /// Far-user ABEP.
    pub p2: Probability,
    /// Far-symbol error probability at the near user.
    pub p_sic: Probability,
    pub p1_correct: Probability,
    /// Near-user ABEP.
    pub p1: Probability,
    /// `p1 / p2`; `None` when `p2` is zero (only possible after clamping).
    pub pf: Option<f64>,
    /// Set when any printed expression left `[0, ½]` and was clamped.
    pub clamped: bool,
}

impl AbepBreakdown {
    pub fn evaluate(pt: &OperatingPoint, mode: FormulaMode) -> Self {
        let (p2, c2) = settle(far_symbol_raw(pt, mode, pt.profile.sigma2_sq(), false));
        let (p_sic, cs) = settle(far_symbol_raw(pt, mode, pt.profile.sigma1_sq(), true));
        let (p1_correct, cc) = settle(near_correct_raw(pt, mode));
        let (p1, c1) = settle(compose_near(p_sic.value(), p1_correct.value()));
        AbepBreakdown {
            mode,
            p2,
            p_sic,
            p1_correct,
            p1,
            pf: pf_index(p1, p2).ok(),
            clamped: c2 || cs || cc || c1,
        }
    }

    /// `max(p1, p2)`, the min-max allocation objective.
    pub fn worst(&self) -> f64 {
        self.p1.value().max(self.p2.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::db_to_linear;

    fn point(alpha: f64, rho_db: f64, s1_db: f64, s2_db: f64, delta: f64) -> OperatingPoint {
        let profile = FadingProfile::from_db(s1_db, s2_db, delta).unwrap();
        OperatingPoint::new(alpha, db_to_linear(rho_db), profile).unwrap()
    }

    #[test]
    fn beta_values() {
        let (b1, b2) = beta_coeffs(0.2, FormulaMode::AsDerived).unwrap();
        assert!((b1 - 1.8).abs() < 1e-15 && (b2 - 0.2).abs() < 1e-15);
        let (b1, b2) = beta_coeffs(0.2, FormulaMode::AsPrinted).unwrap();
        assert!((b1 - 1.4).abs() < 1e-15 && (b2 - 0.6).abs() < 1e-15);
        // squared amplitudes of the aligned and opposed pairs
        let a = 0.2f64;
        let (b1, b2) = beta_coeffs(a, FormulaMode::AsDerived).unwrap();
        assert!((b1 - ((1.0 - a).sqrt() + a.sqrt()).powi(2)).abs() < 1e-14);
        assert!((b2 - ((1.0 - a).sqrt() - a.sqrt()).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn beta_rejects_out_of_range() {
        for a in [0.0, 0.5, -0.1, 0.7, f64::NAN] {
            assert!(beta_coeffs(a, FormulaMode::AsDerived).is_err());
        }
    }

    #[test]
    fn far_reference_value() {
        // mpmath quadrature of ½Σ E[Q(√(2β_k ρ γ))], γ ~ Exp(1): 0.05254372307192468...
        let pt = point(0.2, 10.0, 10.0, 0.0, 0.0);
        let v = abep_far(&pt, FormulaMode::AsDerived).unwrap().value();
        assert!((v / 0.05254372307192468 - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn perfect_csi_far_reduction() {
        let pt = point(0.3, 15.0, 10.0, 0.0, 0.0);
        let rho = pt.rho_s();
        let (b1, b2) = beta_coeffs(0.3, FormulaMode::AsDerived).unwrap();
        let expected: f64 = [b1, b2]
            .iter()
            .map(|b| {
                let x = b * rho;
                0.25 * (1.0 - (x / (1.0 + x)).sqrt())
            })
            .sum();
        let v = abep_far(&pt, FormulaMode::AsDerived).unwrap().value();
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn far_error_floor() {
        // ρ → ∞ with δ = 0.1, σ₂² = 1: ½(1 − √(1/1.01)) = 0.0024814048950054...
        let pt = point(0.2, 200.0, 10.0, 0.0, 0.1);
        let v = abep_far(&pt, FormulaMode::AsDerived).unwrap().value();
        assert!((v - 0.0024814048950054).abs() < 1e-9, "{v}");
    }

    #[test]
    fn sic_reference_value_and_ordering() {
        // mpmath: 0.006716546019916593...
        let pt = point(0.2, 10.0, 10.0, 0.0, 0.0);
        let v = p_sic(&pt, FormulaMode::AsDerived).unwrap().value();
        assert!((v / 0.006716546019916593 - 1.0).abs() < 1e-12, "{v}");

        for &alpha in &[0.05, 0.2, 0.45] {
            for &rho in &[0.0, 10.0, 30.0] {
                for &d in &[0.0, 0.05, 0.2] {
                    let pt = point(alpha, rho, 10.0, 0.0, d);
                    let sic = p_sic(&pt, FormulaMode::AsDerived).unwrap();
                    let far = abep_far(&pt, FormulaMode::AsDerived).unwrap();
                    assert!(sic < far);
                }
            }
        }
    }

    #[test]
    fn equal_channels_make_sic_equal_far() {
        let pt = point(0.25, 20.0, 3.0, 3.0, 0.05);
        assert_eq!(
            p_sic(&pt, FormulaMode::AsDerived).unwrap(),
            abep_far(&pt, FormulaMode::AsDerived).unwrap()
        );
    }

    #[test]
    fn near_correct_reference_and_floor() {
        // mpmath: 0.0004369266173720878...
        let pt = point(0.2, 30.0, 10.0, 0.0, 0.05);
        let v = abep_near_correct(&pt, FormulaMode::AsDerived).unwrap().value();
        assert!((v / 0.0004369266173720878 - 1.0).abs() < 1e-12, "{v}");

        let (a, s1, d2): (f64, f64, f64) = (0.2, 10.0, 0.01);
        let floor = 0.5 * (1.0 - (a * s1 / (a * s1 + d2)).sqrt());
        let pt = point(a, 250.0, 10.0, 0.0, 0.1);
        let v = abep_near_correct(&pt, FormulaMode::AsDerived).unwrap().value();
        assert!((v - floor).abs() < 1e-10, "{v} vs {floor}");
    }

    #[test]
    fn near_correct_monotone() {
        let mut last = 1.0;
        for i in 1..50 {
            let pt = point(i as f64 * 0.01, 20.0, 10.0, 0.0, 0.05);
            let v = abep_near_correct(&pt, FormulaMode::AsDerived).unwrap().value();
            assert!(v < last);
            last = v;
        }
        let mut last = 1.0;
        for db in 0..40 {
            let pt = point(0.2, db as f64, 10.0, 0.0, 0.05);
            let v = abep_near_correct(&pt, FormulaMode::AsDerived).unwrap().value();
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn composition_limits() {
        let pc = 0.01;
        assert_eq!(compose_near(0.0, pc), pc);
        assert!((compose_near(0.5, pc) - (0.25 + 0.5 * pc)).abs() < 1e-15);
    }

    #[test]
    fn breakdown_is_consistent() {
        let pt = point(0.2, 30.0, 10.0, 0.0, 0.05);
        let b = AbepBreakdown::evaluate(&pt, FormulaMode::AsDerived);
        assert!(!b.clamped);
        assert_eq!(b.p2, abep_far(&pt, FormulaMode::AsDerived).unwrap());
        assert_eq!(b.p1, abep_near(&pt, FormulaMode::AsDerived).unwrap());
        let composed = 0.5 * b.p_sic.value() + (1.0 - b.p_sic.value()) * b.p1_correct.value();
        assert!((b.p1.value() - composed).abs() < 1e-12);
        assert_eq!(b.pf, Some(b.p1.value() / b.p2.value()));
    }

    #[test]
    fn printed_mode_clamps_and_reports() {
        // at 30 dB the printed far-user radicand exceeds one
        let pt = point(0.2, 30.0, 10.0, 0.0, 0.0);
        let b = AbepBreakdown::evaluate(&pt, FormulaMode::AsPrinted);
        assert!(b.clamped);
        assert_eq!(b.p2.value(), 0.0);
        assert_eq!(b.pf, None);
        // at low SNR the printed expressions stay in range
        let pt = point(0.2, -20.0, 0.0, 0.0, 0.0);
        let b = AbepBreakdown::evaluate(&pt, FormulaMode::AsPrinted);
        assert!(!b.clamped);
    }

    #[test]
    fn printed_far_literal() {
        let pt = point(0.2, -10.0, 0.0, 0.0, 0.1);
        let rho: f64 = 0.1;
        let expected: f64 = [1.4f64, 0.6]
            .iter()
            .map(|b| 0.25 * (1.0 - (b * rho / (b * 0.01 * rho + 1.0)).sqrt()))
            .sum();
        let v = abep_far(&pt, FormulaMode::AsPrinted).unwrap().value();
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn pf_index_cases() {
        let p = |v| Probability::new(v).unwrap();
        assert_eq!(pf_index(p(0.01), p(0.01)).unwrap(), 1.0);
        assert!((pf_index(p(0.856e-2), p(0.1e-2)).unwrap() - 8.56).abs() < 1e-12);
        let k = pf_index(p(0.03), p(0.007)).unwrap() * pf_index(p(0.007), p(0.03)).unwrap();
        assert!((k - 1.0).abs() < 1e-15);
        assert!(pf_index(p(0.1), p(0.0)).is_err());
    }

    #[test]
    fn far_abep_nondecreasing_in_alpha() {
        let mut last = 0.0;
        for k in 1..=9 {
            let pt = point(0.05 * k as f64, 30.0, 10.0, 0.0, 0.0);
            let v = abep_far(&pt, FormulaMode::AsDerived).unwrap().value();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("derived".parse::<FormulaMode>().unwrap(), FormulaMode::AsDerived);
        assert_eq!("Printed".parse::<FormulaMode>().unwrap(), FormulaMode::AsPrinted);
        assert!("exact".parse::<FormulaMode>().is_err());
    }
}
