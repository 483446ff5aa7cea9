//! Closed-form error probabilities at one operating point, in both formula variants.

use noma_linklab::analytic::{AbepBreakdown, FormulaMode, OperatingPoint};
use noma_linklab::channel::{db_to_linear, FadingProfile};

fn main() -> noma_linklab::Result<()> {
    // near user 10 dB stronger than the far user, 5% estimation error
    let profile = FadingProfile::from_db(10.0, 0.0, 0.05)?;

    println!("{:>6} {:>6} {:>8} {:>12} {:>12} {:>12} {:>8}", "snr", "alpha", "mode", "p1", "p2", "p_sic", "pf");
    for snr_db in [10.0, 20.0, 30.0, 40.0] {
        let pt = OperatingPoint::new(0.2, db_to_linear(snr_db), profile)?;
        for mode in [FormulaMode::AsDerived, FormulaMode::AsPrinted] {
            let b = AbepBreakdown::evaluate(&pt, mode);
            let pf = b.pf.map_or("-".to_string(), |v| format!("{v:.3}"));
            let flag = if b.clamped { " (clamped)" } else { "" };
            println!(
                "{snr_db:>6} {:>6} {:>8} {:>12.4e} {:>12.4e} {:>12.4e} {pf:>8}{flag}",
                pt.alpha(),
                mode,
                b.p1.value(),
                b.p2.value(),
                b.p_sic.value()
            );
        }
    }
    Ok(())
}
