//! Simulated BER against the closed forms over transmit SNR, several estimation errors.

use noma_linklab::analytic::{AbepBreakdown, FormulaMode, OperatingPoint};
use noma_linklab::channel::{db_to_linear, FadingProfile};
use noma_linklab::montecarlo::{run_grid, SystemConfig};

fn main() -> noma_linklab::Result<()> {
    let trials = 200_000;
    let mut configs = Vec::new();
    for delta in [0.0, 0.05, 0.1] {
        let profile = FadingProfile::from_db(10.0, 0.0, delta)?;
        for snr_db in (0..=40).step_by(10) {
            let pt = OperatingPoint::new(0.2, db_to_linear(snr_db as f64), profile)?;
            configs.push(SystemConfig::new(pt, trials, 1)?);
        }
    }

    // points run in parallel; results come back in input order
    let grid = run_grid(&configs)?;
    println!("{:>5} {:>5} {:>11} {:>11} {:>11} {:>11}", "delta", "snr", "ber1 mc", "p1", "ber2 mc", "p2");
    for gp in &grid {
        let pt = gp.config.point;
        let r = gp.outcome.as_ref().expect("valid point");
        let b = AbepBreakdown::evaluate(&pt, FormulaMode::AsDerived);
        println!(
            "{:>5} {:>5.0} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e}{}",
            pt.profile().delta(),
            10.0 * pt.rho_s().log10(),
            r.ber.ber_ue1,
            b.p1.value(),
            r.ber.ber_ue2,
            b.p2.value(),
            if r.ber.low_confidence() { "  low confidence" } else { "" }
        );
    }
    Ok(())
}
