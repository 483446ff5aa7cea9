//! With estimation error the BER stops falling at high SNR. Compares a
//! 60 dB simulation to the limiting closed forms.

use noma_linklab::analytic::{AbepBreakdown, FormulaMode, OperatingPoint};
use noma_linklab::channel::{db_to_linear, FadingProfile};
use noma_linklab::montecarlo::{run_point, SystemConfig};

fn main() -> noma_linklab::Result<()> {
    let profile = FadingProfile::from_db(10.0, 0.0, 0.1)?;
    for snr_db in [20.0, 40.0, 60.0, 80.0] {
        let pt = OperatingPoint::new(0.2, db_to_linear(snr_db), profile)?;
        let b = AbepBreakdown::evaluate(&pt, FormulaMode::AsDerived);
        println!("{snr_db:>4} dB  p1 {:.5e}  p2 {:.5e}", b.p1.value(), b.p2.value());
    }

    let pt = OperatingPoint::new(0.2, db_to_linear(60.0), profile)?;
    let est = run_point(&SystemConfig::new(pt, 1_000_000, 3)?)?;
    println!(
        "60 dB simulated  ber1 {:.5e} ± {:.1e}  ber2 {:.5e} ± {:.1e}",
        est.ber_ue1, est.stderr_ue1, est.ber_ue2, est.stderr_ue2
    );
    Ok(())
}
