//! Splits the near user's errors by what happened in the SIC stage.

use noma_linklab::analytic::{AbepBreakdown, FormulaMode, OperatingPoint};
use noma_linklab::channel::{db_to_linear, FadingProfile};
use noma_linklab::montecarlo::{run_point, SystemConfig};

fn main() -> noma_linklab::Result<()> {
    let profile = FadingProfile::from_db(10.0, 0.0, 0.05)?;
    let pt = OperatingPoint::new(0.2, db_to_linear(20.0), profile)?;
    let est = run_point(&SystemConfig::new(pt, 2_000_000, 11)?)?;
    let b = AbepBreakdown::evaluate(&pt, FormulaMode::AsDerived);

    println!("SIC stage error      mc {:.4e}  closed form {:.4e}", est.ber_sic, b.p_sic.value());
    if let Some((p, se)) = est.ber_ue1_given_sic_error() {
        println!("ber1 | SIC error     mc {p:.4e} ± {se:.1e}  model 0.5");
    }
    if let Some((p, se)) = est.ber_ue1_given_sic_correct() {
        println!("ber1 | SIC correct   mc {p:.4e} ± {se:.1e}");
    }
    // the conditional rate above favours good channels; cancelling the true
    // far symbol gives the rate the closed form describes
    println!(
        "ber1 genie cancel    mc {:.4e} ± {:.1e}  closed form {:.4e}",
        est.ber_ue1_genie,
        est.stderr_ue1_genie,
        b.p1_correct.value()
    );
    println!("ber1 overall         mc {:.4e}  closed form {:.4e}", est.ber_ue1, b.p1.value());
    Ok(())
}
