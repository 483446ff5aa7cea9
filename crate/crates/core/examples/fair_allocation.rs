//! Min-max power allocation: the α that equalises the two users, against fixed splits.

use noma_linklab::analytic::FormulaMode;
use noma_linklab::channel::{db_to_linear, FadingProfile};
use noma_linklab::poweropt::{fairness_sweep, optimize_alpha, DEFAULT_TOL};

fn main() -> noma_linklab::Result<()> {
    let profile = FadingProfile::from_db(0.0, 0.0, 0.05)?;
    let r = optimize_alpha(db_to_linear(20.0), &profile, FormulaMode::AsDerived, DEFAULT_TOL)?;
    println!(
        "20 dB: alpha* {:.4}  p1 {:.4e}  p2 {:.4e}  crossing {}  {} iterations",
        r.alpha_star,
        r.p1_at_star.value(),
        r.p2_at_star.value(),
        r.crossing,
        r.iterations
    );

    let rho: Vec<f64> = [10.0, 20.0, 30.0].iter().map(|&db| db_to_linear(db)).collect();
    let rows = fairness_sweep(&rho, &profile, &[0.0, 0.05], &[0.1, 0.2], FormulaMode::AsDerived)?;
    println!("{:>5} {:>5} {:>10} {:>10} {:>10} {:>8}", "snr", "delta", "pf a=0.1", "pf a=0.2", "pf a*", "a*");
    for row in rows {
        let fixed: Vec<String> = row
            .fixed
            .iter()
            .map(|(_, b)| match b.as_ref().ok().and_then(|b| b.pf) {
                Some(pf) => format!("{pf:.3}"),
                None => "-".into(),
            })
            .collect();
        let opt = row.optimized.as_ref().ok();
        println!(
            "{:>5.0} {:>5} {:>10} {:>10} {:>10} {:>8}",
            10.0 * row.rho_s.log10(),
            row.delta,
            fixed[0],
            fixed[1],
            opt.and_then(|o| o.pf_at_star).map_or("-".into(), |v| format!("{v:.3}")),
            opt.map_or("-".into(), |o| format!("{:.4}", o.alpha_star))
        );
    }
    Ok(())
}
