//! Regenerates one of the four figure data sets at reduced trial count.
//!
//! ```text
//! cargo run --release --example reproduce_figure -- [figure] [trials]
//! ```

use noma_linklab::cli::config::SweepSpec;
use noma_linklab::cli::{figure_spec, reproduce_figure};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: u8 = args.next().map_or(Ok(2), |s| s.parse())?;
    let trials = args.next().unwrap_or_else(|| "1e5".into());

    // the preset with the trial count swapped
    let preset = figure_spec(n)?;
    let spec = SweepSpec::parse_with_overrides(&preset.to_config_string(), &[("trials".into(), trials)])?;
    let out = std::env::temp_dir().join(format!("noma-linklab-fig{n}"));

    let report = reproduce_figure(n, &spec, &out, true)?;
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    for n in &report.notes {
        println!("note: {n}");
    }
    Ok(())
}
