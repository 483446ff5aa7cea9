//! Runs the `sweep-snr` and `validate` commands from a scenario file.
//!
//! ```text
//! cargo run --example config_scenario -- [config] [out-dir]
//! ```

use std::path::PathBuf;

use noma_linklab::cli::{self, parse_config, SweepAxis};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/scenario.conf"));
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("noma-linklab-scenario"));

    let spec = parse_config(&config)?;
    print!("{}", spec.to_config_string());

    let sweep = cli::sweep(&spec, SweepAxis::Snr, &out, true)?;
    let check = cli::validate(&spec, &out, true)?;
    for f in sweep.files.iter().chain(&check.files) {
        println!("wrote {}", f.display());
    }
    for line in sweep.summary.iter().chain(&check.summary) {
        println!("{line}");
    }
    for n in &check.notes {
        println!("note: {n}");
    }
    Ok(())
}
