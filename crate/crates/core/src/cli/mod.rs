//! Batch front end: config files, sweeps, CSV and SVG output, figure presets.
//!
//! ```text
//! noma-linklab <command> --config <path> --out <dir> [--trials N] [--seed S]
//!              [--mode derived|printed] [--overwrite] [--figure N]
//! ```
//!
//! `reproduce-figure` takes `--figure N` and ignores `--config`. The worker
//! count comes from `NOMA_LINKLAB_WORKERS`; it never changes the numbers.

pub mod commands;
pub mod config;
pub mod csv;
pub mod figures;
pub mod plot;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::analytic::FormulaMode;
use crate::montecarlo::{with_workers, workers_from_env};

pub use commands::{optimize, sweep, validate};
pub use config::{parse_config, ConfigError, Level, LevelList, SweepAxis, SweepSpec};
pub use csv::{emit_csv, OutputError, ResultRow};
pub use figures::{figure_spec, reproduce_figure};
pub use plot::{emit_plot, PlotSpec, Series, YScale};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error(transparent)]
    Sim(#[from] crate::Error),
    #[error("cannot create {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
    pub summary: Vec<String>,
    /// Failed validation checks and failed grid points.
    pub failures: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    SweepSnr,
    SweepAlpha,
    Optimize,
    Validate,
    ReproduceFigure,
}

#[derive(Debug, Parser)]
#[command(name = "noma-linklab", version, about = "Two-user downlink NOMA link simulator and BER analysis")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if absent.
    #[arg(long)]
    pub out: PathBuf,
    /// Trials per point; accepts `1e6`.
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<FormulaMode>,
    /// Replace existing output files.
    #[arg(long)]
    pub overwrite: bool,
    /// Figure number for `reproduce-figure` (1-4).
    #[arg(long)]
    pub figure: Option<u8>,
}

fn parse_mode(s: &str) -> Result<FormulaMode, String> {
    s.parse()
}

/// A resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub overrides: Vec<(String, String)>,
    pub figure: Option<u8>,
    pub overwrite: bool,
}

impl From<Args> for RunManifest {
    fn from(a: Args) -> Self {
        let mut overrides = Vec::new();
        if let Some(t) = a.trials {
            overrides.push(("trials".into(), t));
        }
        if let Some(s) = a.seed {
            overrides.push(("seed".into(), s.to_string()));
        }
        if let Some(m) = a.mode {
            overrides.push(("mode".into(), m.to_string()));
        }
        RunManifest {
            command: a.command,
            config: a.config,
            out_dir: a.out,
            overrides,
            figure: a.figure,
            overwrite: a.overwrite,
        }
    }
}

impl RunManifest {
    /// Effective sweep: the config file (or figure preset) with overrides applied.
    pub fn spec(&self) -> Result<SweepSpec, CliError> {
        if self.command == Command::ReproduceFigure {
            let n = self
                .figure
                .ok_or_else(|| CliError::Usage("reproduce-figure needs --figure N (1-4)".into()))?;
            let preset = figure_spec(n)?;
            return Ok(SweepSpec::parse_with_overrides(&preset.to_config_string(), &self.overrides)?);
        }
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command needs --config <path>".into()))?;
        Ok(config::parse_config_with_overrides(path, &self.overrides)?)
    }
}

/// Runs one command on the current thread pool.
pub fn run(m: &RunManifest) -> Result<RunReport, CliError> {
    let spec = m.spec()?;
    let out = &m.out_dir;
    match m.command {
        Command::SweepSnr => sweep(&spec, SweepAxis::Snr, out, m.overwrite),
        Command::SweepAlpha => sweep(&spec, SweepAxis::Alpha, out, m.overwrite),
        Command::Optimize => optimize(&spec, out, m.overwrite),
        Command::Validate => validate(&spec, out, m.overwrite),
        Command::ReproduceFigure => reproduce_figure(m.figure.unwrap_or(0), &spec, out, m.overwrite),
    }
}

/// Runs with the worker count from the environment, if any.
pub fn run_with_env_workers(m: &RunManifest) -> Result<RunReport, CliError> {
    match workers_from_env() {
        Some(n) => with_workers(n, || run(m))?,
        None => run(m),
    }
}

/// Binary entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let manifest = RunManifest::from(args);
    match run_with_env_workers(&manifest) {
        Ok(report) => {
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            for s in &report.summary {
                println!("{s}");
            }
            for n in &report.notes {
                eprintln!("note: {n}");
            }
            if report.failures > 0 {
                eprintln!("{} failure(s)", report.failures);
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
