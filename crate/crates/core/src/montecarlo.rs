//! Deterministic parallel Monte Carlo over the full transceiver chain.
//!
//! Trials are cut into fixed-size blocks. Block `i` draws from a ChaCha8
//! stream seeded with the configured seed and stream id `i`, so every block
//! sees the same random numbers no matter which worker runs it. Block counts
//! are reduced in block order. Results are therefore a function of
//! `(config, seed, block_size)` only.
//!
//! Noise power is normalised to `N0 = 1`, so the transmit power equals `rho_s`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::{AbepBreakdown, FormulaMode, OperatingPoint};
use crate::channel::UserChannel;
use crate::error::{domain, Error, Result};
use crate::mathkit::ComplexGaussian;
use crate::phy::{bpsk_map, ml_detect, ml_detect_far, sic_cancel, sic_detect_near, superpose, BitPair, PowerSplit};

pub const DEFAULT_BLOCK_SIZE: u64 = 10_000;
/// Points with fewer error events than this are flagged low-confidence.
pub const MIN_ERROR_EVENTS: u64 = 100;
/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "NOMA_LINKLAB_WORKERS";

/// Everything needed to simulate one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub point: OperatingPoint,
    pub n_trials: u64,
    pub seed: u64,
    pub block_size: u64,
    /// Formula variant used for the companion analytic evaluation.
    pub mode: FormulaMode,
}

impl SystemConfig {
    /// Uses [`DEFAULT_BLOCK_SIZE`], capped at `n_trials`.
    pub fn new(point: OperatingPoint, n_trials: u64, seed: u64) -> Result<Self> {
        Self::with_block_size(point, n_trials, seed, DEFAULT_BLOCK_SIZE.min(n_trials.max(1)))
    }

    pub fn with_block_size(
        point: OperatingPoint,
        n_trials: u64,
        seed: u64,
        block_size: u64,
    ) -> Result<Self> {
        let cfg = SystemConfig {
            point,
            n_trials,
            seed,
            block_size,
            mode: FormulaMode::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_mode(mut self, mode: FormulaMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(domain("n_trials", 0.0, "[1, inf)"));
        }
        if self.block_size == 0 || self.block_size > self.n_trials {
            return Err(domain("block_size", self.block_size as f64, "[1, n_trials]"));
        }
        Ok(())
    }

    fn n_blocks(&self) -> u64 {
        self.n_trials.div_ceil(self.block_size)
    }
}

/// Raw error counters accumulated over trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorCounts {
    pub trials: u64,
    pub ue1: u64,
    pub ue2: u64,
    /// Far-symbol decision errors at the near user.
    pub sic_stage: u64,
    /// Near-user bit errors in trials whose SIC stage failed.
    pub ue1_after_sic_error: u64,
    /// Near-user bit errors after cancelling the true far symbol.
    pub ue1_genie: u64,
}

impl ErrorCounts {
    fn checked_add(self, other: ErrorCounts) -> Result<ErrorCounts> {
        let overflow = || Error::CounterOverflow {
            trials: self.trials.saturating_add(other.trials),
        };
        Ok(ErrorCounts {
            trials: self.trials.checked_add(other.trials).ok_or_else(overflow)?,
            ue1: self.ue1.checked_add(other.ue1).ok_or_else(overflow)?,
            ue2: self.ue2.checked_add(other.ue2).ok_or_else(overflow)?,
            sic_stage: self.sic_stage.checked_add(other.sic_stage).ok_or_else(overflow)?,
            ue1_after_sic_error: self
                .ue1_after_sic_error
                .checked_add(other.ue1_after_sic_error)
                .ok_or_else(overflow)?,
            ue1_genie: self.ue1_genie.checked_add(other.ue1_genie).ok_or_else(overflow)?,
        })
    }
}

/// Simulated error rates with binomial standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub errors_ue1: u64,
    pub errors_ue2: u64,
    pub errors_sic_stage: u64,
    pub errors_ue1_after_sic_error: u64,
    /// Near-user errors of a genie-aided stage that cancels the true far
    /// symbol; estimates the correct-SIC error probability without the
    /// selection bias of conditioning on a correct SIC decision.
    pub errors_ue1_genie: u64,
    pub trials: u64,
    pub ber_ue1: f64,
    pub ber_ue2: f64,
    pub ber_sic: f64,
    pub stderr_ue1: f64,
    pub stderr_ue2: f64,
    pub stderr_sic: f64,
    pub ber_ue1_genie: f64,
    pub stderr_ue1_genie: f64,
}

fn rate(errors: u64, trials: u64) -> (f64, f64) {
    let p = errors as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

impl BerEstimate {
    pub fn from_counts(c: &ErrorCounts) -> Self {
        let (ber_ue1, stderr_ue1) = rate(c.ue1, c.trials);
        let (ber_ue2, stderr_ue2) = rate(c.ue2, c.trials);
        let (ber_sic, stderr_sic) = rate(c.sic_stage, c.trials);
        let (ber_ue1_genie, stderr_ue1_genie) = rate(c.ue1_genie, c.trials);
        BerEstimate {
            errors_ue1: c.ue1,
            errors_ue2: c.ue2,
            errors_sic_stage: c.sic_stage,
            errors_ue1_after_sic_error: c.ue1_after_sic_error,
            errors_ue1_genie: c.ue1_genie,
            trials: c.trials,
            ber_ue1,
            ber_ue2,
            ber_sic,
            stderr_ue1,
            stderr_ue2,
            stderr_sic,
            ber_ue1_genie,
            stderr_ue1_genie,
        }
    }

    /// Near-user BER restricted to trials where the SIC stage failed.
    pub fn ber_ue1_given_sic_error(&self) -> Option<(f64, f64)> {
        (self.errors_sic_stage > 0).then(|| rate(self.errors_ue1_after_sic_error, self.errors_sic_stage))
    }

    /// Near-user BER restricted to trials where the SIC stage succeeded.
    pub fn ber_ue1_given_sic_correct(&self) -> Option<(f64, f64)> {
        let trials = self.trials - self.errors_sic_stage;
        let errors = self.errors_ue1 - self.errors_ue1_after_sic_error;
        (trials > 0).then(|| rate(errors, trials))
    }

    pub fn low_confidence_ue1(&self) -> bool {
        self.errors_ue1 < MIN_ERROR_EVENTS
    }

    pub fn low_confidence_ue2(&self) -> bool {
        self.errors_ue2 < MIN_ERROR_EVENTS
    }

    pub fn low_confidence_sic(&self) -> bool {
        self.errors_sic_stage < MIN_ERROR_EVENTS
    }

    /// Either user has fewer than [`MIN_ERROR_EVENTS`] errors.
    pub fn low_confidence(&self) -> bool {
        self.low_confidence_ue1() || self.low_confidence_ue2()
    }

    /// Simulated PF index `ber_ue1 / ber_ue2`, if the far user saw any error.
    pub fn pf_index(&self) -> Option<f64> {
        (self.errors_ue2 > 0).then(|| self.ber_ue1 / self.ber_ue2)
    }
}

/// Per-trial samplers built once per point.
struct Link {
    split: PowerSplit,
    near: UserChannel,
    far: UserChannel,
    noise: ComplexGaussian,
}

impl Link {
    fn new(pt: &OperatingPoint) -> Result<Self> {
        let profile = pt.profile();
        Ok(Link {
            split: PowerSplit::new(pt.alpha(), pt.rho_s())?,
            near: UserChannel::new(profile.sigma1_sq(), profile.delta_sq())?,
            far: UserChannel::new(profile.sigma2_sq(), profile.delta_sq())?,
            noise: ComplexGaussian::new(1.0)?,
        })
    }

    fn run_block(&self, seed: u64, block: u64, trials: u64) -> ErrorCounts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        let mut c = ErrorCounts {
            trials,
            ..ErrorCounts::default()
        };
        for _ in 0..trials {
            let bits = BitPair::random(&mut rng);
            let s = superpose(bpsk_map(bits.b1), bpsk_map(bits.b2), &self.split);

            let ch1 = self.near.draw(&mut rng);
            let y1 = ch1.h * s + self.noise.sample(&mut rng);
            let ch2 = self.far.draw(&mut rng);
            let y2 = ch2.h * s + self.noise.sample(&mut rng);

            let near = sic_detect_near(y1, ch1.h_hat, &self.split);
            let far_hat = ml_detect_far(y2, ch2.h_hat, &self.split);

            let sic_err = near.b2_hat != bits.b2;
            let ue1_err = near.b1_hat != bits.b1;
            c.sic_stage += u64::from(sic_err);
            c.ue1 += u64::from(ue1_err);
            c.ue1_after_sic_error += u64::from(sic_err && ue1_err);
            c.ue2 += u64::from(far_hat != bits.b2);

            let genie = sic_cancel(y1, ch1.h_hat, bits.b2, &self.split);
            c.ue1_genie += u64::from(ml_detect(genie, ch1.h_hat, self.split.near_amplitude()) != bits.b1);
        }
        c
    }
}

/// Simulates one operating point on the current rayon pool.
pub fn run_point(cfg: &SystemConfig) -> Result<BerEstimate> {
    cfg.validate()?;
    let link = Link::new(&cfg.point)?;
    let n_blocks = cfg.n_blocks();
    let blocks: Vec<ErrorCounts> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * cfg.block_size;
            let len = cfg.block_size.min(cfg.n_trials - start);
            link.run_block(cfg.seed, b, len)
        })
        .collect();
    let total = blocks
        .into_iter()
        .try_fold(ErrorCounts::default(), ErrorCounts::checked_add)?;
    Ok(BerEstimate::from_counts(&total))
}

/// Simulation and analytic evaluation of one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub ber: BerEstimate,
    /// Closed forms in the configured mode.
    pub analytic: AbepBreakdown,
    /// Closed forms in the other mode.
    pub alternate: AbepBreakdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub config: SystemConfig,
    pub outcome: Result<PointResult>,
}

/// Runs every point in order. A failing point carries its error and does not
/// stop the rest of the grid.
pub fn run_grid(points: &[SystemConfig]) -> Result<Vec<GridPoint>> {
    if points.is_empty() {
        return Err(Error::EmptyGrid("operating point"));
    }
    Ok(points
        .iter()
        .map(|cfg| GridPoint {
            config: *cfg,
            outcome: run_point(cfg).map(|ber| PointResult {
                ber,
                analytic: AbepBreakdown::evaluate(&cfg.point, cfg.mode),
                alternate: AbepBreakdown::evaluate(&cfg.point, cfg.mode.other()),
            }),
        })
        .collect())
}

/// Worker count requested through [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<R, F>(workers: usize, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::WorkerPool(e.to_string()))?;
    Ok(pool.install(f))
}
