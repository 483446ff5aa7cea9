//! BPSK superposition coding and the two receivers.
//!
//! The far user runs a single ML detector on its own symbol, treating the
//! near user's signal as noise. The near user runs SIC: it detects the far
//! symbol with the same detector, subtracts it using its channel estimate and
//! detects its own symbol from the residual. All detectors see `ĥ`, never `h`.

use rand::Rng;

use crate::channel::ChannelRealization;
use crate::error::{domain, Result};
use crate::mathkit::{ComplexGaussian, ComplexSample};

/// BPSK constellation in bit order: bit 0 → +1, bit 1 → −1.
const BPSK: [(bool, f64); 2] = [(false, 1.0), (true, -1.0)];

/// Power-allocation coefficient and total transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    alpha: f64,
    ps: f64,
}

impl PowerSplit {
    /// `alpha` is the near user's share and must lie in `(0, 0.5)` so the far
    /// symbol stays dominant and SIC order is well defined.
    pub fn new(alpha: f64, ps: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(domain("alpha", alpha, "(0, 0.5)"));
        }
        if !(ps > 0.0 && ps.is_finite()) {
            return Err(domain("ps", ps, "(0, inf)"));
        }
        Ok(PowerSplit { alpha, ps })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ps(&self) -> f64 {
        self.ps
    }

    /// `sqrt(alpha · ps)`
    pub fn near_amplitude(&self) -> f64 {
        (self.alpha * self.ps).sqrt()
    }

    /// `sqrt((1 − alpha) · ps)`
    pub fn far_amplitude(&self) -> f64 {
        ((1.0 - self.alpha) * self.ps).sqrt()
    }
}

/// Data bits of one channel use; `true` is bit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitPair {
    pub b1: bool,
    pub b2: bool,
}

impl BitPair {
    pub const ALL: [BitPair; 4] = [
        BitPair { b1: false, b2: false },
        BitPair { b1: false, b2: true },
        BitPair { b1: true, b2: false },
        BitPair { b1: true, b2: true },
    ];

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        BitPair {
            b1: rng.random(),
            b2: rng.random(),
        }
    }
}

#[inline]
pub fn bpsk_map(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

/// Superposition-coded transmit amplitude `sqrt(ps)(sqrt(alpha) x1 + sqrt(1 − alpha) x2)`.
#[inline]
pub fn superpose(x1: f64, x2: f64, split: &PowerSplit) -> f64 {
    split.near_amplitude() * x1 + split.far_amplitude() * x2
}

/// Received sample `composite · h + n` with `n ~ CN(0, n0)`. The true channel
/// multiplies the signal.
pub fn receive<R: Rng + ?Sized>(
    composite: f64,
    ch: &ChannelRealization,
    n0: f64,
    rng: &mut R,
) -> Result<ComplexSample> {
    if !(n0 > 0.0) {
        return Err(domain("n0", n0, "(0, inf)"));
    }
    let noise = ComplexGaussian::new(n0)?;
    Ok(ch.h * composite + noise.sample(rng))
}

/// Two-point ML decision `argmin_x |y − amplitude · x · ĥ|²` over BPSK.
/// Exact ties resolve to bit 0.
#[inline]
pub fn ml_detect(y: ComplexSample, h_hat: ComplexSample, amplitude: f64) -> bool {
    let mut best = (false, f64::INFINITY);
    for (bit, x) in BPSK {
        let metric = (y - h_hat * (amplitude * x)).norm_sqr();
        if metric < best.1 {
            best = (bit, metric);
        }
    }
    best.0
}

/// Far-user detection of its own symbol with the far-user estimate `ĥ₂`.
#[inline]
pub fn ml_detect_far(y: ComplexSample, h_hat: ComplexSample, split: &PowerSplit) -> bool {
    ml_detect(y, h_hat, split.far_amplitude())
}

/// Removes the re-modulated far symbol from `y` using the estimate `ĥ₁`.
#[inline]
pub fn sic_cancel(
    y: ComplexSample,
    h_hat: ComplexSample,
    b2_hat: bool,
    split: &PowerSplit,
) -> ComplexSample {
    y - h_hat * (split.far_amplitude() * bpsk_map(b2_hat))
}

/// Outcome of the near user's SIC chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SicDecision {
    /// Far-user bit as decided at the near user (first stage).
    pub b2_hat: bool,
    /// Near-user bit decided on the residual.
    pub b1_hat: bool,
}

/// Near-user SIC: far-symbol decision, cancellation, own-symbol decision.
#[inline]
pub fn sic_detect_near(y: ComplexSample, h_hat: ComplexSample, split: &PowerSplit) -> SicDecision {
    let b2_hat = ml_detect_far(y, h_hat, split);
    let residual = sic_cancel(y, h_hat, b2_hat, split);
    let b1_hat = ml_detect(residual, h_hat, split.near_amplitude());
    SicDecision { b2_hat, b1_hat }
}
