//! Scalar kernels: the Gaussian tail function, its average over exponential
//! (Rayleigh-power) fading, and circularly-symmetric complex Gaussian draws.

use std::f64::consts::SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Result};

/// A complex baseband sample.
pub type ComplexSample = Complex64;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(domain("probability", value, "[0, 1]"))
        }
    }

    /// Clamps `value` into `[lo, hi]` (a sub-interval of `[0, 1]`), reporting
    /// whether clamping took place. NaN maps to `lo` and counts as clamped.
    pub(crate) fn clamp_into(value: f64, lo: f64, hi: f64) -> (Self, bool) {
        if value.is_nan() || value < lo {
            (Probability(lo), true)
        } else if value > hi {
            (Probability(hi), true)
        } else {
            (Probability(value), false)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Standard Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> Result<Probability> {
    if !x.is_finite() {
        return Err(domain("x", x, "finite reals"));
    }
    Ok(Probability(0.5 * libm::erfc(x / SQRT_2)))
}

/// `E[Q(sqrt(2 c γ))]` for `γ` exponentially distributed with mean `gamma_mean`.
///
/// Closed form `½(1 − sqrt(x / (1 + x)))` with `x = c · gamma_mean`, evaluated
/// as `½ / ((1 + x)(1 + sqrt(x / (1 + x))))` so that the high-SNR tail keeps
/// full relative precision.
pub fn rayleigh_avg_q(c: f64, gamma_mean: f64) -> Result<Probability> {
    if c.is_nan() || c < 0.0 {
        return Err(domain("c", c, "[0, inf]"));
    }
    if gamma_mean.is_nan() || gamma_mean < 0.0 {
        return Err(domain("gamma_mean", gamma_mean, "[0, inf]"));
    }
    let x = c * gamma_mean;
    if x.is_nan() {
        // 0 · inf: one factor is zero, so the effective SNR is zero
        return Ok(Probability::HALF);
    }
    Ok(Probability(half_tail_avg(x)))
}

pub(crate) fn half_tail_avg(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    let s = (x / (1.0 + x)).sqrt();
    0.5 / ((1.0 + x) * (1.0 + s))
}

/// Sampler for `CN(0, variance)`: real and imaginary parts are independent
/// with variance `variance / 2` each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexGaussian {
    component_std: f64,
}

impl ComplexGaussian {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(domain("variance", variance, "[0, inf)"));
        }
        Ok(ComplexGaussian {
            component_std: (variance / 2.0).sqrt(),
        })
    }

    pub fn variance(&self) -> f64 {
        2.0 * self.component_std * self.component_std
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexSample {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(self.component_std * re, self.component_std * im)
    }
}

/// One draw from `CN(0, variance)`.
pub fn sample_cgauss<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Result<ComplexSample> {
    Ok(ComplexGaussian::new(variance)?.sample(rng))
}
