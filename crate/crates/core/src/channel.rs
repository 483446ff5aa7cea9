//! Flat Rayleigh fading with additive channel-estimation error.
//!
//! Each user sees `h ~ CN(0, σ²)`; the receiver only knows `ĥ = h − ε` with
//! `ε ~ CN(0, δ²)` drawn independently of `h`. Everything is redrawn per trial.

use rand::Rng;

use crate::error::{domain, Result};
use crate::mathkit::{ComplexGaussian, ComplexSample};

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// One user's channel for a single trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    /// True channel coefficient.
    pub h: ComplexSample,
    /// Estimation error.
    pub epsilon: ComplexSample,
    /// Channel estimate used by the detectors, `h − epsilon`.
    pub h_hat: ComplexSample,
}

impl ChannelRealization {
    pub fn new(h: ComplexSample, epsilon: ComplexSample) -> Self {
        ChannelRealization {
            h,
            epsilon,
            h_hat: h - epsilon,
        }
    }

    /// A perfectly known channel.
    pub fn perfect(h: ComplexSample) -> Self {
        Self::new(h, ComplexSample::new(0.0, 0.0))
    }
}

/// Mean channel powers of both users and the estimation-error variance, all
/// linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingProfile {
    sigma1_sq: f64,
    sigma2_sq: f64,
    delta_sq: f64,
}

impl FadingProfile {
    /// `sigma1_sq` is the near user's mean channel power and must be at least
    /// the far user's `sigma2_sq`.
    pub fn new(sigma1_sq: f64, sigma2_sq: f64, delta_sq: f64) -> Result<Self> {
        if !(sigma1_sq > 0.0 && sigma1_sq.is_finite()) {
            return Err(domain("sigma1_sq", sigma1_sq, "(0, inf)"));
        }
        if !(sigma2_sq > 0.0 && sigma2_sq.is_finite()) {
            return Err(domain("sigma2_sq", sigma2_sq, "(0, inf)"));
        }
        if sigma1_sq < sigma2_sq {
            return Err(domain("sigma1_sq", sigma1_sq, "[sigma2_sq, inf)"));
        }
        if !(delta_sq >= 0.0 && delta_sq.is_finite()) {
            return Err(domain("delta_sq", delta_sq, "[0, inf)"));
        }
        Ok(FadingProfile {
            sigma1_sq,
            sigma2_sq,
            delta_sq,
        })
    }

    /// Builds a profile from channel powers in dB and the error standard
    /// deviation `delta`.
    pub fn from_db(sigma1_db: f64, sigma2_db: f64, delta: f64) -> Result<Self> {
        Self::new(db_to_linear(sigma1_db), db_to_linear(sigma2_db), delta * delta)
    }

    /// Same channel powers, different estimation error standard deviation.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.sigma1_sq, self.sigma2_sq, delta * delta)
    }

    pub fn sigma1_sq(&self) -> f64 {
        self.sigma1_sq
    }

    pub fn sigma2_sq(&self) -> f64 {
        self.sigma2_sq
    }

    pub fn delta_sq(&self) -> f64 {
        self.delta_sq
    }

    pub fn delta(&self) -> f64 {
        self.delta_sq.sqrt()
    }
}

/// Pre-validated sampler for one user's channel and its estimate.
#[derive(Debug, Clone, Copy)]
pub struct UserChannel {
    fading: ComplexGaussian,
    error: ComplexGaussian,
}

impl UserChannel {
    pub fn new(sigma_sq: f64, delta_sq: f64) -> Result<Self> {
        if !(sigma_sq > 0.0) {
            return Err(domain("sigma_sq", sigma_sq, "(0, inf)"));
        }
        Ok(UserChannel {
            fading: ComplexGaussian::new(sigma_sq)?,
            error: ComplexGaussian::new(delta_sq)?,
        })
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        let h = self.fading.sample(rng);
        let epsilon = self.error.sample(rng);
        ChannelRealization::new(h, epsilon)
    }
}

/// Draws `h ~ CN(0, sigma_sq)` and an independent `ε ~ CN(0, delta_sq)`.
pub fn draw_user_channel<R: Rng + ?Sized>(
    sigma_sq: f64,
    delta_sq: f64,
    rng: &mut R,
) -> Result<ChannelRealization> {
    Ok(UserChannel::new(sigma_sq, delta_sq)?.draw(rng))
}

/// Draws receiver noise `n ~ CN(0, n0)`.
pub fn draw_noise<R: Rng + ?Sized>(n0: f64, rng: &mut R) -> Result<ComplexSample> {
    if !(n0 > 0.0) {
        return Err(domain("n0", n0, "(0, inf)"));
    }
    Ok(ComplexGaussian::new(n0)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const N: usize = 1_000_000;

    #[test]
    fn perfect_csi_estimate_equals_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let ch = draw_user_channel(2.0, 0.0, &mut rng).unwrap();
            assert_eq!(ch.h_hat, ch.h);
        }
    }

    #[test]
    fn estimate_is_channel_minus_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10_000 {
            let ch = draw_user_channel(10.0, 0.01, &mut rng).unwrap();
            assert_eq!(ch.h_hat, ch.h - ch.epsilon);
            // adding ε back is exact only up to one rounding of h_hat
            let back = ch.h_hat + ch.epsilon;
            assert!((back - ch.h).norm() <= 4.0 * f64::EPSILON * ch.h.norm().max(1.0));
        }
    }

    #[test]
    fn estimated_channel_power_adds_error_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let user = UserChannel::new(1.0, 0.01).unwrap();
        let p = (0..N).map(|_| user.draw(&mut rng).h_hat.norm_sqr()).sum::<f64>() / N as f64;
        assert!((p - 1.01).abs() < 0.01, "{p}");
    }

    #[test]
    fn ten_db_channel_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let user = UserChannel::new(db_to_linear(10.0), 0.0).unwrap();
        let p = (0..N).map(|_| user.draw(&mut rng).h.norm_sqr()).sum::<f64>() / N as f64;
        assert!((p - 10.0).abs() < 0.1, "{p}");
    }

    #[test]
    fn error_uncorrelated_with_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let user = UserChannel::new(1.0, 1.0).unwrap();
        let mut corr = num_complex::Complex64::new(0.0, 0.0);
        for _ in 0..N {
            let ch = user.draw(&mut rng);
            corr += ch.epsilon * ch.h.conj();
        }
        corr /= N as f64;
        assert!(corr.re.abs() < 0.005 && corr.im.abs() < 0.005, "{corr}");
    }

    #[test]
    fn noise_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = (0..N).map(|_| draw_noise(1.0, &mut rng).unwrap().norm_sqr()).sum::<f64>() / N as f64;
        assert!((p - 1.0).abs() < 0.01, "{p}");
        let v = (0..N).map(|_| draw_noise(2.0, &mut rng).unwrap().re.powi(2)).sum::<f64>() / N as f64;
        assert!((v - 1.0).abs() < 0.01, "{v}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        assert!(draw_noise(0.0, &mut rng).is_err());
        assert!(draw_noise(-1.0, &mut rng).is_err());
        assert!(draw_user_channel(0.0, 0.1, &mut rng).is_err());
        assert!(draw_user_channel(1.0, -0.1, &mut rng).is_err());
        assert!(FadingProfile::new(1.0, 10.0, 0.0).is_err());
        assert!(FadingProfile::new(10.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn db_conversion() {
        assert_eq!(db_to_linear(10.0), 10.0);
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((linear_to_db(1000.0) - 30.0).abs() < 1e-12);
    }
}
