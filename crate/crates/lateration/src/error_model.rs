//! Parametric distance-error models: the Gaussian + exponential-NLOS mixture
//! used by the simulator and the normal / shifted-gamma densities used by the
//! maximum-likelihood estimators.
//!
//! All sampling is driven by caller-provided seeded streams so that grids and
//! traces are reproducible for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("sigma must be non-negative and finite, got {0}")]
    BadSigma(f64),
    #[error("sigma must be strictly positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("NLOS probability must lie in [0,1], got {0}")]
    BadProbability(f64),
    #[error("rate must be strictly positive and finite, got {0}")]
    BadRate(f64),
    #[error("gamma shape must be strictly positive and finite, got {0}")]
    BadShape(f64),
}

/// Distance noise as Gaussian bias plus, with some probability, an
/// exponentially distributed non-line-of-sight addition. All parameters are
/// in the same units as the coordinates the model is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureErrorModel {
    /// Mean of the Gaussian noise term.
    pub bias: f64,
    /// Standard deviation of the Gaussian noise term.
    pub sigma: f64,
    /// Probability that a measurement picks up an NLOS addition.
    pub nlos_prob: f64,
    /// Rate of the exponential NLOS addition (mean addition = 1/rate).
    pub nlos_rate: f64,
}

impl MixtureErrorModel {
    pub fn new(bias: f64, sigma: f64, nlos_prob: f64, nlos_rate: f64) -> Result<Self, ModelError> {
        let model = Self {
            bias,
            sigma,
            nlos_prob,
            nlos_rate,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(ModelError::BadSigma(self.sigma));
        }
        if !(0.0..=1.0).contains(&self.nlos_prob) {
            return Err(ModelError::BadProbability(self.nlos_prob));
        }
        if !self.nlos_rate.is_finite() || self.nlos_rate <= 0.0 {
            return Err(ModelError::BadRate(self.nlos_rate));
        }
        Ok(())
    }

    /// Analytic mean of the additive error: bias + nlos_prob / nlos_rate.
    pub fn mean_error(&self) -> f64 {
        self.bias + self.nlos_prob / self.nlos_rate
    }

    /// Analytic variance of the additive error.
    pub fn error_variance(&self) -> f64 {
        // var(g) + var(n) for independent g, n; n is the zero-inflated
        // exponential with E[n^2] = 2 p / rate^2.
        let p = self.nlos_prob;
        let r = self.nlos_rate;
        self.sigma * self.sigma + 2.0 * p / (r * r) - (p / r) * (p / r)
    }
}

/// A shifted gamma distribution: shape `alpha`, rate `beta`, support starting
/// at `location`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaErrorModel {
    pub alpha: f64,
    pub beta: f64,
    /// Shift of the support; the density is zero below this value.
    pub location: f64,
}

impl GammaErrorModel {
    pub fn new(alpha: f64, beta: f64, location: f64) -> Result<Self, ModelError> {
        let model = Self {
            alpha,
            beta,
            location,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(ModelError::BadShape(self.alpha));
        }
        if !self.beta.is_finite() || self.beta <= 0.0 {
            return Err(ModelError::BadRate(self.beta));
        }
        Ok(())
    }

    /// Draw one error value from the shifted gamma.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let gamma = Gamma::new(self.alpha, 1.0 / self.beta).expect("validated parameters");
        self.location + gamma.sample(rng)
    }

    /// Mean of the shifted distribution: location + alpha / beta.
    pub fn mean(&self) -> f64 {
        self.location + self.alpha / self.beta
    }
}

/// A normal error distribution with mean `mu` and standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalErrorModel {
    pub mu: f64,
    pub sigma: f64,
}

impl NormalErrorModel {
    pub fn new(mu: f64, sigma: f64) -> Result<Self, ModelError> {
        let model = Self { mu, sigma };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(ModelError::NonPositiveSigma(self.sigma));
        }
        Ok(())
    }
}

/// A seeded substream: an independent deterministic generator identified by
/// `(seed, stream)`. Distinct stream ids never share state, which is what
/// makes parallel sweeps order-independent.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw one measured range for a true distance under the mixture model.
///
/// The result is `true_dist + g + n` with `g ~ Normal(bias, sigma^2)` and,
/// with probability `nlos_prob`, `n ~ Exp(nlos_rate)`, otherwise `n = 0`.
/// Negative draws are clamped to zero so measured ranges stay physical.
pub fn sample_range<R: Rng + ?Sized>(
    true_dist: f64,
    model: &MixtureErrorModel,
    rng: &mut R,
) -> f64 {
    let gaussian = Normal::new(model.bias, model.sigma).expect("validated parameters");
    let mut range = true_dist + gaussian.sample(rng);
    if rng.random::<f64>() < model.nlos_prob {
        let exp = Exp::new(model.nlos_rate).expect("validated parameters");
        range += exp.sample(rng);
    }
    range.max(0.0)
}

/// Density of the unshifted gamma: beta^alpha / Gamma(alpha) * x^(alpha-1) * exp(-beta x).
///
/// Zero for negative `x`. At `x == 0` the limit is 0 for `alpha > 1`, `beta`
/// for `alpha == 1` and diverges for `alpha < 1`.
pub fn gamma_density(x: f64, alpha: f64, beta: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return if alpha > 1.0 {
            0.0
        } else if alpha == 1.0 {
            beta
        } else {
            f64::INFINITY
        };
    }
    let log_density =
        alpha * beta.ln() - libm::lgamma(alpha) + (alpha - 1.0) * x.ln() - beta * x;
    log_density.exp()
}

/// Density of the shifted gamma model at `x` (the gamma evaluated at
/// `x - location`).
pub fn gamma_pdf(x: f64, model: &GammaErrorModel) -> f64 {
    gamma_density(x - model.location, model.alpha, model.beta)
}

/// Log-density of the normal model at `x`.
pub fn normal_logpdf(x: f64, model: &NormalErrorModel) -> f64 {
    let z = (x - model.mu) / model.sigma;
    -0.5 * (2.0 * std::f64::consts::PI).ln() - model.sigma.ln() - 0.5 * z * z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_range_degenerate_is_deterministic() {
        let model = MixtureErrorModel::new(0.05, 0.0, 0.0, 2.0).unwrap();
        let mut rng = substream(1, 0);
        assert_eq!(sample_range(10.0, &model, &mut rng), 10.05);
    }

    #[test]
    fn sample_range_nlos_mean_matches_exponential() {
        // Exp(rate 2) has mean 0.5; Monte-Carlo oracle over 1e5 draws.
        let model = MixtureErrorModel::new(0.0, 0.0, 1.0, 2.0).unwrap();
        let mut rng = substream(42, 7);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| sample_range(10.0, &model, &mut rng))
            .sum::<f64>()
            / n as f64;
        assert!(
            (mean - 10.5).abs() < 0.01,
            "empirical mean {mean} not within 0.01 of 10.5"
        );
    }

    #[test]
    fn sample_range_same_seed_is_bit_identical() {
        let model = MixtureErrorModel::new(0.05, 0.015, 0.1, 40.0).unwrap();
        let a: Vec<f64> = {
            let mut rng = substream(9, 3);
            (0..100).map(|_| sample_range(1.0, &model, &mut rng)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = substream(9, 3);
            (0..100).map(|_| sample_range(1.0, &model, &mut rng)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn gamma_pdf_exponential_case() {
        // Gamma(1, beta) is Exponential(beta): density beta at the origin.
        let model = GammaErrorModel::new(1.0, 2.0, 0.0).unwrap();
        assert_eq!(gamma_pdf(0.0, &model), 2.0);
    }

    #[test]
    fn gamma_pdf_hand_value() {
        // alpha=2, beta=1: density x * exp(-x); at x=1 that is exp(-1).
        let model = GammaErrorModel::new(2.0, 1.0, 0.0).unwrap();
        let expected = (-1.0f64).exp();
        assert!((gamma_pdf(1.0, &model) - expected).abs() < 1e-15);
        assert!((expected - 0.36787944117144233).abs() < 1e-16);
    }

    #[test]
    fn gamma_pdf_below_support_is_zero() {
        let model = GammaErrorModel::new(3.3, 0.58, -3.31).unwrap();
        assert_eq!(gamma_pdf(-5.0, &model), 0.0);
    }

    #[test]
    fn normal_logpdf_at_mean() {
        let model = NormalErrorModel::new(0.0, 1.0).unwrap();
        assert!((normal_logpdf(0.0, &model) - (-0.9189385332046727)).abs() < 1e-15);
    }

    #[test]
    fn normal_logpdf_one_sigma_offset() {
        let model = NormalErrorModel::new(3.0, 2.5).unwrap();
        let at_mean = normal_logpdf(3.0, &model);
        let at_sigma = normal_logpdf(3.0 + 2.5, &model);
        assert!((at_sigma - (at_mean - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn normal_logpdf_fitted_parameters() {
        // At the mean of N(2.43, 3.57^2) the log-density is -(ln sigma + ln(2 pi)/2).
        let model = NormalErrorModel::new(2.43, 3.57).unwrap();
        let expected = -(3.57f64.ln() + 0.5 * (2.0 * std::f64::consts::PI).ln());
        assert!((normal_logpdf(2.43, &model) - expected).abs() < 1e-15);
        assert!((expected - (-2.19150412899622)).abs() < 1e-12);
    }

    #[test]
    fn mixture_model_validation() {
        assert!(MixtureErrorModel::new(0.0, -1.0, 0.0, 1.0).is_err());
        assert!(MixtureErrorModel::new(0.0, 1.0, 1.5, 1.0).is_err());
        assert!(MixtureErrorModel::new(0.0, 1.0, 0.5, 0.0).is_err());
        assert!(GammaErrorModel::new(0.0, 1.0, 0.0).is_err());
        assert!(NormalErrorModel::new(0.0, 0.0).is_err());
    }
}
