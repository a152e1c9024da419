//! Residual- and likelihood-based estimators: NLLS and the maximum-likelihood
//! estimators for normal and shifted-gamma range errors.

use crate::error_model::{gamma_density, GammaErrorModel, NormalErrorModel};
use crate::geom::{distance, ObservationSet, Point2D};
use crate::locate::solver::{minimize, SolverConfig};
use crate::locate::{Estimate, EstimateStatus};

/// Noise parameters for the normal maximum-likelihood estimator: one model
/// for every anchor or one per anchor.
#[derive(Debug, Clone, PartialEq)]
pub enum NormalParams {
    Shared(NormalErrorModel),
    PerAnchor(Vec<NormalErrorModel>),
}

impl NormalParams {
    fn for_anchor(&self, i: usize) -> &NormalErrorModel {
        match self {
            NormalParams::Shared(m) => m,
            NormalParams::PerAnchor(ms) => &ms[i],
        }
    }
}

/// Nonlinear least squares: argmin_u sum_i (r_i - ||u - a_i||)^2.
pub fn nlls(obs: &ObservationSet, cfg: &SolverConfig) -> Estimate {
    assert!(obs.len() >= 2, "nlls needs at least two anchors");
    let objective = |u: Point2D| {
        obs.iter()
            .map(|o| {
                let residual = o.range - distance(u, o.anchor);
                residual * residual
            })
            .sum::<f64>()
    };
    let result = minimize(objective, cfg);
    Estimate {
        position: result.point,
        status: if result.converged {
            EstimateStatus::Converged
        } else {
            EstimateStatus::DegenerateFallback
        },
    }
}

/// Maximum-likelihood estimation under per-anchor normal errors with a
/// diagonal covariance: argmin_u sum_i (r_i - ||u - a_i|| - mu_i)^2 / sigma_i^2.
///
/// With zero means and equal sigmas this objective orders points exactly
/// like NLLS and the two return the same argmin.
pub fn mle_normal(obs: &ObservationSet, params: &NormalParams, cfg: &SolverConfig) -> Estimate {
    assert!(obs.len() >= 2, "mle_normal needs at least two anchors");
    if let NormalParams::PerAnchor(ms) = params {
        assert_eq!(ms.len(), obs.len(), "one normal model per anchor");
    }
    let objective = |u: Point2D| {
        obs.iter()
            .enumerate()
            .map(|(i, o)| {
                let m = params.for_anchor(i);
                let residual = o.range - distance(u, o.anchor) - m.mu;
                residual * residual / (m.sigma * m.sigma)
            })
            .sum::<f64>()
    };
    let result = minimize(objective, cfg);
    Estimate {
        position: result.point,
        status: if result.converged {
            EstimateStatus::Converged
        } else {
            EstimateStatus::DegenerateFallback
        },
    }
}

/// Maximum-likelihood estimation under gamma-distributed range errors.
///
/// Maximises the joint likelihood prod_i Gamma(alpha,beta)(r_i + eta - ||u - a_i||)
/// directly rather than its logarithm: the likelihood is exactly zero on
/// whole regions (any point closer than `eta` short of a measured range),
/// where the log is undefined and gradients vanish. The descent is
/// derivative-free for the same reason. If no evaluated point has positive
/// likelihood the best start is returned and flagged.
pub fn mle_gamma(
    obs: &ObservationSet,
    model: &GammaErrorModel,
    eta: f64,
    cfg: &SolverConfig,
) -> Estimate {
    assert!(obs.len() >= 2, "mle_gamma needs at least two anchors");
    assert!(eta >= 0.0, "eta must be non-negative");
    let objective = |u: Point2D| -joint_gamma_likelihood(obs, model, eta, u);
    let result = minimize(objective, cfg);
    if result.value == 0.0 {
        // Zero likelihood everywhere the descent looked.
        return Estimate {
            position: result.point,
            status: EstimateStatus::DegenerateFallback,
        };
    }
    Estimate {
        position: result.point,
        status: if result.converged {
            EstimateStatus::Converged
        } else {
            EstimateStatus::DegenerateFallback
        },
    }
}

/// Joint likelihood of observing these ranges at position `u`.
fn joint_gamma_likelihood(
    obs: &ObservationSet,
    model: &GammaErrorModel,
    eta: f64,
    u: Point2D,
) -> f64 {
    let mut product = 1.0;
    for o in obs {
        let argument = o.range + eta - distance(u, o.anchor);
        product *= gamma_density(argument, model.alpha, model.beta);
        if product == 0.0 {
            return 0.0;
        }
    }
    product
}
