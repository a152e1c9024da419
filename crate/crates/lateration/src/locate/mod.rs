//! Position estimators: Min-Max, the extended weighted variants, the
//! membership-degree variant, NLLS and the maximum-likelihood estimators,
//! plus the derivative-free minimiser they share.

pub mod likelihood;
pub mod membership;
pub mod minmax;
pub mod solver;

pub use likelihood::{mle_gamma, mle_normal, nlls, NormalParams};
pub use membership::{degree_weight, md_min_max, membership, MfError, TriangularMF};
pub use minmax::{e_min_max, intersection_region, min_max, IntersectionRegion, VertexWeight};
pub use solver::{minimize, MinimizeResult, SolverConfig};

use serde::{Deserialize, Serialize};

use crate::error_model::{GammaErrorModel, NormalErrorModel};
use crate::geom::{ObservationSet, Point2D};

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateStatus {
    Converged,
    /// A documented degenerate case was hit and the stated fallback applied
    /// (all-zero vertex weights, a zero-likelihood region, or an unconverged
    /// descent returning its best iterate).
    DegenerateFallback,
}

/// A position estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub position: Point2D,
    pub status: EstimateStatus,
}

/// Iteration budget overrides for the solver-based estimators; starts default
/// to [`SolverConfig::default_starts`] when not given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SolverOpts {
    pub max_iters: Option<usize>,
    pub tolerance: Option<f64>,
    pub starts: Option<Vec<Point2D>>,
}

impl SolverOpts {
    pub fn build(&self, obs: &ObservationSet) -> SolverConfig {
        let mut cfg = match &self.starts {
            Some(starts) => SolverConfig::new(starts.clone()),
            None => SolverConfig::default_starts(obs),
        };
        if let Some(n) = self.max_iters {
            cfg.max_iters = n;
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        cfg
    }
}

/// A fully parameterised estimator, ready to run on observation sets.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    MinMax,
    EMinMaxW2,
    EMinMaxW4,
    MdMinMax {
        mf: TriangularMF,
    },
    Nlls {
        solver: SolverOpts,
    },
    MleNormal {
        params: NormalParams,
        solver: SolverOpts,
    },
    MleGamma {
        model: GammaErrorModel,
        eta: f64,
        solver: SolverOpts,
    },
}

impl Algorithm {
    /// Run the estimator on one observation set.
    pub fn estimate(&self, obs: &ObservationSet) -> Estimate {
        match self {
            Algorithm::MinMax => min_max(obs),
            Algorithm::EMinMaxW2 => e_min_max(obs, VertexWeight::W2),
            Algorithm::EMinMaxW4 => e_min_max(obs, VertexWeight::W4),
            Algorithm::MdMinMax { mf } => md_min_max(obs, mf),
            Algorithm::Nlls { solver } => nlls(obs, &solver.build(obs)),
            Algorithm::MleNormal { params, solver } => {
                mle_normal(obs, params, &solver.build(obs))
            }
            Algorithm::MleGamma { model, eta, solver } => {
                mle_gamma(obs, model, *eta, &solver.build(obs))
            }
        }
    }

    /// Fewest anchors the estimator accepts.
    pub fn min_anchors(&self) -> usize {
        match self {
            Algorithm::MinMax
            | Algorithm::EMinMaxW2
            | Algorithm::EMinMaxW4
            | Algorithm::MdMinMax { .. } => 1,
            _ => 2,
        }
    }

    /// The name this estimator goes by on the command line and in scenario
    /// files.
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::MinMax => "minmax",
            Algorithm::EMinMaxW2 => "eminmax-w2",
            Algorithm::EMinMaxW4 => "eminmax-w4",
            Algorithm::MdMinMax { .. } => "mdminmax",
            Algorithm::Nlls { .. } => "nlls",
            Algorithm::MleNormal { .. } => "mle-normal",
            Algorithm::MleGamma { .. } => "mle-gamma",
        }
    }
}

/// Declarative algorithm block as it appears in scenario files:
/// `{"name": "mdminmax", "mf": [-1.7, 2.38, 13.31]}` and friends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum AlgorithmSpec {
    Minmax,
    EminmaxW2,
    EminmaxW4,
    Mdminmax {
        mf: TriangularMF,
    },
    Nlls {
        #[serde(default)]
        solver: SolverOpts,
    },
    MleNormal {
        mu: f64,
        sigma: f64,
        #[serde(default)]
        solver: SolverOpts,
    },
    MleGamma {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        location: f64,
        /// Offset added to measured ranges; defaults to max(0, -location).
        #[serde(default)]
        eta: Option<f64>,
        #[serde(default)]
        solver: SolverOpts,
    },
}

impl AlgorithmSpec {
    pub fn build(&self) -> Result<Algorithm, crate::error_model::ModelError> {
        Ok(match self {
            AlgorithmSpec::Minmax => Algorithm::MinMax,
            AlgorithmSpec::EminmaxW2 => Algorithm::EMinMaxW2,
            AlgorithmSpec::EminmaxW4 => Algorithm::EMinMaxW4,
            AlgorithmSpec::Mdminmax { mf } => Algorithm::MdMinMax { mf: *mf },
            AlgorithmSpec::Nlls { solver } => Algorithm::Nlls {
                solver: solver.clone(),
            },
            AlgorithmSpec::MleNormal { mu, sigma, solver } => Algorithm::MleNormal {
                params: NormalParams::Shared(NormalErrorModel::new(*mu, *sigma)?),
                solver: solver.clone(),
            },
            AlgorithmSpec::MleGamma {
                alpha,
                beta,
                location,
                eta,
                solver,
            } => {
                let model = GammaErrorModel::new(*alpha, *beta, *location)?;
                Algorithm::MleGamma {
                    model,
                    eta: eta.unwrap_or((-model.location).max(0.0)),
                    solver: solver.clone(),
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_spec_round_trip() {
        let json = r#"{"name": "mdminmax", "mf": [-1.7, 2.38, 13.31]}"#;
        let spec: AlgorithmSpec = serde_json::from_str(json).unwrap();
        let algo = spec.build().unwrap();
        assert_eq!(algo.name(), "mdminmax");
    }

    #[test]
    fn mle_gamma_spec_defaults_eta_to_negated_location() {
        let json = r#"{"name": "mle-gamma", "alpha": 3.3, "beta": 0.58, "location": -3.31}"#;
        let spec: AlgorithmSpec = serde_json::from_str(json).unwrap();
        match spec.build().unwrap() {
            Algorithm::MleGamma { eta, .. } => assert!((eta - 3.31).abs() < 1e-15),
            other => panic!("unexpected algorithm {other:?}"),
        }
    }

    #[test]
    fn degenerate_mf_in_spec_is_rejected() {
        let json = r#"{"name": "mdminmax", "mf": [1.0, 1.0, 2.0]}"#;
        assert!(serde_json::from_str::<AlgorithmSpec>(json).is_err());
    }
}
