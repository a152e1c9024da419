//! Derivative-free 2-D minimisation (Nelder-Mead simplex descent).
//!
//! The likelihood surfaces optimised here can be flat or exactly zero over
//! whole regions, where gradients carry no information, so the solver never
//! evaluates derivatives. Runs are deterministic: same objective, same
//! configuration, same result.

use crate::geom::{distance, ObservationSet, Point2D};
use crate::locate::minmax::intersection_region;

/// Configuration for [`minimize`]: one descent per start, best result wins.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub starts: Vec<Point2D>,
    pub max_iters: usize,
    pub tolerance: f64,
}

/// Edge length of the initial simplex. A fixed absolute step keeps the
/// descent translation-equivariant; expansion steps cover larger scales.
const INITIAL_STEP: f64 = 0.5;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl SolverConfig {
    /// Config with the given starts and default iteration budget.
    pub fn new(starts: Vec<Point2D>) -> Self {
        assert!(!starts.is_empty(), "at least one start required");
        Self {
            starts,
            max_iters: 2000,
            tolerance: 1e-9,
        }
    }

    /// The three geometry-aware default starts: the Min-Max estimate, the
    /// centroid of the anchors and the centroid of the intersection-region
    /// vertices.
    pub fn default_starts(obs: &ObservationSet) -> Self {
        let ir = intersection_region(obs);
        let vertex_centroid = super::minmax::average(&ir.vertices());
        Self::new(vec![ir.center(), obs.anchor_centroid(), vertex_centroid])
    }
}

/// Outcome of one [`minimize`] call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeResult {
    pub point: Point2D,
    pub value: f64,
    /// Whether the winning descent shrank its simplex below the tolerance
    /// before running out of iterations.
    pub converged: bool,
}

/// Minimise `objective` from every start; return the best (point, value).
///
/// Each descent runs until the simplex diameter falls below
/// `cfg.tolerance` or `cfg.max_iters` iterations have been spent.
pub fn minimize<F: Fn(Point2D) -> f64>(objective: F, cfg: &SolverConfig) -> MinimizeResult {
    let mut best: Option<MinimizeResult> = None;
    for &start in &cfg.starts {
        let run = nelder_mead(&objective, start, cfg.max_iters, cfg.tolerance);
        let better = match &best {
            None => true,
            Some(b) => run.value < b.value,
        };
        if better {
            best = Some(run);
        }
    }
    best.expect("at least one start")
}

fn nelder_mead<F: Fn(Point2D) -> f64>(
    objective: &F,
    start: Point2D,
    max_iters: usize,
    tolerance: f64,
) -> MinimizeResult {
    let mut simplex = [
        start,
        Point2D {
            x: start.x + INITIAL_STEP,
            y: start.y,
        },
        Point2D {
            x: start.x,
            y: start.y + INITIAL_STEP,
        },
    ];
    let mut values = simplex.map(|p| objective(p));
    let mut converged = false;

    for _ in 0..max_iters {
        // Stable sort keeps the original order among ties, so a constant
        // objective leaves the start as the best vertex.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let (best, second, worst) = (order[0], order[1], order[2]);

        if diameter(&simplex) < tolerance {
            converged = true;
            break;
        }

        let centroid = Point2D {
            x: 0.5 * (simplex[best].x + simplex[second].x),
            y: 0.5 * (simplex[best].y + simplex[second].y),
        };
        let towards = |coeff: f64| Point2D {
            x: centroid.x + coeff * (centroid.x - simplex[worst].x),
            y: centroid.y + coeff * (centroid.y - simplex[worst].y),
        };

        let reflected = towards(REFLECT);
        let f_reflected = objective(reflected);

        if f_reflected < values[best] {
            let expanded = towards(EXPAND);
            let f_expanded = objective(expanded);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if f_reflected < values[second] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            let contracted = towards(-CONTRACT);
            let f_contracted = objective(contracted);
            if f_contracted < values[worst] {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                for i in [second, worst] {
                    simplex[i] = Point2D {
                        x: simplex[best].x + SHRINK * (simplex[i].x - simplex[best].x),
                        y: simplex[best].y + SHRINK * (simplex[i].y - simplex[best].y),
                    };
                    values[i] = objective(simplex[i]);
                }
            }
        }
    }

    let mut best_idx = 0;
    for i in 1..3 {
        if values[i] < values[best_idx] {
            best_idx = i;
        }
    }
    MinimizeResult {
        point: simplex[best_idx],
        value: values[best_idx],
        converged,
    }
}

fn diameter(simplex: &[Point2D; 3]) -> f64 {
    let d01 = distance(simplex[0], simplex[1]);
    let d02 = distance(simplex[0], simplex[2]);
    let d12 = distance(simplex[1], simplex[2]);
    d01.max(d02).max(d12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let cfg = SolverConfig::new(vec![Point2D::new(0.0, 0.0)]);
        let res = minimize(|p| (p.x - 1.0).powi(2) + (p.y - 2.0).powi(2), &cfg);
        assert!(res.converged);
        assert!((res.point.x - 1.0).abs() < 1e-6);
        assert!((res.point.y - 2.0).abs() < 1e-6);
        assert!(res.value < 1e-10);
    }

    #[test]
    fn constant_objective_returns_first_start() {
        let cfg = SolverConfig::new(vec![Point2D::new(3.0, -7.0), Point2D::new(1.0, 1.0)]);
        let res = minimize(|_| 4.2, &cfg);
        assert_eq!((res.point.x, res.point.y), (3.0, -7.0));
        assert_eq!(res.value, 4.2);
    }

    #[test]
    fn rosenbrock_valley() {
        let cfg = SolverConfig::new(vec![Point2D::new(-1.2, 1.0)]);
        let res = minimize(
            |p| (1.0 - p.x).powi(2) + 100.0 * (p.y - p.x * p.x).powi(2),
            &cfg,
        );
        assert!((res.point.x - 1.0).abs() < 1e-4);
        assert!((res.point.y - 1.0).abs() < 1e-4);
    }

    #[test]
    fn deterministic_across_calls() {
        let cfg = SolverConfig::new(vec![Point2D::new(0.3, 0.7)]);
        let f = |p: Point2D| (p.x * p.x + p.y * p.y - 1.0).abs();
        let a = minimize(f, &cfg);
        let b = minimize(f, &cfg);
        assert_eq!(a, b);
    }
}
