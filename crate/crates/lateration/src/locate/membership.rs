//! Membership-degree Min-Max: vertex weighting driven by a triangular
//! membership function calibrated to the deployment's range-error
//! distribution.
//!
//! Each (anchor, vertex) residual r_i - ||v_j - a_i|| is converted into a
//! degree of agreement in [0,1]; per-vertex degrees are combined into a
//! weight by the reciprocal coefficient of variation and the estimate is the
//! weighted average of the vertices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{distance, ObservationSet};
use crate::locate::minmax::{average, intersection_region, min_max};
use crate::locate::{Estimate, EstimateStatus};
use crate::stats::Welford;

#[derive(Debug, Error, PartialEq)]
pub enum MfError {
    #[error("membership function must satisfy low < median < up, got [{0}, {1}, {2}]")]
    Degenerate(f64, f64, f64),
    #[error("membership function parameters must be finite")]
    NonFinite,
}

/// A triangular membership function with vertices (low, 0), (median, 1),
/// (up, 0). Construction rejects degenerate triangles since evaluation
/// divides by the side lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct TriangularMF {
    low: f64,
    median: f64,
    up: f64,
}

impl TriangularMF {
    pub fn new(low: f64, median: f64, up: f64) -> Result<Self, MfError> {
        if !(low.is_finite() && median.is_finite() && up.is_finite()) {
            return Err(MfError::NonFinite);
        }
        if !(low < median && median < up) {
            return Err(MfError::Degenerate(low, median, up));
        }
        Ok(Self { low, median, up })
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn median(&self) -> f64 {
        self.median
    }

    pub fn up(&self) -> f64 {
        self.up
    }
}

impl TryFrom<[f64; 3]> for TriangularMF {
    type Error = MfError;

    fn try_from(p: [f64; 3]) -> Result<Self, MfError> {
        TriangularMF::new(p[0], p[1], p[2])
    }
}

impl From<TriangularMF> for [f64; 3] {
    fn from(mf: TriangularMF) -> [f64; 3] {
        [mf.low, mf.median, mf.up]
    }
}

/// Membership degree of a residual: 1 at the median, falling linearly to 0
/// at the endpoints, 0 outside [low, up].
pub fn membership(dbar: f64, mf: &TriangularMF) -> f64 {
    if dbar >= mf.median && dbar < mf.up {
        (dbar - mf.up) / (mf.median - mf.up)
    } else if dbar > mf.low && dbar < mf.median {
        (dbar - mf.low) / (mf.median - mf.low)
    } else {
        0.0
    }
}

/// Combine one vertex's membership degrees into its weight: the reciprocal
/// coefficient of variation mean/sqrt(var), with var the population variance.
///
/// Unanimous agreement (zero variance, positive mean) yields
/// `f64::INFINITY`; unanimous zero agreement yields 0 so that vertices no
/// range supports cannot dominate.
pub fn degree_weight(degrees: &[f64]) -> f64 {
    assert!(!degrees.is_empty(), "degree_weight of empty list");
    let mut acc = Welford::new();
    for &d in degrees {
        acc.push(d);
    }
    weight_from_moments(&acc)
}

fn weight_from_moments(acc: &Welford) -> f64 {
    let variance = acc.variance();
    if variance > 0.0 {
        acc.mean() / variance.sqrt()
    } else if acc.mean() > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Membership-degree Min-Max.
///
/// Computes the intersection-region vertices, converts every range into a
/// per-vertex membership degree, weights each vertex by the combined degree
/// and averages. Vertices with infinite weight dominate and are averaged
/// uniformly; if every vertex ends up with zero weight the estimate falls
/// back to plain Min-Max and says so in its status.
pub fn md_min_max(obs: &ObservationSet, mf: &TriangularMF) -> Estimate {
    let vertices = intersection_region(obs).vertices();
    let mut moments = [Welford::new(); 4];
    for o in obs {
        for (j, &v) in vertices.iter().enumerate() {
            let dbar = o.range - distance(v, o.anchor);
            moments[j].push(membership(dbar, mf));
        }
    }
    let weights: Vec<f64> = moments.iter().map(weight_from_moments).collect();

    let dominant: Vec<_> = vertices
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w.is_infinite())
        .map(|(&v, _)| v)
        .collect();
    if !dominant.is_empty() {
        return Estimate {
            position: average(&dominant),
            status: EstimateStatus::Converged,
        };
    }

    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Estimate {
            position: min_max(obs).position,
            status: EstimateStatus::DegenerateFallback,
        };
    }

    let mut x = 0.0;
    let mut y = 0.0;
    for (w, v) in weights.iter().zip(&vertices) {
        x += (w / total) * v.x;
        y += (w / total) * v.y;
    }
    Estimate {
        position: crate::geom::Point2D { x, y },
        status: EstimateStatus::Converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{AnchorObservation, Point2D};

    fn mobile1_mf() -> TriangularMF {
        TriangularMF::new(-1.7, 2.38, 13.31).unwrap()
    }

    #[test]
    fn membership_apex_is_one() {
        assert_eq!(membership(2.38, &mobile1_mf()), 1.0);
    }

    #[test]
    fn membership_upper_boundary_is_zero() {
        assert_eq!(membership(13.31, &mobile1_mf()), 0.0);
    }

    #[test]
    fn membership_rising_edge_value() {
        // (0 - (-1.7)) / (2.38 - (-1.7))
        let got = membership(0.0, &mobile1_mf());
        assert!((got - 0.41666666666666663).abs() < 1e-15);
    }

    #[test]
    fn membership_outside_support_is_zero() {
        let mf = mobile1_mf();
        assert_eq!(membership(-1.7, &mf), 0.0);
        assert_eq!(membership(-100.0, &mf), 0.0);
        assert_eq!(membership(100.0, &mf), 0.0);
    }

    #[test]
    fn degenerate_mf_rejected() {
        assert!(TriangularMF::new(1.0, 1.0, 2.0).is_err());
        assert!(TriangularMF::new(1.0, 2.0, 2.0).is_err());
        assert!(TriangularMF::new(f64::NAN, 0.0, 1.0).is_err());
        assert!(TriangularMF::new(-1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn degree_weight_unanimous_agreement_is_infinite() {
        assert!(degree_weight(&[1.0, 1.0, 1.0, 1.0]).is_infinite());
    }

    #[test]
    fn degree_weight_unanimous_zero_is_zero() {
        assert_eq!(degree_weight(&[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn degree_weight_hand_value() {
        // mean 0.75, population var ((0.25)^2 + (0.25)^2)/2 = 0.0625,
        // sd 0.25, ratio 3.0.
        let got = degree_weight(&[1.0, 0.5]);
        assert!((got - 3.0).abs() < 1e-12);
    }

    fn obs(pairs: &[((f64, f64), f64)]) -> ObservationSet {
        ObservationSet::new(
            pairs
                .iter()
                .map(|&((x, y), r)| AnchorObservation::new(Point2D::new(x, y), r))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn md_min_max_mirror_symmetry() {
        let set = obs(&[((0.0, 0.0), 6.0), ((10.0, 0.0), 6.0)]);
        let mf = TriangularMF::new(-1.0, 0.0, 1.0).unwrap();
        let e = md_min_max(&set, &mf);
        assert!((e.position.x - 5.0).abs() < 1e-12);
        assert!(e.position.y.abs() < 1e-12);
    }

    #[test]
    fn md_min_max_all_zero_degrees_falls_back() {
        // Ranges are 100 units long while the MF support is [-1, 1]: every
        // residual lies far outside, all degrees are zero.
        let set = obs(&[((0.0, 0.0), 100.0), ((10.0, 0.0), 100.0)]);
        let mf = TriangularMF::new(-1.0, 0.0, 1.0).unwrap();
        let e = md_min_max(&set, &mf);
        assert_eq!(e.status, EstimateStatus::DegenerateFallback);
        let fallback = min_max(&set).position;
        assert_eq!((e.position.x, e.position.y), (fallback.x, fallback.y));
    }

    #[test]
    fn md_min_max_dominant_vertex_wins() {
        // Single anchor: every vertex has one degree, so variance is zero
        // everywhere. Vertices with positive degree become dominant and are
        // averaged uniformly.
        let set = obs(&[((0.0, 0.0), 1.0)]);
        let mf = TriangularMF::new(-10.0, 0.0, 10.0).unwrap();
        let e = md_min_max(&set, &mf);
        assert_eq!(e.status, EstimateStatus::Converged);
        // All four vertices are equidistant from the anchor, all dominant:
        // their average is the box centre, the anchor itself.
        assert!((e.position.x - 0.0).abs() < 1e-12);
        assert!((e.position.y - 0.0).abs() < 1e-12);
    }
}
