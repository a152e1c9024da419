//! The Min-Max bounding-box estimator and its extended weighted-vertex
//! variants.
//!
//! Min-Max intersects one axis-aligned box per anchor, built from the anchor
//! position and its measured range, and estimates the target at the centre of
//! the intersection region. The extended variants instead return a weighted
//! centroid of the region's four vertices.

use crate::geom::{distance, ObservationSet, Point2D};
use crate::locate::{Estimate, EstimateStatus};

/// The intersection of the per-anchor bounding boxes.
///
/// With noisy ranges the boxes may fail to overlap, leaving `l > r` or
/// `b > t`. The raw bounds are kept as computed; centre and vertices stay
/// well defined and downstream weighting handles them unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionRegion {
    pub l: f64,
    pub r: f64,
    pub t: f64,
    pub b: f64,
}

impl IntersectionRegion {
    /// The four vertices in fixed order: (l,b), (r,b), (l,t), (r,t).
    pub fn vertices(&self) -> [Point2D; 4] {
        [
            Point2D { x: self.l, y: self.b },
            Point2D { x: self.r, y: self.b },
            Point2D { x: self.l, y: self.t },
            Point2D { x: self.r, y: self.t },
        ]
    }

    /// Centre of the region: ((l+r)/2, (t+b)/2).
    pub fn center(&self) -> Point2D {
        Point2D {
            x: 0.5 * (self.l + self.r),
            y: 0.5 * (self.t + self.b),
        }
    }
}

/// Intersect the per-anchor boxes:
/// l = max(ax - r), r = min(ax + r), t = min(ay + r), b = max(ay - r).
pub fn intersection_region(obs: &ObservationSet) -> IntersectionRegion {
    let mut l = f64::NEG_INFINITY;
    let mut r = f64::INFINITY;
    let mut t = f64::INFINITY;
    let mut b = f64::NEG_INFINITY;
    for o in obs {
        l = l.max(o.anchor.x - o.range);
        r = r.min(o.anchor.x + o.range);
        t = t.min(o.anchor.y + o.range);
        b = b.max(o.anchor.y - o.range);
    }
    IntersectionRegion { l, r, t, b }
}

/// Classic Min-Max: the centre of the intersection region.
pub fn min_max(obs: &ObservationSet) -> Estimate {
    Estimate {
        position: intersection_region(obs).center(),
        status: EstimateStatus::Converged,
    }
}

/// Vertex weighting scheme for extended Min-Max.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexWeight {
    /// 1 / sum_i (D_ij - r_i)^2
    W2,
    /// 1 / sum_i |D_ij^2 - r_i^2|
    W4,
}

/// Extended Min-Max: weighted centroid of the region's four vertices.
///
/// A vertex whose weight denominator is exactly zero satisfies every range;
/// it is the limit of the weighted centroid as its weight grows unbounded,
/// so such vertices are averaged uniformly and the rest are ignored.
pub fn e_min_max(obs: &ObservationSet, weight: VertexWeight) -> Estimate {
    let vertices = intersection_region(obs).vertices();
    let mut denominators = [0.0f64; 4];
    for (j, &v) in vertices.iter().enumerate() {
        let mut sum = 0.0;
        for o in obs {
            let d = distance(o.anchor, v);
            sum += match weight {
                VertexWeight::W2 => (d - o.range) * (d - o.range),
                VertexWeight::W4 => (d * d - o.range * o.range).abs(),
            };
        }
        denominators[j] = sum;
    }

    let exact: Vec<Point2D> = vertices
        .iter()
        .zip(&denominators)
        .filter(|(_, &den)| den == 0.0)
        .map(|(&v, _)| v)
        .collect();
    let position = if !exact.is_empty() {
        average(&exact)
    } else {
        let weights: Vec<f64> = denominators.iter().map(|&den| 1.0 / den).collect();
        let total: f64 = weights.iter().sum();
        let mut x = 0.0;
        let mut y = 0.0;
        for (w, v) in weights.iter().zip(&vertices) {
            x += w * v.x;
            y += w * v.y;
        }
        Point2D {
            x: x / total,
            y: y / total,
        }
    };
    Estimate {
        position,
        status: EstimateStatus::Converged,
    }
}

pub(crate) fn average(points: &[Point2D]) -> Point2D {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point2D {
        x: sx / n,
        y: sy / n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::AnchorObservation;

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
    fn single_anchor_box() {
        let ir = intersection_region(&obs(&[((2.0, 3.0), 1.0)]));
        assert_eq!((ir.l, ir.r, ir.t, ir.b), (1.0, 3.0, 4.0, 2.0));
    }

    #[test]
    fn two_anchor_overlap() {
        // Hand evaluation, cross-checked by brute-force box intersection.
        let ir = intersection_region(&obs(&[((0.0, 0.0), 6.0), ((10.0, 0.0), 6.0)]));
        assert_eq!((ir.l, ir.r, ir.t, ir.b), (4.0, 6.0, 6.0, -6.0));
    }

    #[test]
    fn four_fold_symmetry() {
        let r = 50f64.sqrt();
        let ir = intersection_region(&obs(&[
            ((0.0, 0.0), r),
            ((10.0, 0.0), r),
            ((10.0, 10.0), r),
            ((0.0, 10.0), r),
        ]));
        let e = 1e-12;
        assert!((ir.l - 2.9289321881345245).abs() < e);
        assert!((ir.r - 7.0710678118654755).abs() < e);
        assert!((ir.t - 7.0710678118654755).abs() < e);
        assert!((ir.b - 2.9289321881345245).abs() < e);
        let c = min_max(&obs(&[
            ((0.0, 0.0), r),
            ((10.0, 0.0), r),
            ((10.0, 10.0), r),
            ((0.0, 10.0), r),
        ]));
        assert!((c.position.x - 5.0).abs() < e && (c.position.y - 5.0).abs() < e);
    }

    #[test]
    fn min_max_single_anchor_is_anchor() {
        let e = min_max(&obs(&[((2.0, 3.0), 1.0)]));
        assert_eq!((e.position.x, e.position.y), (2.0, 3.0));
    }

    #[test]
    fn min_max_two_anchor_midpoint() {
        let e = min_max(&obs(&[((0.0, 0.0), 6.0), ((10.0, 0.0), 6.0)]));
        assert_eq!((e.position.x, e.position.y), (5.0, 0.0));
    }

    #[test]
    fn e_min_max_mirror_symmetry() {
        // All four vertex weights are equal by mirror symmetry, so the
        // weighted centroid is the plain centroid of V.
        let set = obs(&[((0.0, 0.0), 6.0), ((10.0, 0.0), 6.0)]);
        for w in [VertexWeight::W2, VertexWeight::W4] {
            let e = e_min_max(&set, w);
            assert!((e.position.x - 5.0).abs() < 1e-12);
            assert!(e.position.y.abs() < 1e-12);
        }
    }

    #[test]
    fn e_min_max_exact_vertex_takes_all() {
        // IR of these observations is (-4, 4, 6, 2) and both ranges exactly
        // hit the vertex (4, 2), so its denominator vanishes and the vertex
        // is returned directly.
        let set = obs(&[((0.0, 2.0), 4.0), ((4.0, 10.0), 8.0)]);
        let ir = intersection_region(&set);
        assert_eq!((ir.l, ir.r, ir.t, ir.b), (-4.0, 4.0, 6.0, 2.0));
        for w in [VertexWeight::W2, VertexWeight::W4] {
            let e = e_min_max(&set, w);
            assert_eq!((e.position.x, e.position.y), (4.0, 2.0));
        }
    }
}
