//! Geometric primitives and observation containers shared by every estimator.

use serde::{Deserialize, Serialize};

/// A 2-D point. Coordinates are dimensionless reals; callers bind them to
/// meters or playing-field units.
///
/// All constructed values must be finite (no NaN or infinity). On the wire
/// a point is the two-element array `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    /// Create a point. Panics on non-finite coordinates.
    pub fn new(x: f64, y: f64) -> Self {
        assert!(x.is_finite() && y.is_finite(), "Point2D must be finite");
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl TryFrom<[f64; 2]> for Point2D {
    type Error = String;

    fn try_from(v: [f64; 2]) -> Result<Self, String> {
        if v[0].is_finite() && v[1].is_finite() {
            Ok(Point2D { x: v[0], y: v[1] })
        } else {
            Err(format!("point [{}, {}] is not finite", v[0], v[1]))
        }
    }
}

impl From<Point2D> for [f64; 2] {
    fn from(p: Point2D) -> [f64; 2] {
        [p.x, p.y]
    }
}

/// Euclidean distance between two points.
///
/// Symmetric, non-negative, zero iff `p == q`.
pub fn distance(p: Point2D, q: Point2D) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// One range measurement: the anchor that produced it and the measured
/// distance to the target, in the same units as the coordinates.
///
/// Serialised as `{"a": [x, y], "r": range}`, the trace wire format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorObservation {
    #[serde(rename = "a")]
    pub anchor: Point2D,
    #[serde(rename = "r")]
    pub range: f64,
}

impl AnchorObservation {
    /// Create an observation. Panics on negative or non-finite range.
    pub fn new(anchor: Point2D, range: f64) -> Self {
        assert!(
            range.is_finite() && range >= 0.0,
            "range must be finite and non-negative"
        );
        Self { anchor, range }
    }
}

/// An ordered, non-empty set of anchor observations for one localisation.
///
/// Duplicate anchor positions are permitted.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    observations: Vec<AnchorObservation>,
}

impl ObservationSet {
    /// Wrap a list of observations. Returns `None` for an empty list.
    pub fn new(observations: Vec<AnchorObservation>) -> Option<Self> {
        if observations.is_empty() {
            None
        } else {
            Some(Self { observations })
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AnchorObservation> {
        self.observations.iter()
    }

    pub fn as_slice(&self) -> &[AnchorObservation] {
        &self.observations
    }

    /// Arithmetic mean of the anchor positions.
    pub fn anchor_centroid(&self) -> Point2D {
        let n = self.len() as f64;
        let (sx, sy) = self
            .observations
            .iter()
            .fold((0.0, 0.0), |(sx, sy), o| (sx + o.anchor.x, sy + o.anchor.y));
        Point2D {
            x: sx / n,
            y: sy / n,
        }
    }
}

impl<'a> IntoIterator for &'a ObservationSet {
    type Item = &'a AnchorObservation;
    type IntoIter = std::slice::Iter<'a, AnchorObservation>;

    fn into_iter(self) -> Self::IntoIter {
        self.observations.iter()
    }
}

/// Convex hull of a point set (monotone chain), returned in counter-clockwise
/// order without the closing point. Collinear inputs collapse to a segment.
pub fn convex_hull(points: &[Point2D]) -> Vec<Point2D> {
    let mut pts: Vec<Point2D> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    let n = pts.len();
    if n < 3 {
        return pts;
    }
    let cross = |o: Point2D, a: Point2D, b: Point2D| -> f64 {
        (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
    };
    let chain = |points: &mut dyn Iterator<Item = Point2D>| -> Vec<Point2D> {
        let mut half: Vec<Point2D> = Vec::with_capacity(n);
        for p in points {
            while half.len() >= 2 && cross(half[half.len() - 2], half[half.len() - 1], p) <= 0.0 {
                half.pop();
            }
            half.push(p);
        }
        half.pop();
        half
    };
    let mut hull = chain(&mut pts.iter().copied());
    hull.extend(chain(&mut pts.iter().rev().copied()));
    hull
}

/// Whether `p` lies inside or on the boundary of a convex polygon given in
/// counter-clockwise order. Degenerate polygons (< 3 vertices) contain only
/// their own points.
pub fn point_in_convex_polygon(p: Point2D, polygon: &[Point2D]) -> bool {
    match polygon.len() {
        0 => false,
        1 => p == polygon[0],
        2 => {
            // On the segment, within rounding.
            let (a, b) = (polygon[0], polygon[1]);
            let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            let within = p.x >= a.x.min(b.x) - 1e-12
                && p.x <= a.x.max(b.x) + 1e-12
                && p.y >= a.y.min(b.y) - 1e-12
                && p.y <= a.y.max(b.y) + 1e-12;
            cross.abs() < 1e-9 && within
        }
        n => {
            for i in 0..n {
                let a = polygon[i];
                let b = polygon[(i + 1) % n];
                let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
                if cross < 0.0 {
                    return false;
                }
            }
            true
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_pythagorean_triple() {
        assert_eq!(distance(Point2D::new(0.0, 0.0), Point2D::new(3.0, 4.0)), 5.0);
    }

    #[test]
    fn distance_identity_is_zero() {
        assert_eq!(distance(Point2D::new(2.0, 7.0), Point2D::new(2.0, 7.0)), 0.0);
    }

    #[test]
    fn distance_unit_diagonal() {
        // Cross-checked against hypot-style evaluation of |p - q|.
        let d = distance(Point2D::new(0.0, 0.0), Point2D::new(1.0, 1.0));
        assert!((d - 1.4142135623730951).abs() < 1e-15);
        assert!((d - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    #[should_panic]
    fn point_rejects_nan() {
        Point2D::new(f64::NAN, 0.0);
    }

    #[test]
    fn observation_set_rejects_empty() {
        assert!(ObservationSet::new(vec![]).is_none());
    }

    #[test]
    fn hull_of_square_grid() {
        let pts: Vec<Point2D> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)]
            .iter()
            .map(|&(x, y)| Point2D::new(x, y))
            .collect();
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 4);
        assert!(point_in_convex_polygon(Point2D::new(0.5, 0.5), &hull));
        assert!(point_in_convex_polygon(Point2D::new(0.0, 0.0), &hull));
        assert!(!point_in_convex_polygon(Point2D::new(1.2, 0.5), &hull));
    }
}
