//! Range-based lateration toolkit.
//!
//! Estimates 2-D positions from anchor range measurements with the Min-Max
//! bounding-box family (plain, extended weighted-vertex, membership-degree),
//! nonlinear least squares and maximum-likelihood estimators for normal and
//! shifted-gamma range errors. Around the estimators sit a calibration
//! pipeline that turns recorded (measured, reference) range pairs into
//! membership functions and fitted error models, a deterministic Monte-Carlo
//! simulator that maps the spatial distribution of the positioning error,
//! and a trace evaluator producing MAE / RMSE / MAX and box-plot metrics.
//!
//! ```
//! use lateration::geom::{AnchorObservation, ObservationSet, Point2D};
//! use lateration::locate::min_max;
//!
//! let obs = ObservationSet::new(vec![
//!     AnchorObservation::new(Point2D::new(0.0, 0.0), 6.0),
//!     AnchorObservation::new(Point2D::new(10.0, 0.0), 6.0),
//! ])
//! .unwrap();
//! let estimate = min_max(&obs);
//! assert_eq!((estimate.position.x, estimate.position.y), (5.0, 0.0));
//! ```

pub mod calibration;
pub mod error_model;
pub mod geom;
pub mod locate;
pub mod sim;
pub mod stats;
pub mod trace;

pub use geom::{distance, AnchorObservation, ObservationSet, Point2D};
pub use locate::{Algorithm, AlgorithmSpec, Estimate, EstimateStatus};
