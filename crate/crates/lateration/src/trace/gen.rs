//! Synthetic trace generation: seeded anchor layouts, ground-truth
//! positions, per-fix anchor visibility and shifted-gamma range errors.
//!
//! Recorded deployment data is not shipped with this toolkit; these traces
//! stand in for it when comparing estimators, with every choice seeded and
//! reproducible.

use rand::Rng;

use crate::calibration::ErrorSample;
use crate::error_model::{substream, GammaErrorModel};
use crate::geom::{distance, AnchorObservation, ObservationSet, Point2D};
use crate::trace::TraceFix;

/// Parameters of one synthetic trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceGenConfig {
    pub field_width: f64,
    pub field_height: f64,
    pub n_anchors: usize,
    pub n_fixes: usize,
    /// Probability that an anchor produces a range for a given fix.
    pub visibility: f64,
    /// Fixes are topped up to this many observations with the nearest
    /// unused anchors, mirroring the dropout floor of real recordings.
    pub min_visible: usize,
    pub error: GammaErrorModel,
    pub seed: u64,
}

impl TraceGenConfig {
    /// An office-building-sized default: 80 x 40 m field, 17 anchors,
    /// 300 fixes, visibility tuned to an average anchor degree near 7.5.
    pub fn office_default(seed: u64) -> Self {
        TraceGenConfig {
            field_width: 80.0,
            field_height: 40.0,
            n_anchors: 17,
            n_fixes: 300,
            visibility: 0.44,
            min_visible: 3,
            error: GammaErrorModel::new(3.3, 0.58, -3.31).expect("valid parameters"),
            seed,
        }
    }
}

// Substream domains; index within a domain is packed in the low bits.
const STREAM_ANCHORS: u64 = 0;
const DOMAIN_TRUTH: u64 = 1 << 32;
const DOMAIN_VISIBILITY: u64 = 2 << 32;
const DOMAIN_RANGE: u64 = 3 << 32;

/// Generate one trace. Identical configs produce identical traces.
pub fn generate_trace(cfg: &TraceGenConfig) -> Vec<TraceFix> {
    assert!(cfg.n_anchors >= 1 && cfg.n_fixes >= 1);
    assert!(cfg.min_visible >= 1 && cfg.min_visible <= cfg.n_anchors);
    let anchors = anchor_layout(cfg);
    (0..cfg.n_fixes)
        .map(|fix| {
            let truth = {
                let mut rng = substream(cfg.seed, DOMAIN_TRUTH | fix as u64);
                Point2D {
                    x: rng.random::<f64>() * cfg.field_width,
                    y: rng.random::<f64>() * cfg.field_height,
                }
            };
            let visible = visible_anchors(cfg, &anchors, truth, fix);
            let observations: Vec<AnchorObservation> = visible
                .into_iter()
                .map(|a| {
                    let stream = DOMAIN_RANGE | (fix * cfg.n_anchors + a) as u64;
                    let mut rng = substream(cfg.seed, stream);
                    let true_dist = distance(truth, anchors[a]);
                    let range = (true_dist + cfg.error.sample(&mut rng)).max(0.0);
                    AnchorObservation {
                        anchor: anchors[a],
                        range,
                    }
                })
                .collect();
            TraceFix {
                t: fix as f64,
                truth,
                observations: ObservationSet::new(observations).expect("min_visible >= 1"),
            }
        })
        .collect()
}

fn anchor_layout(cfg: &TraceGenConfig) -> Vec<Point2D> {
    let mut rng = substream(cfg.seed, STREAM_ANCHORS);
    (0..cfg.n_anchors)
        .map(|_| Point2D {
            x: rng.random::<f64>() * cfg.field_width,
            y: rng.random::<f64>() * cfg.field_height,
        })
        .collect()
}

/// Indices of the anchors contributing a range to this fix: an independent
/// coin per anchor, topped up with the nearest unused anchors when fewer
/// than `min_visible` succeed.
fn visible_anchors(
    cfg: &TraceGenConfig,
    anchors: &[Point2D],
    truth: Point2D,
    fix: usize,
) -> Vec<usize> {
    let mut rng = substream(cfg.seed, DOMAIN_VISIBILITY | fix as u64);
    let mut visible: Vec<usize> = (0..anchors.len())
        .filter(|_| rng.random::<f64>() < cfg.visibility)
        .collect();
    if visible.len() < cfg.min_visible {
        let mut rest: Vec<usize> = (0..anchors.len())
            .filter(|i| !visible.contains(i))
            .collect();
        rest.sort_by(|&a, &b| {
            distance(truth, anchors[a])
                .partial_cmp(&distance(truth, anchors[b]))
                .unwrap()
        });
        visible.extend(rest.into_iter().take(cfg.min_visible - visible.len()));
        visible.sort_unstable();
    }
    visible
}

/// Generate (measured, reference) calibration pairs from the same error
/// model, on reference distances far enough from zero that clamping never
/// distorts the error distribution.
pub fn generate_calibration(
    error: &GammaErrorModel,
    n_samples: usize,
    seed: u64,
) -> Vec<ErrorSample> {
    let floor = (-error.location).max(0.0) + 1.0;
    (0..n_samples)
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let rbar = floor + rng.random::<f64>() * 36.0;
            let r = (rbar + error.sample(&mut rng)).max(0.0);
            ErrorSample { r, rbar }
        })
        .collect()
}
