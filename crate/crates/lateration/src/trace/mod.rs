//! Recorded localisation traces: JSON-Lines loading and saving, per-fix
//! evaluation of any estimator, and the MAE / RMSE / MAX / box-plot metrics.

pub mod gen;

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibration::ErrorSample;
use crate::geom::{distance, AnchorObservation, ObservationSet, Point2D};
use crate::locate::Algorithm;
use crate::stats::quantile_nearest_rank;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
    #[error("no fix has enough anchors for {algorithm} (minimum {minimum})")]
    NoEvaluableFixes {
        algorithm: String,
        minimum: usize,
    },
}

/// One recorded localisation: timestamp, ground truth and the observed
/// anchor ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFix {
    pub t: f64,
    pub truth: Point2D,
    pub observations: ObservationSet,
}

#[derive(Serialize, Deserialize)]
struct FixLine {
    t: f64,
    truth: Point2D,
    obs: Vec<AnchorObservation>,
}

fn malformed(path: &Path, line: usize, message: impl Into<String>) -> TraceError {
    TraceError::Malformed {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> TraceError {
    TraceError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Load a JSON-Lines trace: one fix per line,
/// `{"t": 0, "truth": [x, y], "obs": [{"a": [x, y], "r": 2.2}, ...]}`.
/// Fix order is preserved; blank lines are skipped.
pub fn load_trace(path: &Path) -> Result<Vec<TraceFix>, TraceError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let reader = BufReader::new(file);
    let mut fixes = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| io_error(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: FixLine = serde_json::from_str(&line)
            .map_err(|e| malformed(path, line_no, e.to_string()))?;
        for o in &parsed.obs {
            if !o.range.is_finite() || o.range < 0.0 {
                return Err(malformed(
                    path,
                    line_no,
                    format!("range {} is not a finite non-negative number", o.range),
                ));
            }
        }
        let observations = ObservationSet::new(parsed.obs)
            .ok_or_else(|| malformed(path, line_no, "fix has zero observations"))?;
        fixes.push(TraceFix {
            t: parsed.t,
            truth: parsed.truth,
            observations,
        });
    }
    Ok(fixes)
}

/// Write fixes in the JSON-Lines trace format.
pub fn save_trace(path: &Path, fixes: &[TraceFix]) -> Result<(), TraceError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = BufWriter::new(file);
    for fix in fixes {
        let line = FixLine {
            t: fix.t,
            truth: fix.truth,
            obs: fix.observations.as_slice().to_vec(),
        };
        serde_json::to_writer(&mut w, &line).map_err(|e| {
            io_error(path, std::io::Error::new(std::io::ErrorKind::InvalidData, e))
        })?;
        w.write_all(b"\n").map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Load calibration samples from JSON Lines of `{"r": 2.2, "rbar": 2.0}`.
pub fn load_calibration_samples(path: &Path) -> Result<Vec<ErrorSample>, TraceError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let reader = BufReader::new(file);
    let mut samples = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_error(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let sample: ErrorSample = serde_json::from_str(&line)
            .map_err(|e| malformed(path, idx + 1, e.to_string()))?;
        samples.push(sample);
    }
    Ok(samples)
}

/// Write calibration samples as JSON Lines.
pub fn save_calibration_samples(path: &Path, samples: &[ErrorSample]) -> Result<(), TraceError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = BufWriter::new(file);
    for s in samples {
        serde_json::to_writer(&mut w, s).map_err(|e| {
            io_error(path, std::io::Error::new(std::io::ErrorKind::InvalidData, e))
        })?;
        w.write_all(b"\n").map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Five-number box-plot summary with 1.5 IQR outlier fences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub iqr: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    pub outliers: Vec<f64>,
}

/// Nearest-rank quartiles, IQR, fences at quartile -/+ 1.5 IQR and the
/// values outside them.
pub fn boxplot_stats(values: &[f64]) -> BoxplotStats {
    assert!(!values.is_empty(), "boxplot of empty list");
    let q1 = quantile_nearest_rank(values, 0.25);
    let median = quantile_nearest_rank(values, 0.5);
    let q3 = quantile_nearest_rank(values, 0.75);
    let iqr = q3 - q1;
    let lower_fence = q1 - 1.5 * iqr;
    let upper_fence = q3 + 1.5 * iqr;
    let outliers = values
        .iter()
        .copied()
        .filter(|&v| v < lower_fence || v > upper_fence)
        .collect();
    BoxplotStats {
        q1,
        median,
        q3,
        iqr,
        lower_fence,
        upper_fence,
        outliers,
    }
}

/// Aggregate position-error metrics over a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mae: f64,
    pub rmse: f64,
    pub max: f64,
    pub boxplot: BoxplotStats,
    /// Fixes that were evaluated.
    pub count: usize,
    /// Fixes skipped for having fewer anchors than the algorithm needs.
    pub skipped: usize,
}

impl Metrics {
    pub fn from_errors(errors: &[f64], skipped: usize) -> Self {
        assert!(!errors.is_empty(), "metrics of empty error list");
        let n = errors.len() as f64;
        let mae = errors.iter().sum::<f64>() / n;
        let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
        let max = errors.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Metrics {
            mae,
            rmse,
            max,
            boxplot: boxplot_stats(errors),
            count: errors.len(),
            skipped,
        }
    }
}

/// Run one estimator over every fix and compute metrics on the position
/// errors. Fixes with fewer anchors than the estimator accepts are skipped
/// and counted, mirroring real traces with measurement dropouts.
pub fn evaluate(
    trace: &[TraceFix],
    algorithm: &Algorithm,
) -> Result<(Metrics, Vec<f64>), TraceError> {
    let minimum = algorithm.min_anchors();
    let evaluable: Vec<&TraceFix> = trace
        .iter()
        .filter(|f| f.observations.len() >= minimum)
        .collect();
    let skipped = trace.len() - evaluable.len();
    if evaluable.is_empty() {
        return Err(TraceError::NoEvaluableFixes {
            algorithm: algorithm.name().to_string(),
            minimum,
        });
    }
    let errors: Vec<f64> = evaluable
        .par_iter()
        .map(|fix| {
            let estimate = algorithm.estimate(&fix.observations);
            distance(estimate.position, fix.truth)
        })
        .collect();
    Ok((Metrics::from_errors(&errors, skipped), errors))
}

/// Plain-text results table: one row per algorithm, two-decimal MAE / RMSE /
/// MAX columns.
pub fn metrics_table(rows: &[(String, Metrics)]) -> String {
    let name_width = rows
        .iter()
        .map(|(name, _)| name.len())
        .max()
        .unwrap_or(0)
        .max("Algorithm".len());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_width$}  {:>8}  {:>8}  {:>8}",
        "Algorithm", "MAE [m]", "RMSE [m]", "MAX [m]"
    );
    for (name, m) in rows {
        let _ = writeln!(
            out,
            "{name:<name_width$}  {:>8.2}  {:>8.2}  {:>8.2}",
            m.mae, m.rmse, m.max
        );
    }
    out
}
