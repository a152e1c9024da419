//! Calibration: turns recorded (measured range, reference range) samples into
//! membership-function parameters, fitted normal / shifted-gamma error
//! models and descriptive statistics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error_model::{GammaErrorModel, NormalErrorModel};
use crate::locate::{MfError, TriangularMF};
use crate::stats::{pearson_correlation, quantile_nearest_rank, skewness, welford_mean_var};

#[derive(Debug, Error, PartialEq)]
pub enum CalibrationError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("samples are constant; cannot fit a spread")]
    ConstantSamples,
    #[error("degenerate membership function: {0}")]
    DegenerateMf(#[from] MfError),
    #[error("shifted samples have zero mean or variance")]
    DegenerateShift,
}

/// One calibration sample: a measured range and the reference range the
/// measurement should have produced, both in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    /// Measured range `r`.
    pub r: f64,
    /// Reference range `rbar`.
    pub rbar: f64,
}

impl ErrorSample {
    pub fn error(&self) -> f64 {
        self.r - self.rbar
    }
}

/// Descriptive statistics of a calibration sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub count: usize,
    pub mean_abs_error: f64,
    pub rmse: f64,
    pub skewness: f64,
    /// Pearson correlation between |error| and reference distance.
    pub correlation_error_vs_distance: f64,
    /// Set when a zero-variance marginal forced the correlation to 0.
    pub correlation_degenerate: bool,
}

/// Membership-function calibration: (q_low quantile, median, q_high
/// quantile) of the range errors, all by the nearest-rank method.
pub fn calibrate_mf(
    errors: &[f64],
    q_low: f64,
    q_high: f64,
) -> Result<TriangularMF, CalibrationError> {
    if errors.len() < 3 {
        return Err(CalibrationError::TooFewSamples {
            needed: 3,
            got: errors.len(),
        });
    }
    let low = quantile_nearest_rank(errors, q_low);
    let median = quantile_nearest_rank(errors, 0.5);
    let up = quantile_nearest_rank(errors, q_high);
    Ok(TriangularMF::new(low, median, up)?)
}

/// Calibration with the default 0.005 / 0.995 quantile guards.
pub fn calibrate_mf_default(errors: &[f64]) -> Result<TriangularMF, CalibrationError> {
    calibrate_mf(errors, 0.005, 0.995)
}

/// Maximum-likelihood normal fit: sample mean and population standard
/// deviation. Constant input has no spread and is rejected.
pub fn fit_normal(errors: &[f64]) -> Result<NormalErrorModel, CalibrationError> {
    if errors.len() < 2 {
        return Err(CalibrationError::TooFewSamples {
            needed: 2,
            got: errors.len(),
        });
    }
    let (mean, var) = welford_mean_var(errors);
    if var == 0.0 {
        return Err(CalibrationError::ConstantSamples);
    }
    Ok(NormalErrorModel::new(mean, var.sqrt()).expect("positive sigma"))
}

/// Shifted-gamma fit: the location is the smallest observed error and the
/// shape/rate come from the method of moments on the shifted data
/// (alpha = m^2/v, beta = m/v).
pub fn fit_gamma(errors: &[f64]) -> Result<GammaErrorModel, CalibrationError> {
    if errors.len() < 3 {
        return Err(CalibrationError::TooFewSamples {
            needed: 3,
            got: errors.len(),
        });
    }
    let location = errors.iter().cloned().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = errors.iter().map(|e| e - location).collect();
    let (mean, var) = welford_mean_var(&shifted);
    if mean == 0.0 || var == 0.0 {
        return Err(CalibrationError::DegenerateShift);
    }
    Ok(GammaErrorModel::new(mean * mean / var, mean / var, location)
        .expect("positive moments"))
}

/// Descriptive statistics over a calibration set.
pub fn error_stats(samples: &[ErrorSample]) -> Result<ErrorStats, CalibrationError> {
    if samples.len() < 2 {
        return Err(CalibrationError::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let errors: Vec<f64> = samples.iter().map(ErrorSample::error).collect();
    let abs_errors: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
    let distances: Vec<f64> = samples.iter().map(|s| s.rbar).collect();
    let n = errors.len() as f64;
    let mean_abs_error = abs_errors.iter().sum::<f64>() / n;
    let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    let correlation = pearson_correlation(&abs_errors, &distances);
    Ok(ErrorStats {
        count: samples.len(),
        mean_abs_error,
        rmse,
        skewness: skewness(&errors),
        correlation_error_vs_distance: correlation.unwrap_or(0.0),
        correlation_degenerate: correlation.is_none(),
    })
}

/// The full calibration output written as JSON by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub mf: TriangularMF,
    pub normal: NormalErrorModel,
    pub gamma: GammaErrorModel,
    pub stats: ErrorStats,
}

/// Run the whole pipeline on one sample set.
pub fn calibrate(samples: &[ErrorSample]) -> Result<CalibrationReport, CalibrationError> {
    let errors: Vec<f64> = samples.iter().map(ErrorSample::error).collect();
    Ok(CalibrationReport {
        mf: calibrate_mf_default(&errors)?,
        normal: fit_normal(&errors)?,
        gamma: fit_gamma(&errors)?,
        stats: error_stats(samples)?,
    })
}
