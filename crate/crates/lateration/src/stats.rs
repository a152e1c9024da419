//! Small statistics helpers: single-pass moments, nearest-rank quantiles,
//! skewness and correlation. Population (divide-by-N) forms throughout.

/// Streaming mean and population variance (Welford's update).
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population variance (divide by N). Zero before any sample.
    pub fn variance(&self) -> f64 {
        if self.count == 0.0 {
            0.0
        } else {
            self.m2 / self.count
        }
    }

    pub fn count(&self) -> usize {
        self.count as usize
    }
}

/// Single-pass mean and population variance over a slice.
///
/// Returns `(0.0, 0.0)` for an empty slice.
pub fn welford_mean_var(values: &[f64]) -> (f64, f64) {
    let mut w = Welford::new();
    for &x in values {
        w.push(x);
    }
    (w.mean(), w.variance())
}

/// Nearest-rank quantile: the `ceil(q * n)`-th order statistic (1-indexed),
/// clamped to the available ranks. `values` need not be sorted.
///
/// Panics on an empty slice.
pub fn quantile_nearest_rank(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of empty slice");
    assert!((0.0..=1.0).contains(&q), "quantile level out of [0,1]");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let rank = (q * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Population skewness: third standardized moment m3 / m2^(3/2).
///
/// Returns 0.0 when the variance is zero.
pub fn skewness(values: &[f64]) -> f64 {
    let (mean, var) = welford_mean_var(values);
    if var == 0.0 {
        return 0.0;
    }
    let n = values.len() as f64;
    let m3 = values.iter().map(|&x| (x - mean).powi(3)).sum::<f64>() / n;
    m3 / var.powf(1.5)
}

/// Pearson correlation between two equal-length series.
///
/// Returns `None` when either marginal has zero variance.
pub fn pearson_correlation(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let (mx, vx) = welford_mean_var(xs);
    let (my, vy) = welford_mean_var(ys);
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    let n = xs.len() as f64;
    let cov = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (x - mx) * (y - my))
        .sum::<f64>()
        / n;
    Some(cov / (vx.sqrt() * vy.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_pass_mean_var(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / n;
        (mean, var)
    }

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 0.5, 0.25, 0.125, 3.5, -2.0];
        let (m1, v1) = welford_mean_var(&xs);
        let (m2, v2) = two_pass_mean_var(&xs);
        assert!((m1 - m2).abs() < 1e-12);
        assert!((v1 - v2).abs() < 1e-12);
    }

    #[test]
    fn quantile_odd_set() {
        let xs = [5.0, 1.0, 4.0, 2.0, 3.0];
        assert_eq!(quantile_nearest_rank(&xs, 0.005), 1.0);
        assert_eq!(quantile_nearest_rank(&xs, 0.5), 3.0);
        assert_eq!(quantile_nearest_rank(&xs, 0.995), 5.0);
        assert_eq!(quantile_nearest_rank(&xs, 0.25), 2.0);
        assert_eq!(quantile_nearest_rank(&xs, 0.75), 4.0);
    }

    #[test]
    fn quantile_extremes_clamp() {
        let xs = [7.0];
        assert_eq!(quantile_nearest_rank(&xs, 0.0), 7.0);
        assert_eq!(quantile_nearest_rank(&xs, 1.0), 7.0);
    }

    #[test]
    fn skewness_symmetric_is_zero() {
        assert_eq!(skewness(&[-2.0, 0.0, 2.0]), 0.0);
    }

    #[test]
    fn correlation_perfectly_linear() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [2.0, 4.0, 6.0];
        let r = pearson_correlation(&xs, &ys).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_degenerate_marginal() {
        assert!(pearson_correlation(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }
}
