// SPDX-License-Identifier: MIT OR Apache-2.0

//! Sample autocovariance, Bartlett long-run variance and the rescaled-range
//! (R/S) Hurst estimator.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};

/// Bartlett-kernel long-run variance estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct LrvEstimate {
    /// `σ̂² ≥ 0`.
    pub value: f64,
    pub bandwidth: usize,
    /// Lags with non-zero kernel weight, `−(b−1)..=(b−1)`.
    pub lags_used: RangeInclusive<isize>,
    /// The raw kernel sum was at or below rounding level (relative to the
    /// mean square of the series) and has been set to zero. With divisor-`N`
    /// autocovariances the exact sum is never negative, so this flags
    /// degenerate, numerically constant input.
    pub truncated: bool,
}

impl LrvEstimate {
    pub fn sigma(&self) -> f64 {
        self.value.sqrt()
    }
}

fn mean(series: &[f64]) -> f64 {
    series.iter().sum::<f64>() / series.len() as f64
}

/// Biased (divisor `N`) autocovariances `γ̂(0..=max_lag)`.
fn autocovariances(series: &[f64], max_lag: usize) -> Vec<f64> {
    let n = series.len();
    let m = mean(series);
    let centered: Vec<f64> = series.iter().map(|v| v - m).collect();
    (0..=max_lag)
        .map(|lag| {
            centered[..n - lag]
                .iter()
                .zip(&centered[lag..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// `γ̂(j) = (1/N) Σ_{n=1}^{N−|j|} (y_n − ȳ)(y_{n+|j|} − ȳ)`.
pub fn sample_autocovariance(series: &[f64], lag: isize) -> Result<f64> {
    let n = series.len();
    if n < 2 {
        return Err(Error::domain(format!(
            "autocovariance needs at least 2 observations, got {n}"
        )));
    }
    let lag = lag.unsigned_abs();
    if lag >= n {
        return Err(Error::domain(format!(
            "lag {lag} out of range for series of length {n}"
        )));
    }
    Ok(autocovariances(series, lag)[lag])
}

/// `σ̂² = Σ_j K(j/b) γ̂(j)` with the Bartlett kernel `K(u) = (1 − |u|)₊`.
pub fn bartlett_lrv(series: &[f64], bandwidth: usize) -> Result<LrvEstimate> {
    let n = series.len();
    if bandwidth == 0 || bandwidth + 1 > n {
        return Err(Error::domain(format!(
            "bandwidth must lie in [1, N-1] = [1, {}], got {bandwidth}",
            n.saturating_sub(1)
        )));
    }
    let gamma = autocovariances(series, bandwidth - 1);
    let b = bandwidth as f64;
    let raw = gamma[0]
        + 2.0
            * gamma[1..]
                .iter()
                .enumerate()
                .map(|(i, g)| (1.0 - (i + 1) as f64 / b) * g)
                .sum::<f64>();
    let max_lag = bandwidth as isize - 1;
    let scale = series.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let truncated = raw <= f64::EPSILON * scale;
    Ok(LrvEstimate {
        value: if truncated { 0.0 } else { raw },
        bandwidth,
        lags_used: -max_lag..=max_lag,
        truncated,
    })
}

/// `max(1, ⌊N^{1/3}⌋)`.
pub fn default_bandwidth(length: usize) -> Result<usize> {
    if length < 8 {
        return Err(Error::domain(format!(
            "default bandwidth needs at least 8 observations, got {length}"
        )));
    }
    let mut b = (length as f64).cbrt().floor() as usize;
    while (b + 1).pow(3) <= length {
        b += 1;
    }
    while b > 1 && b.pow(3) > length {
        b -= 1;
    }
    Ok(b.max(1))
}

/// Smallest block size of the R/S regression; 8 for series shorter than 64.
fn min_block(n: usize) -> usize {
    if n >= 64 {
        16
    } else {
        8
    }
}

/// Average rescaled range over the non-overlapping blocks of size `m`, or
/// `None` when every block is constant.
fn mean_rescaled_range(series: &[f64], m: usize) -> Option<f64> {
    let mut total = 0.0;
    let mut used = 0usize;
    for block in series.chunks_exact(m) {
        let mu = mean(block);
        let var = block.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / m as f64;
        let sd = var.sqrt();
        if !(sd > 0.0) || sd < 1e-12 * mu.abs().max(1.0) {
            continue;
        }
        let (mut cum, mut lo, mut hi) = (0.0f64, 0.0f64, 0.0f64);
        for v in block {
            cum += v - mu;
            lo = lo.min(cum);
            hi = hi.max(cum);
        }
        total += (hi - lo) / sd;
        used += 1;
    }
    (used > 0).then(|| total / used as f64)
}

/// Hurst index from the log-log slope of the mean rescaled range against
/// dyadic block sizes `16, 32, …, ⌊N/2⌋`. The slope is clamped to
/// `[0.01, 0.99]`.
pub fn rs_hurst(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 32 {
        return Err(Error::domain(format!(
            "R/S estimation needs at least 32 observations, got {n}"
        )));
    }
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut m = min_block(n);
    while m <= n / 2 {
        if let Some(rs) = mean_rescaled_range(series, m) {
            if rs > 0.0 {
                points.push(((m as f64).ln(), rs.ln()));
            }
        }
        m *= 2;
    }
    if points.len() < 2 {
        return Err(Error::Estimation(
            "R/S estimation failed: fewer than two block sizes with non-constant blocks".into(),
        ));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    if !slope.is_finite() {
        return Err(Error::Estimation(
            "R/S regression slope is not finite".into(),
        ));
    }
    Ok(slope.clamp(0.01, 0.99))
}
