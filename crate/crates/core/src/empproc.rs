// SPDX-License-Identifier: MIT OR Apache-2.0

//! Empirical distribution function, empirical quantiles and the Hermite
//! decomposition of the centered indicators
//!
//! ```text
//! 1{X_n ≤ x} − F(x) = L_n(x) + S_n(x),
//! L_n(x) = Σ_{l=1}^{⌊1/D⌋} c̃_l(x)/l! · H_l(ξ_n).
//! ```
//!
//! `S_n(x)` is obtained by subtraction, so the identity above is exact and the
//! only truncation is the finite long-memory block.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussgen::{exact_dn, replication_seed, FgnGenerator, LrdModel, TimeSeries};
use crate::hermite::{factorial, hermite_coeff_closed, hermite_values_into, lower_order_count};

/// Sorted copy of a sample for repeated CDF and quantile queries.
#[derive(Clone, Debug)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("empirical distribution of an empty series"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("series contains NaN"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `F_N(x) = #{n : X_n ≤ x} / N`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// The `⌈pN⌉`-th order statistic.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!(
                "quantile level must lie in (0, 1), got {p}"
            )));
        }
        let k = (p * self.sorted.len() as f64).ceil() as usize;
        Ok(self.sorted[k.clamp(1, self.sorted.len()) - 1])
    }
}

pub fn empirical_cdf(series: &TimeSeries, x: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::domain("empirical distribution of an empty series"));
    }
    let count = series.values.iter().filter(|&&v| v <= x).count();
    Ok(count as f64 / series.len() as f64)
}

pub fn empirical_quantile(series: &TimeSeries, p: f64) -> Result<f64> {
    Ecdf::new(&series.values)?.quantile(p)
}

/// `Σ_{n=1}^{⌊Nt⌋} (1{X_n ≤ x} − F(x))`.
pub fn sequential_empirical_process<F>(series: &TimeSeries, cdf: F, t: f64, x: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!(
            "time parameter must lie in [0, 1], got {t}"
        )));
    }
    let end = ((series.len() as f64) * t).floor() as usize;
    if end == 0 {
        return Ok(0.0);
    }
    let fx = cdf(x);
    Ok(series.values[..end]
        .iter()
        .map(|&v| if v <= x { 1.0 } else { 0.0 } - fx)
        .sum())
}

/// `c̃_l(x)/l!` for `l = 1..=order`.
fn scaled_coefficients(model: &LrdModel, order: usize, x: f64) -> Result<Vec<f64>> {
    (1..=order)
        .map(|l| Ok(hermite_coeff_closed(model.transform(), l, x)? / factorial(l)))
        .collect()
}

/// `L_n(x)` for every `n`.
pub fn lower_order_terms(driver: &[f64], model: &LrdModel, x: f64) -> Result<Vec<f64>> {
    let order = lower_order_count(model.hurst())?;
    let coeffs = scaled_coefficients(model, order, x)?;
    let mut h = vec![0.0; order + 1];
    Ok(driver
        .iter()
        .map(|&xi| {
            hermite_values_into(xi, &mut h);
            coeffs.iter().zip(&h[1..]).map(|(c, hl)| c * hl).sum()
        })
        .collect())
}

/// `(1/N) Σ_n L_n(x)`.
pub fn lower_order_mean(driver: &[f64], model: &LrdModel, x: f64) -> Result<f64> {
    if driver.is_empty() {
        return Err(Error::domain(
            "lower-order mean needs a non-empty Gaussian driver",
        ));
    }
    let terms = lower_order_terms(driver, model, x)?;
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

/// Long-memory mean and short-memory residual series at one `x`.
#[derive(Clone, Debug)]
pub struct HermiteDecomposition {
    pub x: f64,
    /// `(1/N) Σ_n L_n(x)`.
    pub lower_mean: f64,
    /// `S_n(x) = 1{X_n ≤ x} − F(x) − L_n(x)`, higher Hermite orders included.
    pub residuals: Vec<f64>,
    /// Highest Hermite order in the long-memory block, `⌊1/D⌋`.
    pub truncation: usize,
    pub hurst: f64,
    pub d_param: f64,
}

impl HermiteDecomposition {
    pub fn residual_mean(&self) -> f64 {
        self.residuals.iter().sum::<f64>() / self.residuals.len() as f64
    }
}

pub fn higher_order_residuals(
    series: &TimeSeries,
    model: &LrdModel,
    x: f64,
) -> Result<HermiteDecomposition> {
    if series.is_empty() {
        return Err(Error::domain("decomposition of an empty series"));
    }
    let driver = series.driver_for(model)?;
    if driver.len() != series.len() {
        return Err(Error::domain(format!(
            "driver length {} differs from series length {}",
            driver.len(),
            series.len()
        )));
    }
    let lower = lower_order_terms(&driver, model, x)?;
    let fx = model.marginal_cdf(x);
    let residuals: Vec<f64> = series
        .values
        .iter()
        .zip(&lower)
        .map(|(&v, l)| if v <= x { 1.0 } else { 0.0 } - fx - l)
        .collect();
    Ok(HermiteDecomposition {
        x,
        lower_mean: lower.iter().sum::<f64>() / lower.len() as f64,
        residuals,
        truncation: lower_order_count(model.hurst())?,
        hurst: model.hurst(),
        d_param: model.memory_d(),
    })
}

/// Draws of `(N/d_N)(F_N(x) − F(x)) / |c̃_1(x)|` over independent replications,
/// with `d_N² = Var(ξ_1 + … + ξ_N)`. Replication `r` uses seed `seed ^ r`;
/// the output is in replication order.
pub fn sampling_distribution_samples(
    model: &LrdModel,
    length: usize,
    reps: usize,
    x: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if reps == 0 {
        return Err(Error::domain("at least one replication is required"));
    }
    let gen = FgnGenerator::new(model.hurst(), length)?;
    let dn = exact_dn(model.hurst(), length)?;
    let c1 = hermite_coeff_closed(model.transform(), 1, x)?.abs();
    if c1 == 0.0 {
        return Err(Error::domain(format!(
            "first Hermite coefficient vanishes at x = {x}; standardization undefined"
        )));
    }
    let fx = model.marginal_cdf(x);
    let scale = length as f64 / (dn * c1);
    let transform = model.transform();
    Ok((0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let xi = gen.sample(replication_seed(seed, r));
            let below = xi.iter().filter(|&&y| transform.apply(y) <= x).count();
            scale * (below as f64 / length as f64 - fx)
        })
        .collect())
}
