// SPDX-License-Identifier: MIT OR Apache-2.0

//! Pointwise confidence bands for `F(x)` and confidence intervals for
//! quantiles `F⁻¹(p)`, each in an asymptotic and a higher-order (HOA) flavour.
//!
//! Asymptotic regions use `(d_N/N)|c̃_1(x)| z_{1−α/2}` as half-width. HOA
//! regions recentre at `F_N(x) − L̄_N(x)` and use `σ(x) z_{1−α/2} / √N`, where
//! `σ²(x)` is the long-run variance of the residual series `S_n(x)`.
//!
//! Band endpoints are clamped to `[0, 1]`. Interval endpoints are sorted so
//! that `lower ≤ upper` whatever the sign conventions of the critical values.

use std::fmt;
use std::str::FromStr;

use crate::empproc::{higher_order_residuals, lower_order_mean, Ecdf};
use crate::error::{Error, Result};
use crate::estimators::{bartlett_lrv, default_bandwidth, LrvEstimate};
use crate::gaussgen::{asymptotic_dn, exact_dn, LrdModel, TimeSeries};
use crate::hermite::hermite_coeff_closed;
use crate::normal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Asymptotic,
    Hoa,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Asymptotic, Method::Hoa];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Asymptotic => "asymptotic",
            Method::Hoa => "hoa",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymptotic" | "asymp" => Ok(Method::Asymptotic),
            "hoa" => Ok(Method::Hoa),
            other => Err(Error::domain(format!(
                "unknown method '{other}' (expected asymptotic or hoa)"
            ))),
        }
    }
}

/// Which `d_N` the asymptotic regions use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Normalizer {
    /// `sqrt(H(2H−1)) N^H`.
    #[default]
    Asymptotic,
    /// `sqrt(Var(ξ_1 + … + ξ_N))`.
    Exact,
}

impl Normalizer {
    pub fn dn(self, hurst: f64, length: usize) -> Result<f64> {
        match self {
            Normalizer::Asymptotic => asymptotic_dn(hurst, length),
            Normalizer::Exact => exact_dn(hurst, length),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegionKind {
    Band,
    QuantileInterval { p: f64 },
}

/// One evaluation point. For quantile intervals `x` holds the level `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionPoint {
    pub x: f64,
    pub lower: f64,
    pub upper: f64,
    pub center: f64,
}

impl RegionPoint {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// What went into a region.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InputsDigest {
    pub n: usize,
    pub hurst: f64,
    pub hurst_estimated: bool,
    /// `σ̂(x)` per point; empty for asymptotic regions.
    pub sigma: Vec<f64>,
    /// `d_N`; zero for HOA regions.
    pub dn: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfidenceRegion {
    pub kind: RegionKind,
    pub method: Method,
    /// Nominal coverage `1 − α`.
    pub level: f64,
    pub points: Vec<RegionPoint>,
    pub digest: InputsDigest,
}

impl ConfidenceRegion {
    pub fn lower(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lower).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.upper).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.points.iter().map(RegionPoint::width).collect()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

fn check_grid(x_grid: &[f64]) -> Result<()> {
    if x_grid.is_empty() {
        return Err(Error::domain("evaluation grid is empty"));
    }
    if x_grid.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("evaluation grid contains NaN"));
    }
    Ok(())
}

fn clamped(x: f64, center: f64, half_width: f64) -> RegionPoint {
    RegionPoint {
        x,
        lower: (center - half_width).clamp(0.0, 1.0),
        upper: (center + half_width).clamp(0.0, 1.0),
        center,
    }
}

fn sorted(x: f64, center: f64, a: f64, b: f64) -> RegionPoint {
    RegionPoint {
        x,
        lower: a.min(b),
        upper: a.max(b),
        center,
    }
}

/// Asymptotic band with the default normalizer.
pub fn asymptotic_band(
    series: &TimeSeries,
    model: &LrdModel,
    alpha: f64,
    x_grid: &[f64],
) -> Result<ConfidenceRegion> {
    asymptotic_band_with(series, model, alpha, x_grid, Normalizer::default())
}

/// `F_N(x) ∓ (d_N/N)|c̃_1(x)| z_{1−α/2}`, clamped to `[0, 1]`.
pub fn asymptotic_band_with(
    series: &TimeSeries,
    model: &LrdModel,
    alpha: f64,
    x_grid: &[f64],
    normalizer: Normalizer,
) -> Result<ConfidenceRegion> {
    check_alpha(alpha)?;
    check_grid(x_grid)?;
    let ecdf = Ecdf::new(&series.values)?;
    let n = ecdf.len();
    let dn = normalizer.dn(model.hurst(), n)?;
    let z = normal::two_sided_critical(alpha);
    let points = x_grid
        .iter()
        .map(|&x| {
            let c1 = hermite_coeff_closed(model.transform(), 1, x)?.abs();
            Ok(clamped(x, ecdf.cdf(x), dn / n as f64 * c1 * z))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConfidenceRegion {
        kind: RegionKind::Band,
        method: Method::Asymptotic,
        level: 1.0 - alpha,
        points,
        digest: InputsDigest {
            n,
            hurst: model.hurst(),
            dn,
            ..InputsDigest::default()
        },
    })
}

/// Long-run variance of the residual series `S_n(x)`; the bandwidth defaults
/// to `⌊N^{1/3}⌋`.
pub fn residual_lrv(
    series: &TimeSeries,
    model: &LrdModel,
    x: f64,
    bandwidth: Option<usize>,
) -> Result<LrvEstimate> {
    let decomposition = higher_order_residuals(series, model, x)?;
    let b = match bandwidth {
        Some(b) => b,
        None => default_bandwidth(series.len())?,
    };
    bartlett_lrv(&decomposition.residuals, b)
}

/// `σ̂(x)` over a grid, see [`residual_lrv`].
pub fn residual_sigma_grid(
    series: &TimeSeries,
    model: &LrdModel,
    x_grid: &[f64],
    bandwidth: Option<usize>,
) -> Result<Vec<f64>> {
    x_grid
        .iter()
        .map(|&x| residual_lrv(series, model, x, bandwidth).map(|e| e.sigma()))
        .collect()
}

/// `F_N(x) − L̄_N(x) ∓ σ(x) z_{1−α/2} / √N`, clamped to `[0, 1]`.
pub fn hoa_band(
    series: &TimeSeries,
    model: &LrdModel,
    alpha: f64,
    x_grid: &[f64],
    sigma: &[f64],
) -> Result<ConfidenceRegion> {
    check_alpha(alpha)?;
    check_grid(x_grid)?;
    if sigma.len() != x_grid.len() {
        return Err(Error::domain(format!(
            "{} sigma values for {} grid points",
            sigma.len(),
            x_grid.len()
        )));
    }
    if let Some((x, s)) = x_grid.iter().zip(sigma).find(|(_, s)| !(**s > 0.0)) {
        return Err(Error::Estimation(format!(
            "long-run standard deviation at x = {x} is {s}; need a positive value"
        )));
    }
    let ecdf = Ecdf::new(&series.values)?;
    let n = ecdf.len();
    let driver = series.driver_for(model)?;
    let z = normal::two_sided_critical(alpha);
    let root_n = (n as f64).sqrt();
    let points = x_grid
        .iter()
        .zip(sigma)
        .map(|(&x, &s)| {
            let center = ecdf.cdf(x) - lower_order_mean(&driver, model, x)?;
            Ok(clamped(x, center, s * z / root_n))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConfidenceRegion {
        kind: RegionKind::Band,
        method: Method::Hoa,
        level: 1.0 - alpha,
        points,
        digest: InputsDigest {
            n,
            hurst: model.hurst(),
            sigma: sigma.to_vec(),
            ..InputsDigest::default()
        },
    })
}

fn quantile_density(model: &LrdModel, p: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "quantile level must lie in (0, 1), got {p}"
        )));
    }
    let q = model.marginal_quantile(p);
    let f = model.marginal_density(q);
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::domain(format!(
            "marginal density at the {p}-quantile {q} is {f}; need a positive value"
        )));
    }
    Ok((q, f))
}

/// `F_N⁻¹(p) ∓ (d_N/N)(|c̃_1(q)| / f(q)) z_{1−α/2}` with `q = F⁻¹(p)`.
pub fn asymptotic_quantile_ci(
    series: &TimeSeries,
    model: &LrdModel,
    alpha: f64,
    p: f64,
) -> Result<ConfidenceRegion> {
    asymptotic_quantile_ci_with(series, model, alpha, p, Normalizer::default())
}

pub fn asymptotic_quantile_ci_with(
    series: &TimeSeries,
    model: &LrdModel,
    alpha: f64,
    p: f64,
    normalizer: Normalizer,
) -> Result<ConfidenceRegion> {
    check_alpha(alpha)?;
    let (q, f) = quantile_density(model, p)?;
    let ecdf = Ecdf::new(&series.values)?;
    let n = ecdf.len();
    let dn = normalizer.dn(model.hurst(), n)?;
    let c1 = hermite_coeff_closed(model.transform(), 1, q)?.abs();
    let center = ecdf.quantile(p)?;
    let half = dn / n as f64 * c1 / f;
    let z_lo = normal::quantile(alpha / 2.0);
    let z_hi = normal::quantile(1.0 - alpha / 2.0);
    Ok(ConfidenceRegion {
        kind: RegionKind::QuantileInterval { p },
        method: Method::Asymptotic,
        level: 1.0 - alpha,
        points: vec![sorted(
            p,
            center,
            center - half * z_lo,
            center - half * z_hi,
        )],
        digest: InputsDigest {
            n,
            hurst: model.hurst(),
            dn,
            ..InputsDigest::default()
        },
    })
}

/// `F_N⁻¹(p) + (L̄_N(q) + σ(q) z / √N) / f(q)` for `z = z_{α/2}, z_{1−α/2}`.
pub fn hoa_quantile_ci(
    series: &TimeSeries,
    model: &LrdModel,
    alpha: f64,
    p: f64,
    sigma_at_q: f64,
) -> Result<ConfidenceRegion> {
    check_alpha(alpha)?;
    if !(sigma_at_q > 0.0) {
        return Err(Error::Estimation(format!(
            "long-run standard deviation at the {p}-quantile is {sigma_at_q}; need a positive value"
        )));
    }
    let (q, f) = quantile_density(model, p)?;
    let ecdf = Ecdf::new(&series.values)?;
    let n = ecdf.len();
    let driver = series.driver_for(model)?;
    let lbar = lower_order_mean(&driver, model, q)?;
    let center = ecdf.quantile(p)? + lbar / f;
    let scale = sigma_at_q / ((n as f64).sqrt() * f);
    let z_lo = normal::quantile(alpha / 2.0);
    let z_hi = normal::quantile(1.0 - alpha / 2.0);
    Ok(ConfidenceRegion {
        kind: RegionKind::QuantileInterval { p },
        method: Method::Hoa,
        level: 1.0 - alpha,
        points: vec![sorted(
            p,
            center,
            center + scale * z_lo,
            center + scale * z_hi,
        )],
        digest: InputsDigest {
            n,
            hurst: model.hurst(),
            sigma: vec![sigma_at_q],
            ..InputsDigest::default()
        },
    })
}
