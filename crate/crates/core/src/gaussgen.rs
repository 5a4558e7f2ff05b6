// SPDX-License-Identifier: MIT OR Apache-2.0

//! Long-range dependent Gaussian and subordinated Gaussian series.
//!
//! Series are driven by standardized fractional Gaussian noise (fGn), sampled
//! exactly by circulant embedding (Davies–Harte). Randomness comes from
//! `ChaCha8Rng::seed_from_u64(seed)`; replication `r` of an experiment with
//! base seed `s` uses seed `s ^ r` (see [`replication_seed`]), so any shard of
//! replications can be regenerated in isolation.
//!
//! The slowly varying part of the autocovariance is the constant 1
//! throughout.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::normal;

/// Eigenvalues of the circulant embedding above this are clamped to zero;
/// anything below is a hard error.
pub const EIGENVALUE_TOLERANCE: f64 = -1e-8;

/// Seed used for replication `rep` of a run with `base_seed`.
pub fn replication_seed(base_seed: u64, rep: u64) -> u64 {
    base_seed ^ rep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A strictly monotone bijection `G` applied to the Gaussian driver.
#[derive(Clone)]
pub enum Transform {
    Identity,
    /// `G(y) = exp(y)`; log-normal marginals.
    Exp,
    /// `G(y) = -y`.
    Negate,
    Custom {
        name: String,
        forward: ScalarFn,
        inverse: ScalarFn,
        monotonicity: Monotonicity,
    },
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Identity => f.write_str("Identity"),
            Transform::Exp => f.write_str("Exp"),
            Transform::Negate => f.write_str("Negate"),
            Transform::Custom {
                name, monotonicity, ..
            } => write!(f, "Custom({name}, {monotonicity:?})"),
        }
    }
}

impl std::str::FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" | "id" => Ok(Transform::Identity),
            "exp" => Ok(Transform::Exp),
            "negate" | "neg" => Ok(Transform::Negate),
            other => Err(Error::domain(format!(
                "unknown transform '{other}' (expected identity, exp or negate)"
            ))),
        }
    }
}

impl Transform {
    pub fn custom<F, I>(
        name: impl Into<String>,
        forward: F,
        inverse: I,
        monotonicity: Monotonicity,
    ) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        I: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Transform::Custom {
            name: name.into(),
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            monotonicity,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Transform::Identity => "identity",
            Transform::Exp => "exp",
            Transform::Negate => "negate",
            Transform::Custom { name, .. } => name,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Transform::Identity)
    }

    pub fn apply(&self, y: f64) -> f64 {
        match self {
            Transform::Identity => y,
            Transform::Exp => y.exp(),
            Transform::Negate => -y,
            Transform::Custom { forward, .. } => forward(y),
        }
    }

    /// `G⁻¹(x)`. Points outside the range of `G` map to `∓∞`.
    pub fn inverse(&self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Exp => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    x.ln()
                }
            }
            Transform::Negate => -x,
            Transform::Custom { inverse, .. } => inverse(x),
        }
    }

    /// Derivative of `G⁻¹` at `x`.
    pub fn inverse_derivative(&self, x: f64) -> f64 {
        match self {
            Transform::Identity => 1.0,
            Transform::Exp => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 / x
                }
            }
            Transform::Negate => -1.0,
            Transform::Custom { inverse, .. } => {
                let h = 1e-6 * x.abs().max(1.0);
                (inverse(x + h) - inverse(x - h)) / (2.0 * h)
            }
        }
    }

    pub fn monotonicity(&self) -> Monotonicity {
        match self {
            Transform::Identity | Transform::Exp => Monotonicity::Increasing,
            Transform::Negate => Monotonicity::Decreasing,
            Transform::Custom { monotonicity, .. } => *monotonicity,
        }
    }

    /// Probes strict monotonicity and `G(G⁻¹(x)) = x` on a driver grid over
    /// `[-6, 6]`.
    pub fn validate(&self) -> Result<()> {
        if !matches!(self, Transform::Custom { .. }) {
            return Ok(());
        }
        let sign = match self.monotonicity() {
            Monotonicity::Increasing => 1.0,
            Monotonicity::Decreasing => -1.0,
        };
        let mut previous: Option<f64> = None;
        for i in 0..=48 {
            let y = -6.0 + 0.25 * i as f64;
            let x = self.apply(y);
            if !x.is_finite() {
                return Err(Error::domain(format!(
                    "transform '{}' is not finite at driver value {y}",
                    self.name()
                )));
            }
            if let Some(prev) = previous {
                if sign * (x - prev) <= 0.0 {
                    return Err(Error::domain(format!(
                        "transform '{}' is not strictly {:?} near driver value {y}",
                        self.name(),
                        self.monotonicity()
                    )));
                }
            }
            previous = Some(x);
            let round_trip = self.apply(self.inverse(x));
            if (round_trip - x).abs() > 1e-10 * x.abs().max(1.0) {
                return Err(Error::domain(format!(
                    "transform '{}' inverse mismatch at {x}: G(G^-1(x)) = {round_trip}",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}

/// Generative model: standardized fGn with Hurst index `H`, observed through
/// a strictly monotone transform `G`.
#[derive(Clone, Debug)]
pub struct LrdModel {
    hurst: f64,
    transform: Transform,
}

impl LrdModel {
    pub fn new(hurst: f64, transform: Transform) -> Result<Self> {
        check_lrd_hurst(hurst)?;
        transform.validate()?;
        Ok(Self { hurst, transform })
    }

    /// Gaussian marginals (`G = id`).
    pub fn gaussian(hurst: f64) -> Result<Self> {
        Self::new(hurst, Transform::Identity)
    }

    pub fn with_hurst(&self, hurst: f64) -> Result<Self> {
        check_lrd_hurst(hurst)?;
        Ok(Self {
            hurst,
            transform: self.transform.clone(),
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    /// Memory parameter `D = 2 - 2H`.
    pub fn memory_d(&self) -> f64 {
        2.0 - 2.0 * self.hurst
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    /// `F(x) = P(G(ξ) ≤ x)`.
    pub fn marginal_cdf(&self, x: f64) -> f64 {
        let y = self.transform.inverse(x);
        match self.transform.monotonicity() {
            Monotonicity::Increasing => normal::cdf(y),
            Monotonicity::Decreasing => 1.0 - normal::cdf(y),
        }
    }

    pub fn marginal_density(&self, x: f64) -> f64 {
        let y = self.transform.inverse(x);
        normal::pdf(y) * self.transform.inverse_derivative(x).abs()
    }

    /// `F⁻¹(p)`.
    pub fn marginal_quantile(&self, p: f64) -> f64 {
        match self.transform.monotonicity() {
            Monotonicity::Increasing => self.transform.apply(normal::quantile(p)),
            Monotonicity::Decreasing => self.transform.apply(normal::quantile(1.0 - p)),
        }
    }
}

fn check_lrd_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.5 && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "Hurst index must lie in (0.5, 1), got {hurst}"
        )))
    }
}

/// A finite realization, optionally with its latent Gaussian driver.
#[derive(Clone, Debug, Default)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    /// `ξ_1..ξ_N` when known; `values[n] = G(driver[n])`.
    pub driver: Option<Vec<f64>>,
    pub model: Option<LrdModel>,
    pub seed: Option<u64>,
}

impl TimeSeries {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self {
            values,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The Gaussian driver: stored if present, otherwise recovered as
    /// `G⁻¹(X_n)`.
    pub fn driver_for(&self, model: &LrdModel) -> Result<std::borrow::Cow<'_, [f64]>> {
        if let Some(driver) = &self.driver {
            return Ok(std::borrow::Cow::Borrowed(driver));
        }
        let recovered: Vec<f64> = self
            .values
            .iter()
            .map(|&x| model.transform().inverse(x))
            .collect();
        if let Some(pos) = recovered.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "cannot recover the Gaussian driver: value {} at index {pos} is outside the range of '{}'",
                self.values[pos],
                model.transform().name()
            )));
        }
        Ok(std::borrow::Cow::Owned(recovered))
    }
}

/// Autocovariance of standardized fGn at `lag`:
/// `½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, lag: u64) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::domain(format!(
            "Hurst index must lie in (0, 1), got {hurst}"
        )));
    }
    Ok(fgn_acf_unchecked(hurst, lag as f64))
}

fn fgn_acf_unchecked(hurst: f64, k: f64) -> f64 {
    let two_h = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// Exact fGn sampler for a fixed `(H, N)`.
///
/// Holds the square-rooted eigenvalues of the size-`2N` circulant embedding
/// and the FFT plan, so repeated draws only cost one FFT each.
#[derive(Clone)]
pub struct FgnGenerator {
    hurst: f64,
    length: usize,
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FgnGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FgnGenerator")
            .field("hurst", &self.hurst)
            .field("length", &self.length)
            .finish()
    }
}

impl FgnGenerator {
    pub fn new(hurst: f64, length: usize) -> Result<Self> {
        check_lrd_hurst(hurst)?;
        if length < 2 {
            return Err(Error::domain(format!(
                "series length must be at least 2, got {length}"
            )));
        }
        let m = 2 * length;
        // First row of the circulant: γ(0..=N), γ(N-1..=1).
        let mut row: Vec<Complex<f64>> = Vec::with_capacity(m);
        for k in 0..=length {
            row.push(Complex::new(fgn_acf_unchecked(hurst, k as f64), 0.0));
        }
        for k in (1..length).rev() {
            row.push(Complex::new(fgn_acf_unchecked(hurst, k as f64), 0.0));
        }
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut row);

        let min_eigenvalue = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min_eigenvalue < EIGENVALUE_TOLERANCE {
            return Err(Error::Generation { min_eigenvalue });
        }
        let scale = row
            .iter()
            .map(|c| (c.re.max(0.0) / m as f64).sqrt())
            .collect();
        Ok(Self {
            hurst,
            length,
            scale,
            fft,
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// One standardized fGn path; a pure function of `seed`.
    pub fn sample(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut buf: Vec<Complex<f64>> = self
            .scale
            .iter()
            .map(|&s| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(s * re, s * im)
            })
            .collect();
        self.fft.process(&mut buf);
        buf.truncate(self.length);
        buf.into_iter().map(|c| c.re).collect()
    }

    pub fn series(&self, seed: u64) -> TimeSeries {
        let values = self.sample(seed);
        TimeSeries {
            driver: Some(values.clone()),
            values,
            model: LrdModel::gaussian(self.hurst).ok(),
            seed: Some(seed),
        }
    }
}

/// Stationary standardized fGn of the given length.
pub fn generate_fgn(hurst: f64, length: usize, seed: u64) -> Result<TimeSeries> {
    Ok(FgnGenerator::new(hurst, length)?.series(seed))
}

/// Applies the model's transform to the series driver.
pub fn subordinate(series: &TimeSeries, model: &LrdModel) -> Result<TimeSeries> {
    let driver = series
        .driver
        .as_ref()
        .ok_or_else(|| Error::domain("subordination needs the Gaussian driver"))?;
    model.transform().validate()?;
    Ok(TimeSeries {
        values: driver.iter().map(|&y| model.transform().apply(y)).collect(),
        driver: Some(driver.clone()),
        model: Some(model.clone()),
        seed: series.seed,
    })
}

/// `d_N = sqrt(Var(ξ_1 + … + ξ_N))` computed from the fGn autocovariance.
pub fn exact_dn(hurst: f64, length: usize) -> Result<f64> {
    check_lrd_hurst(hurst)?;
    if length == 0 {
        return Err(Error::domain("length must be positive"));
    }
    let n = length as f64;
    let cross: f64 = (1..length)
        .map(|k| (n - k as f64) * fgn_acf_unchecked(hurst, k as f64))
        .sum();
    Ok((n + 2.0 * cross).sqrt())
}

/// `sqrt(H(2H − 1)) · N^H`, the normalizer used by the classical bands.
pub fn asymptotic_dn(hurst: f64, length: usize) -> Result<f64> {
    check_lrd_hurst(hurst)?;
    if length == 0 {
        return Err(Error::domain("length must be positive"));
    }
    Ok((hurst * (2.0 * hurst - 1.0)).sqrt() * (length as f64).powf(hurst))
}
