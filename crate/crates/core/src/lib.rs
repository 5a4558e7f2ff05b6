// SPDX-License-Identifier: MIT OR Apache-2.0

//! Confidence bands for the marginal distribution and confidence intervals for
//! quantiles of long-range dependent time series.
//!
//! Two constructions are provided side by side:
//!
//! * the classical one, based on the asymptotic (reduction principle)
//!   distribution of the empirical process, with `d_N ~ sqrt(H(2H-1)) N^H`;
//! * a higher-order approximation (HOA) that removes the long-memory block
//!   `L_n(x)` of the Hermite expansion of the indicators and uses the
//!   `sqrt(N)`-scale Gaussian limit of the remaining short-memory block
//!   `S_n(x)`, with its long-run variance estimated by a Bartlett kernel.
//!
//! The crate also contains everything needed to study the two methods by
//! simulation: an exact fractional Gaussian noise generator, Hermite machinery,
//! Hurst and long-run variance estimators, and a deterministic Monte Carlo
//! coverage harness.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod confidence;
pub mod empproc;
pub mod error;
pub mod estimators;
pub mod gaussgen;
pub mod hermite;
pub mod io;
pub mod montecarlo;
pub mod normal;
pub mod quadrature;

pub use error::{Error, Result};

pub use confidence::{
    asymptotic_band, asymptotic_band_with, asymptotic_quantile_ci, asymptotic_quantile_ci_with,
    hoa_band, hoa_quantile_ci, residual_lrv, residual_sigma_grid, ConfidenceRegion, InputsDigest,
    Method, Normalizer, RegionKind, RegionPoint,
};
pub use empproc::{
    empirical_cdf, empirical_quantile, higher_order_residuals, lower_order_mean,
    sampling_distribution_samples, sequential_empirical_process, Ecdf, HermiteDecomposition,
};
pub use estimators::{
    bartlett_lrv, default_bandwidth, rs_hurst, sample_autocovariance, LrvEstimate,
};
pub use gaussgen::{
    asymptotic_dn, exact_dn, fgn_autocovariance, generate_fgn, replication_seed, subordinate,
    FgnGenerator, LrdModel, Monotonicity, TimeSeries, Transform,
};
pub use hermite::{
    hermite_coeff_closed, hermite_coeff_quadrature, hermite_poly, lower_order_count,
    HermiteCoefficientTable, MAX_HERMITE_ORDER,
};
pub use montecarlo::{
    run_coverage_experiment, true_quantile, CoverageCell, CoverageReport, ExperimentConfig,
    HurstMode, Target,
};
