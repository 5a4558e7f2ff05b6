// SPDX-License-Identifier: MIT OR Apache-2.0

//! Shared fixtures for the benchmark targets.

use lrdci_core::{generate_fgn, LrdModel, TimeSeries};

/// Seed used by every benchmark input.
pub const FIXTURE_SEED: u64 = 20;

/// A Gaussian fGn path and its model.
pub fn fixture(hurst: f64, length: usize) -> (TimeSeries, LrdModel) {
    let series = generate_fgn(hurst, length, FIXTURE_SEED).expect("valid fixture parameters");
    let model = LrdModel::gaussian(hurst).expect("valid Hurst index");
    (series, model)
}

/// `count` evenly spaced points on `[-3, 3]`.
pub fn x_grid(count: usize) -> Vec<f64> {
    let step = 6.0 / (count.max(2) - 1) as f64;
    (0..count).map(|i| -3.0 + i as f64 * step).collect()
}
