// SPDX-License-Identifier: MIT OR Apache-2.0

//! Probabilists' Hermite polynomials and the Hermite coefficients of the
//! indicator `1{G(ξ) ≤ x}`.

use crate::error::{Error, Result};
use crate::gaussgen::{Monotonicity, Transform};
use crate::normal;
use crate::quadrature;

/// Highest polynomial order evaluated in double precision.
pub const MAX_HERMITE_ORDER: usize = 64;

/// Integration range standing in for the real line.
const QUAD_LIMIT: f64 = 10.0;

fn check_order(order: usize) -> Result<()> {
    if order > MAX_HERMITE_ORDER {
        Err(Error::Range {
            order,
            max: MAX_HERMITE_ORDER,
        })
    } else {
        Ok(())
    }
}

/// `H_order(x)` via the forward recurrence `H_{n+1} = x H_n − n H_{n−1}`.
pub fn hermite_poly(order: usize, x: f64) -> Result<f64> {
    check_order(order)?;
    Ok(hermite_poly_unchecked(order, x))
}

pub(crate) fn hermite_poly_unchecked(order: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if order == 0 {
        return prev;
    }
    for n in 1..order {
        let next = x * cur - n as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[0..=max_order]` with `H_0(x)..H_max_order(x)`.
pub(crate) fn hermite_values_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for n in 1..out.len().saturating_sub(1) {
        out[n + 1] = x * out[n] - n as f64 * out[n - 1];
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `c̃_l(x) = E[1{G(ξ) ≤ x} H_l(ξ)]` from its closed form
/// `∓H_{l−1}(G⁻¹(x)) φ(G⁻¹(x))` (minus for increasing `G`).
pub fn hermite_coeff_closed(transform: &Transform, order: usize, x: f64) -> Result<f64> {
    if order == 0 {
        return Err(Error::domain(
            "Hermite coefficient order must be at least 1",
        ));
    }
    check_order(order)?;
    let y = transform.inverse(x);
    if y.is_nan() {
        return Err(Error::domain(format!(
            "transform '{}' has no inverse at {x}",
            transform.name()
        )));
    }
    if y.is_infinite() {
        return Ok(0.0);
    }
    let magnitude = hermite_poly_unchecked(order - 1, y) * normal::pdf(y);
    Ok(match transform.monotonicity() {
        Monotonicity::Increasing => -magnitude,
        Monotonicity::Decreasing => magnitude,
    })
}

/// `c̃_l(x)` by direct numerical integration of `H_l(y) φ(y)` over
/// `{y ∈ [−10, 10] : G(y) ≤ x}`.
///
/// Only the forward map `G` is evaluated; the boundary of the set is located
/// by bisection. Absolute accuracy is about 1e−10.
pub fn hermite_coeff_quadrature(transform: &Transform, order: usize, x: f64) -> Result<f64> {
    if order == 0 {
        return Err(Error::domain(
            "Hermite coefficient order must be at least 1",
        ));
    }
    check_order(order)?;
    let inside = |y: f64| transform.apply(y) <= x;
    let (lo_in, hi_in) = (inside(-QUAD_LIMIT), inside(QUAD_LIMIT));
    let (a, b) = match (lo_in, hi_in) {
        (true, true) => (-QUAD_LIMIT, QUAD_LIMIT),
        (false, false) => return Ok(0.0),
        _ => {
            // Bisect for the switch point, keeping `lo` on the lo_in side.
            let (mut lo, mut hi) = (-QUAD_LIMIT, QUAD_LIMIT);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if inside(mid) == lo_in {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let boundary = 0.5 * (lo + hi);
            if lo_in {
                (-QUAD_LIMIT, boundary)
            } else {
                (boundary, QUAD_LIMIT)
            }
        }
    };
    quadrature::integrate(
        |y| hermite_poly_unchecked(order, y) * normal::pdf(y),
        a,
        b,
        1e-11,
    )
}

/// Number of Hermite orders in the long-memory block: `⌊1/D⌋` with
/// `D = 2 − 2H`.
///
/// When `1/D` is an integer (e.g. `H = 0.75`) the boundary order belongs to
/// the long-memory block and the short-memory block starts one order higher.
pub fn lower_order_count(hurst: f64) -> Result<usize> {
    if !(hurst > 0.5 && hurst < 1.0) {
        return Err(Error::domain(format!(
            "Hurst index must lie in (0.5, 1), got {hurst}"
        )));
    }
    let inv_d = 1.0 / (2.0 - 2.0 * hurst);
    // Absorb rounding so that e.g. H = 0.9 gives exactly 5.
    Ok(((inv_d + 1e-9).floor() as usize).max(1))
}

/// `c̃_l(x)` for `l = 1..=max_order` over a sorted grid of `x`.
#[derive(Clone, Debug)]
pub struct HermiteCoefficientTable {
    x_grid: Vec<f64>,
    max_order: usize,
    /// `coeffs[l - 1][j] = c̃_l(x_grid[j])`.
    coeffs: Vec<Vec<f64>>,
    monotonicity: Monotonicity,
}

impl HermiteCoefficientTable {
    pub fn new(transform: &Transform, x_grid: &[f64], max_order: usize) -> Result<Self> {
        if max_order == 0 {
            return Err(Error::domain("table needs at least order 1"));
        }
        check_order(max_order)?;
        if x_grid.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::domain("x grid must be sorted ascending"));
        }
        let mut coeffs = vec![Vec::with_capacity(x_grid.len()); max_order];
        for &x in x_grid {
            for (l, row) in coeffs.iter_mut().enumerate() {
                row.push(hermite_coeff_closed(transform, l + 1, x)?);
            }
        }
        let table = Self {
            x_grid: x_grid.to_vec(),
            max_order,
            coeffs,
            monotonicity: transform.monotonicity(),
        };
        for (j, &x) in x_grid.iter().enumerate() {
            let y = transform.inverse(x);
            let f = match table.monotonicity {
                Monotonicity::Increasing => normal::cdf(y),
                Monotonicity::Decreasing => 1.0 - normal::cdf(y),
            };
            let sum = table.bessel_sum(j);
            if sum > f * (1.0 - f) + 1e-8 {
                return Err(Error::Numeric(format!(
                    "Bessel bound violated at x = {x}: {sum} > {}",
                    f * (1.0 - f)
                )));
            }
        }
        Ok(table)
    }

    pub fn x_grid(&self) -> &[f64] {
        &self.x_grid
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    /// `c̃_order(x_grid[index])`.
    pub fn coeff(&self, order: usize, index: usize) -> f64 {
        self.coeffs[order - 1][index]
    }

    /// `Σ_{l ≤ max_order} c̃_l(x)² / l!` at grid point `index`.
    pub fn bessel_sum(&self, index: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(l, row)| row[index] * row[index] / factorial(l + 1))
            .sum()
    }
}
