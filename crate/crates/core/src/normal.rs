// SPDX-License-Identifier: MIT OR Apache-2.0

//! Standard normal density, distribution and quantile functions.

use statrs::distribution::{ContinuousCDF, Normal};

use std::sync::OnceLock;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn standard() -> &'static Normal {
    static STD: OnceLock<Normal> = OnceLock::new();
    STD.get_or_init(Normal::standard)
}

/// Density φ(x). Returns 0 for infinite arguments.
pub fn pdf(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Distribution function Φ(x).
pub fn cdf(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        0.0
    } else if x == f64::INFINITY {
        1.0
    } else {
        0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
    }
}

/// Quantile function Φ⁻¹(p) for p in [0, 1].
pub fn quantile(p: f64) -> f64 {
    let x = standard().inverse_cdf(p);
    if !x.is_finite() {
        return x;
    }
    // statrs is accurate to ~1e-11; Newton steps on the libm-based CDF refine it.
    let mut x = x;
    for _ in 0..2 {
        let density = pdf(x);
        if density <= 0.0 {
            break;
        }
        x -= (cdf(x) - p) / density;
    }
    x
}

/// Two-sided critical value z_{1-α/2}.
pub fn two_sided_critical(alpha: f64) -> f64 {
    quantile(1.0 - alpha / 2.0)
}
