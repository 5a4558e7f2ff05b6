// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Hermite order beyond what double precision can represent reliably.
    #[error("range error: Hermite order {order} exceeds the supported maximum {max}")]
    Range { order: usize, max: usize },

    /// The circulant embedding is not positive semi-definite.
    #[error("circulant embedding has negative eigenvalue {min_eigenvalue:e} (tolerance -1e-8)")]
    Generation { min_eigenvalue: f64 },

    /// Adaptive quadrature or another iterative routine did not converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An estimator produced an unusable value.
    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("experiment error: {0}")]
    Experiment(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
