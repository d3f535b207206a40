use thiserror::Error;

use crate::solver::PicardReport;

/// Errors raised by the numerical kernels and drivers.
#[derive(Debug, Error)]
pub enum FhwError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("spectral consistency error: {0}")]
    Consistency(String),

    #[error("non-finite multiplier value {value} at xi = {xi:?}")]
    Propagation { xi: Vec<f64>, value: f64 },

    #[error("field is not mean-free (mean {mean:e}); negative-order operators act modulo polynomials")]
    ModuloPolynomials { mean: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("blow-up detected after node {last_valid} (sup norm {sup_norm:e})")]
    BlowUp { last_valid: usize, sup_norm: f64 },

    #[error("Picard iteration did not converge: {reason}")]
    NonConvergence {
        reason: String,
        report: Box<PicardReport>,
    },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FhwError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(FhwError::Domain(msg.into()))
}
