use thiserror::Error;

/// Errors produced by builders, solvers and analysis routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Model parameters violate a construction invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The exponent guard |Re q| * N <= 60 was exceeded; corner entries
    /// of the transformed chain would leave double-precision range.
    #[error("range guard exceeded: |Re q| * N = {value:.3} > {limit}")]
    RangeGuard { value: f64, limit: f64 },

    /// Mismatched vector or matrix dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The QR iteration failed to deflate every eigenvalue.
    #[error(
        "eigensolver did not converge after {sweeps} QR sweeps \
         on a {dim}x{dim} matrix with Frobenius norm {norm:.6e}"
    )]
    NonConvergence { sweeps: usize, dim: usize, norm: f64 },

    /// An input failed a precondition that is not a parameter invariant
    /// (bad grid, untrusted eigensystem, malformed data).
    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
