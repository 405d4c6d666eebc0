//! Error types shared across the crate.

use thiserror::Error;

/// Unified error type for domain construction, trial-form assembly, and
/// solver execution.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two adjacent edge curves disagree at a shared vertex (corner
    /// compatibility violated).
    #[error("corner mismatch at vertex {vertex}: gap {gap:.3e} exceeds tolerance")]
    CornerMismatch { vertex: char, gap: f64 },

    /// Catalog lookup failed.
    #[error("unknown catalog domain `{0}`")]
    UnknownDomain(String),

    /// Derivative order outside the supported range.
    #[error("unsupported derivative order {0} (max {1})")]
    UnsupportedDeriv(usize, usize),

    /// The Jacobian determinant is (numerically) zero where an inverse or
    /// metric was requested.
    #[error("singular Jacobian (|detJ| <= {threshold:.1e}) at (xi,eta)=({xi:.4},{eta:.4})")]
    SingularJacobian { xi: f64, eta: f64, threshold: f64 },

    /// A corner data identity required at an orthogonal (lambda = 0) or
    /// gamma-flagged corner does not hold for the supplied data.
    #[error("incompatible corner data at {corner}: |residual| = {residual:.3e} exceeds {tol:.1e}")]
    IncompatibleCornerData {
        corner: &'static str,
        residual: f64,
        tol: f64,
    },

    /// The 2x2 corner gradient solve is singular: S_BC(1) * S_CD(1) >= 1.
    #[error("corner gradient solve singular: S_BC(1)*S_CD(1) = {0:.6} >= 1")]
    CornerSolveSingular(f64),

    /// A boundary-condition layout outside the supported menu.
    #[error("unsupported boundary-condition assignment: {0}")]
    NotSupported(String),

    /// Invalid scalar/structural configuration value.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The least-squares factorization failed.
    #[error("least-squares factorization failed: {0}")]
    Factorization(String),

    /// A nonlinear residual evaluated to a non-finite value.
    #[error("non-finite residual during nonlinear iteration {0}")]
    NonFiniteResidual(usize),

    /// Gauss-Newton exhausted its iteration budget. The best coefficients
    /// seen are reported through the solve report, not this error.
    #[error("maximum iterations ({0}) exceeded without meeting tolerance")]
    MaxIterationsExceeded(usize),

    /// I/O failure in the harness (reports, CSV emission).
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
