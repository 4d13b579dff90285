use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("ill-conditioned evaluation: {0}")]
    Conditioning(String),
    #[error("initial profile never breaks (nondecreasing)")]
    NoBreaking,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("Newton iteration diverged at x={x}, t={t} (residual {residual:.3e}); refine the continuation path")]
    ContinuationNeeded { x: f64, t: f64, residual: f64 },
    #[error("point (x={x}, t={t}) lies outside the Whitham zone")]
    OutsideZone { x: f64, t: f64 },
    #[error("degenerate edge data: {0}")]
    Degeneracy(String),
    #[error("boundary value solve failed to converge ({0}); refine the mesh")]
    RefineMesh(String),
    #[error("under-resolved run: {reason} (suggested N={suggested_n}, dt={suggested_dt:.3e})")]
    Resolution {
        reason: String,
        suggested_n: usize,
        suggested_dt: f64,
    },
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
