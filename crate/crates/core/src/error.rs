use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical and combinatorial engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole at z = {0}")]
    Pole(Complex64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge: estimate {estimate:.3e} above tolerance {tol:.3e} after {evaluations} evaluations")]
    NonConvergence {
        estimate: f64,
        tol: f64,
        evaluations: usize,
    },
    #[error("cutoff T = {cutoff} coincides with an eigenvalue imaginary part")]
    Tie { cutoff: f64 },
    #[error("|Im s| = {im_s} must be below the cutoff T = {cutoff}")]
    Constraint { im_s: f64, cutoff: f64 },
    #[error("s = {0} lies on the spectrum")]
    Singular(Complex64),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),
    #[error("degenerate closed orbits at period {period}: det(I - A^n) = 0")]
    Degenerate { period: u32 },
    #[error("orbit table inconsistent at period {period}: {reason}")]
    Inconsistent { period: u32, reason: String },
    #[error("Euler product needs Re(s) > {abscissa}, got {re_s}")]
    Convergence { re_s: f64, abscissa: f64 },
    #[error("orbit table covers lengths up to {available}, {required} required")]
    InsufficientTable { available: f64, required: f64 },
    #[error("spectral cutoff too small: tail estimate {tail:.3e} exceeds tolerance {tol:.3e}")]
    InsufficientCutoff { tail: f64, tol: f64 },
    #[error("orbit index varies with the iterate; enable per_iterate_index")]
    IndexVaries,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
