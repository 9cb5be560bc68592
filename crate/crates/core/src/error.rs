//! Error types shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Adaptive subdivision exhausted before the error dropped below tolerance.
    #[error("integral did not converge after {subdivisions} subdivisions (estimate {value:e}, error {error:e})")]
    NonConvergent {
        value: f64,
        error: f64,
        subdivisions: usize,
    },
    /// The integrand returned NaN or ±∞ at a quadrature node.
    #[error("integrand returned a non-finite value at t = {at:e}")]
    NonFinite { at: f64 },
    #[error("radial Fourier inversion is not implemented for d = {0}")]
    UnsupportedDimension(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The Hardy weight is infinite at a perturbation-grid node.
    #[error("q is singular at grid node {index} (|x| = {at:e})")]
    SingularNode { index: usize, at: f64 },
    #[error("test function `{0}` carries no gradient")]
    MissingGradient(String),
    /// The extrapolated t-sequence is non-monotone beyond tolerance.
    #[error("no limit detected: {0}")]
    NoLimitDetected(String),
    #[error("failed to bracket the generalized inverse at u = {0:e}")]
    BracketFailure(f64),
    #[error("negative density {value:e} from Fourier inversion at r = {at:e}")]
    NegativeDensity { value: f64, at: f64 },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
