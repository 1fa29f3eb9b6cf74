use thiserror::Error;

use crate::quat::Quaternion;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (zero inverse, |q| out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested point lies on (or numerically at) the S-spectrum.
    #[error("point {q} lies on the S-spectrum (sigma_min = {sigma_min:e})")]
    SpectralPoint { q: Quaternion, sigma_min: f64 },

    /// A Cauchy-type series was requested outside its convergence region.
    #[error("series diverges: operator norm {norm} >= |q| = {modulus}")]
    Divergence { norm: f64, modulus: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operator is not Fredholm: {0}")]
    NotFredholm(String),

    #[error("index computation did not stabilize: {0}")]
    Unstable(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures that originate from the numerical engines rather than from bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Numeric(_)
                | Error::SpectralPoint { .. }
                | Error::Divergence { .. }
                | Error::NotFredholm(_)
                | Error::Unstable(_)
        )
    }
}
