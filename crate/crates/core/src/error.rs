use thiserror::Error;

use crate::quad::QuadError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Lévy index {alpha} outside {range}")]
    Domain { alpha: f64, range: &'static str },

    #[error("state n={n}, α={alpha} is not normalizable: |φ|² ~ |k|^{exponent} at the origin")]
    NonNormalizable { n: u32, alpha: f64, exponent: f64 },

    #[error("{measure} diverges: integrand ~ |k|^{exponent} at the origin")]
    DivergentMeasure { measure: &'static str, exponent: f64 },

    #[error("state is singular at k = {k}")]
    SingularPoint { k: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("eigen-solver failed: {0}")]
    Eigen(String),

    #[error(transparent)]
    Quadrature(#[from] QuadError),
}
