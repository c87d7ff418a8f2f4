use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChshError {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("p({a}{b}|{x}{y}) = {value:e} is negative; the point is not a valid behaviour")]
    NegativeProbability {
        a: usize,
        b: usize,
        x: usize,
        y: usize,
        value: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigenvector has imaginary content {0:e} after removing the global phase")]
    ComplexEigenvector(f64),

    #[error("eigenvector norm {0} differs from 1")]
    NotNormalized(f64),

    #[error("optimum lies on the boundary of the angle box (a = {a}, b = {b}, beta = {beta})")]
    BoundaryOptimum { a: f64, b: f64, beta: f64 },

    #[error("state angle undefined for alpha0 = {alpha0}, alpha1 = {alpha1}")]
    UndefinedStateAngle { alpha0: f64, alpha1: f64 },

    #[error("linear program failed: {0}")]
    Lp(String),
}

pub type Result<T> = std::result::Result<T, ChshError>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ChshError::NonFinite { name, value })
    }
}
