use thiserror::Error;

/// Errors raised by the numerical and enumeration layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("invalid group specification: {0}")]
    Spec(String),

    #[error("element budget of {budget} exceeded after {produced} elements ({progress})")]
    Budget {
        budget: usize,
        produced: usize,
        progress: String,
    },

    #[error("exponent estimation failed: {0}")]
    Estimation(String),

    #[error("orbit cutoff {available} does not cover the requested range {required}")]
    Coverage { required: f64, available: f64 },

    #[error("grid of size {grid} is too coarse for degree {degree} (need at least {needed})")]
    Aliasing {
        grid: usize,
        degree: usize,
        needed: usize,
    },

    #[error("quadrature failure: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
