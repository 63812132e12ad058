use thiserror::Error;

/// Errors raised by the solvers and converters in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid trapezoid ({a}, {b}, {c}, {d}): expected finite a <= b <= c <= d")]
    InvalidTrapezoid { a: f64, b: f64, c: f64, d: f64 },

    #[error("alpha level {0} outside [0, 1]")]
    AlphaOutOfRange(f64),

    #[error("invalid alpha grid: {0}")]
    InvalidGrid(String),

    #[error("invalid confidence level(s): {0}")]
    InvalidConfidence(String),

    #[error("invalid input data: {0}")]
    InvalidData(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("transportation instance is unbalanced: supply {supply} vs demand {demand}")]
    Unbalanced { supply: f64, demand: f64 },

    #[error("starting plan is not a basic feasible solution: {0}")]
    NotBasic(String),

    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),

    #[error("{0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
