use thiserror::Error;

use crate::market::CoefficientDiagnostics;

/// Errors raised anywhere in the laboratory.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient `{name}` is not finite at z = {z}")]
    CoefficientDomain { name: &'static str, z: f64 },

    #[error("degenerate market at z = {z}: {reason}")]
    DegenerateMarket { z: f64, reason: String },

    #[error("invalid jump measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("coefficient preconditions failed: {0:?}")]
    Diagnostics(Box<CoefficientDiagnostics>),

    #[error("non-finite value during time stepping at node z = {z}, t = {t}")]
    Instability { z: f64, t: f64 },

    #[error("query (z = {z}, t = {t}) lies outside the solution grid")]
    OutOfGrid { z: f64, t: f64 },

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("insufficient sample: {0}")]
    InsufficientSample(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("validation error at row {row}: field `{field}` {message}")]
    Validation {
        row: usize,
        field: &'static str,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
