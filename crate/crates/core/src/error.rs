//! Error type shared across the library. Precision and window failures are
//! kept distinct from input errors so the CLI can map them to exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("series is indistinguishable from zero at precision {precision}")]
    ZeroAtPrecision { precision: i64 },

    #[error("{0}")]
    Parameter(String),

    #[error("polynomial {poly} is reducible: factor {factor}")]
    Reducible { poly: String, factor: String },

    #[error("degree {degree} exceeds the supported factorization bound {bound}")]
    UnsupportedDegree { degree: usize, bound: usize },

    #[error("insufficient precision in {stage}: {detail}")]
    InsufficientPrecision { stage: String, detail: String },

    #[error("hom window too small: {detail}; widen beyond {window}")]
    WindowTooSmall { window: i64, detail: String },

    #[error("required field extension not available: {0}")]
    ExtensionRequired(String),

    #[error("internal inconsistency in {stage}: {detail}")]
    Internal { stage: String, detail: String },

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn precision(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::InsufficientPrecision { stage: stage.into(), detail: detail.into() }
    }

    pub fn internal(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Internal { stage: stage.into(), detail: detail.into() }
    }

    /// Exit code the CLI maps this error to: 2 for precision/window
    /// shortfalls, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InsufficientPrecision { .. }
            | Error::WindowTooSmall { .. }
            | Error::ZeroAtPrecision { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
