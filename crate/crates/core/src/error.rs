//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by group algebra, parsing, sampling and estimation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("group backend mismatch: expected {expected}, got {found}")]
    BackendMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("tuple length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("arity mismatch: expected {expected} components, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("words belong to different alphabets")]
    AlphabetMismatch,

    #[error("unknown generator `{token}` at byte {position}")]
    UnknownGenerator { token: String, position: usize },

    #[error("word syntax error at byte {position}: {message}")]
    WordSyntax { position: usize, message: String },

    #[error("invalid Cayley table: {0}")]
    InvalidCayleyTable(String),

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("ball sampler acceptance too low for radius {radius} at arity {arity}")]
    BallAcceptanceTooLow { radius: f64, arity: usize },

    #[error("enumeration budget exceeded: {states:.3e} states (limit {limit:.1e})")]
    EnumerationBudget { states: f64, limit: f64 },

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: u64, min: u64 },

    #[error("scalar function not valid here: {0}")]
    InvalidFunction(String),

    #[error("schedule must be strictly decreasing and positive with at least {min} entries")]
    BadSchedule { min: usize },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("only {hits} of {drawn} samples landed in the thickening; increase samples")]
    TooFewHits { hits: u64, drawn: u64 },

    #[error("extrapolation did not converge: {0}")]
    NotConverged(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
