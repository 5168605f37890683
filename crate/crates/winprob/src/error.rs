//! Error types shared across the crate.

use thiserror::Error;

/// Top-level error for parsing, validation and model fitting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A line in an event file could not be decoded.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Structurally valid input that breaks a data invariant.
    #[error("validation error in match {match_id}: {rule}")]
    Validation { match_id: String, rule: String },

    /// A model file does not match the feature schema of its input.
    #[error("feature schema mismatch: missing {missing:?}")]
    SchemaMismatch { missing: Vec<String> },

    /// Optimisation did not converge within its iteration budget.
    #[error("no convergence after {iterations} iterations (gradient norm {grad_norm:.3e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },

    /// A numerical failure such as a NaN objective.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An argument outside its documented range.
    #[error("range error: {0}")]
    Range(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
