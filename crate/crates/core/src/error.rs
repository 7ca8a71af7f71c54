//! Shared error type for the library.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// CSV cell that failed to parse; `row` and `col` are 1-based.
    #[error("{path}:{row}:{col}: {msg}")]
    Parse {
        path: PathBuf,
        row: usize,
        col: usize,
        msg: String,
    },

    #[error("dataset contains no examples")]
    EmptyDataset,

    #[error("ragged row: expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid split proportions: {0}")]
    InvalidProportions(String),

    #[error("need at least {needed} examples, got {got}")]
    TooFewExamples { needed: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("objective returned a non-finite value at x = {at}")]
    NonFiniteEvaluation { at: f64 },

    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("invalid parameter {what}: {why}")]
    InvalidParameter { what: &'static str, why: String },

    #[error("no candidates to score")]
    EmptyCandidates,

    #[error("non-finite score at candidate {index}")]
    NonFiniteScore { index: usize },

    #[error("alpha = {alpha} must lie strictly inside (0, 1)")]
    InvalidAlpha { alpha: f64 },

    #[error("solver did not converge: gradient norm {grad_norm:.3e} after {iterations} iterations")]
    NoConvergence { grad_norm: f64, iterations: usize },

    #[error("pool is empty")]
    EmptyPool,

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("pool example {index} was already queried")]
    AlreadyQueried { index: usize },

    #[error("budget {budget} exceeds pool size {pool}")]
    BudgetExceedsPool { budget: usize, pool: usize },
}
