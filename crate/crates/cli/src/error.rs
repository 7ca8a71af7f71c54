use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    ConfigRead { path: PathBuf, source: std::io::Error },

    #[error("cannot parse config {path}: {source}")]
    ConfigParse { path: PathBuf, source: serde_json::Error },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("curves of different lengths cannot be aggregated: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("curves from different strategies cannot share one aggregate")]
    MixedStrategies,

    #[error("nothing to aggregate")]
    EmptyAggregate,

    #[error("nothing to plot")]
    EmptyPlot,

    #[error("run failed (strategy {strategy}, fold {fold}, seed {seed}): {source}")]
    Run { strategy: &'static str, fold: usize, seed: u64, source: epis_core::Error },

    #[error("cannot write {path}: {source}")]
    WriteFile { path: PathBuf, source: std::io::Error },

    #[error("cannot read {path}: {source}")]
    ReadFile { path: PathBuf, source: std::io::Error },

    #[error("{path}:{line}: {msg}")]
    RawCsv { path: PathBuf, line: usize, msg: String },

    #[error(transparent)]
    Core(#[from] epis_core::Error),
}
