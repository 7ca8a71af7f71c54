//! Benchmark harness around `epis-core`: experiment configs, the fold × seed ×
//! strategy runner, CSV/SVG emission, and small one-shot reports.

pub mod config;
pub mod error;
pub mod plot;
pub mod report;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
pub use plot::emit_plot;
pub use report::{assess_instance, support_table};
pub use runner::{aggregate, read_raw_csv, replot, run_experiment, AggregateCurve};
