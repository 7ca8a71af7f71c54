//! Experiment configuration: a single JSON document with every knob the
//! benchmark loop understands. Parsing refuses unknown keys so typos fail
//! loudly, and the fully resolved form (defaults filled in) is echoed next to
//! the results so a run can always be repeated from its own output directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use epis_core::{LearnerConfig, LogRegParams, Strategy, TreeParams};

use crate::error::{CliError, Result};

const STRATEGY_NAMES: [&str; 4] = ["random", "standard", "epistemic", "aleatoric"];
const LEARNER_NAMES: [&str; 3] = ["parzen", "tree", "logreg"];

fn default_strategies() -> Vec<String> {
    STRATEGY_NAMES.iter().map(|s| s.to_string()).collect()
}

fn default_folds() -> usize {
    10
}

fn default_train_fraction() -> f64 {
    0.1
}

fn default_pool_fraction() -> f64 {
    0.8
}

fn default_subsample_fraction() -> f64 {
    0.1
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_q() -> usize {
    50
}

fn default_gamma() -> f64 {
    1.0
}

fn default_max_depth() -> usize {
    6
}

fn default_min_leaf() -> usize {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Headerless CSV with features followed by a 0/1 label column.
    pub dataset: PathBuf,
    /// One of "parzen", "tree", "logreg".
    pub learner: String,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<String>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_pool_fraction")]
    pub pool_fraction: f64,
    /// Query budget as a fraction of the whole dataset size.
    pub budget_fraction: f64,
    #[serde(default = "default_subsample_fraction")]
    pub subsample_fraction: f64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Directory receiving raw.csv, aggregates, plot, and the config echo.
    pub output: PathBuf,
    /// Levels per side of the logistic regression target grid.
    #[serde(default = "default_q")]
    pub q: usize,
    /// L2 regularization weight for logistic regression.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Parzen neighbor index; defaults to round(sqrt(train + pool)) per fold.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    #[serde(default = "default_min_leaf")]
    pub min_leaf: usize,
    /// Worker threads; defaults to the number of logical cores.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::ConfigRead { path: path.to_path_buf(), source })?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|source| CliError::ConfigParse { path: path.to_path_buf(), source })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::InvalidConfig(msg));
        if !LEARNER_NAMES.contains(&self.learner.as_str()) {
            return bad(format!(
                "unknown learner {:?}; expected one of {}",
                self.learner,
                LEARNER_NAMES.join(", ")
            ));
        }
        if self.strategies.is_empty() {
            return bad("at least one strategy is required".into());
        }
        for s in &self.strategies {
            if !STRATEGY_NAMES.contains(&s.as_str()) {
                return bad(format!(
                    "unknown strategy {s:?}; expected one of {}",
                    STRATEGY_NAMES.join(", ")
                ));
            }
        }
        let mut seen = self.strategies.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.strategies.len() {
            return bad("duplicate strategy listed".into());
        }
        if self.folds < 2 {
            return bad(format!("folds must be at least 2, got {}", self.folds));
        }
        for (name, v) in [
            ("train_fraction", self.train_fraction),
            ("pool_fraction", self.pool_fraction),
            ("budget_fraction", self.budget_fraction),
            ("subsample_fraction", self.subsample_fraction),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return bad(format!("{name} must lie in (0, 1], got {v}"));
            }
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            return bad("duplicate seed listed".into());
        }
        if self.q < 2 {
            return bad(format!("q must be at least 2, got {}", self.q));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive and finite, got {}", self.gamma));
        }
        if self.k == Some(0) {
            return bad("k must be at least 1 when set".into());
        }
        if self.min_leaf == 0 {
            return bad("min_leaf must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1 when set".into());
        }
        Ok(())
    }

    /// Strategies in config order, parsed.
    pub fn strategy_list(&self) -> Vec<Strategy> {
        self.strategies
            .iter()
            .map(|s| parse_strategy(s).expect("validated strategy name"))
            .collect()
    }

    pub fn learner_config(&self) -> LearnerConfig {
        match self.learner.as_str() {
            "parzen" => LearnerConfig::Parzen { k: self.k },
            "tree" => LearnerConfig::Tree(TreeParams {
                max_depth: self.max_depth,
                min_leaf: self.min_leaf,
            }),
            "logreg" => {
                LearnerConfig::LogReg(LogRegParams { gamma: self.gamma, grid: self.q })
            }
            other => unreachable!("validated learner name {other:?}"),
        }
    }

    /// Short dataset name used in the raw CSV, from the file stem.
    pub fn dataset_name(&self) -> String {
        self.dataset
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    }

    /// The fully resolved config as pretty JSON, newline-terminated.
    pub fn echo_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }
}

pub fn parse_strategy(name: &str) -> Option<Strategy> {
    Strategy::ALL.into_iter().find(|s| s.name() == name)
}
