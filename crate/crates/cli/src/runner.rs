//! Experiment orchestration: folds × seeds × strategies, aggregation, and the
//! output files (raw curves, per-strategy aggregates, plot, config echo).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use epis_core::{
    make_protocol_splits, run_active_learning, Dataset, LearningCurve, Normalizer, ProtocolSplit,
    Strategy, SupportTable,
};

use crate::config::{parse_strategy, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::plot;

/// Pointwise summary of every curve sharing one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub count: usize,
}

/// Pointwise mean and sample standard deviation; a single curve gets sd 0.
pub fn aggregate(curves: &[&LearningCurve]) -> Result<AggregateCurve> {
    let first = curves.first().ok_or(CliError::EmptyAggregate)?;
    let len = first.accuracies.len();
    for c in curves {
        if c.strategy != first.strategy {
            return Err(CliError::MixedStrategies);
        }
        if c.accuracies.len() != len {
            return Err(CliError::LengthMismatch { left: len, right: c.accuracies.len() });
        }
    }
    let count = curves.len();
    let mut mean = vec![0.0; len];
    let mut sd = vec![0.0; len];
    for q in 0..len {
        let m = curves.iter().map(|c| c.accuracies[q]).sum::<f64>() / count as f64;
        mean[q] = m;
        if count > 1 {
            let var = curves
                .iter()
                .map(|c| (c.accuracies[q] - m).powi(2))
                .sum::<f64>()
                / (count - 1) as f64;
            sd[q] = var.sqrt();
        }
    }
    Ok(AggregateCurve { mean, sd, count })
}

pub struct ExperimentOutputs {
    pub out_dir: PathBuf,
    pub curves: Vec<LearningCurve>,
    pub aggregates: Vec<(Strategy, AggregateCurve)>,
    pub budget: usize,
    pub files: Vec<PathBuf>,
}

fn strategy_rank(s: Strategy) -> usize {
    Strategy::ALL.iter().position(|&t| t == s).unwrap()
}

struct PreparedFold {
    seed: u64,
    split: ProtocolSplit,
    x: Arc<Vec<Vec<f64>>>,
}

/// Runs every (strategy, fold, seed) combination of the config and writes
/// raw.csv, aggregate_<strategy>.csv, curves.svg, and config.echo.json into
/// the output directory. Each seed draws its own cross-validation partition;
/// rerunning the same config reproduces every file byte for byte.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutputs> {
    config.validate()?;
    let data = Dataset::load_csv(&config.dataset)?;
    let budget = (config.budget_fraction * data.len() as f64).round() as usize;
    let strategies = config.strategy_list();
    let learner = config.learner_config();

    // Feature scaling is refit per fold from train + pool only, so the test
    // cell never leaks into preprocessing.
    let mut prepared = Vec::with_capacity(config.seeds.len() * config.folds);
    for &seed in &config.seeds {
        let splits = make_protocol_splits(
            &data,
            config.folds,
            config.train_fraction,
            config.pool_fraction,
            seed,
        )?;
        for split in splits {
            let fit_rows: Vec<usize> =
                split.train.iter().chain(&split.pool).copied().collect();
            let norm = Normalizer::fit(&data, &fit_rows)?;
            let x = Arc::new(norm.apply_all(&data)?);
            prepared.push(PreparedFold { seed, split, x });
        }
    }

    let jobs: Vec<(Strategy, &PreparedFold)> = strategies
        .iter()
        .flat_map(|&s| prepared.iter().map(move |p| (s, p)))
        .collect();

    let workers = config
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |v| v.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::InvalidConfig(format!("worker pool: {e}")))?;

    let table = Arc::new(SupportTable::new());
    let labels = data.labels();
    let mut curves: Vec<LearningCurve> = pool.install(|| {
        jobs.par_iter()
            .map(|&(strategy, p)| {
                run_active_learning(
                    &p.x,
                    labels,
                    &p.split,
                    &learner,
                    strategy,
                    budget,
                    config.subsample_fraction,
                    p.seed,
                    &table,
                )
                .map_err(|source| CliError::Run {
                    strategy: strategy.name(),
                    fold: p.split.fold,
                    seed: p.seed,
                    source,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    curves.sort_by_key(|c| (strategy_rank(c.strategy), c.fold, c.seed));

    let mut aggregates = Vec::with_capacity(strategies.len());
    let mut ordered = strategies.clone();
    ordered.sort_by_key(|&s| strategy_rank(s));
    for strategy in ordered {
        let group: Vec<&LearningCurve> =
            curves.iter().filter(|c| c.strategy == strategy).collect();
        aggregates.push((strategy, aggregate(&group)?));
    }

    std::fs::create_dir_all(&config.output)
        .map_err(|source| CliError::WriteFile { path: config.output.clone(), source })?;
    let mut files = Vec::new();

    let raw_path = config.output.join("raw.csv");
    write_file(&raw_path, &render_raw_csv(config, &curves))?;
    files.push(raw_path);

    for (strategy, agg) in &aggregates {
        let path = config.output.join(format!("aggregate_{}.csv", strategy.name()));
        write_file(&path, &render_aggregate_csv(agg))?;
        files.push(path);
    }

    let svg_path = config.output.join("curves.svg");
    plot::emit_plot(&aggregates, &svg_path)?;
    files.push(svg_path);

    let echo_path = config.output.join("config.echo.json");
    write_file(&echo_path, &config.echo_json())?;
    files.push(echo_path);

    Ok(ExperimentOutputs { out_dir: config.output.clone(), curves, aggregates, budget, files })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|source| CliError::WriteFile { path: path.to_path_buf(), source })
}

fn render_raw_csv(config: &ExperimentConfig, curves: &[LearningCurve]) -> String {
    let dataset = config.dataset_name();
    let learner = config.learner_config();
    let mut out = String::from("dataset,learner,strategy,fold,seed,query_index,accuracy\n");
    for c in curves {
        for (q, acc) in c.accuracies.iter().enumerate() {
            writeln!(
                out,
                "{dataset},{},{},{},{},{q},{acc:.6}",
                learner.name(),
                c.strategy.name(),
                c.fold,
                c.seed
            )
            .expect("string write");
        }
    }
    out
}

fn render_aggregate_csv(agg: &AggregateCurve) -> String {
    let mut out = String::from("query_index,mean,sd,count\n");
    for q in 0..agg.mean.len() {
        writeln!(out, "{q},{:.6},{:.6},{}", agg.mean[q], agg.sd[q], agg.count)
            .expect("string write");
    }
    out
}

/// Reads curves back from a raw.csv produced by [`run_experiment`]. The
/// queried-row trace is not part of the file, so it comes back empty.
pub fn read_raw_csv(path: &Path) -> Result<Vec<LearningCurve>> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::ReadFile { path: path.to_path_buf(), source })?;
    let bad = |line: usize, msg: String| CliError::RawCsv {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut curves: Vec<LearningCurve> = Vec::new();
    for (i, row) in text.lines().enumerate() {
        if i == 0 {
            continue;
        }
        let line = i + 1;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 7 {
            return Err(bad(line, format!("expected 7 columns, got {}", fields.len())));
        }
        let strategy = parse_strategy(fields[2])
            .ok_or_else(|| bad(line, format!("unknown strategy {:?}", fields[2])))?;
        let fold: usize =
            fields[3].parse().map_err(|_| bad(line, format!("bad fold {:?}", fields[3])))?;
        let seed: u64 =
            fields[4].parse().map_err(|_| bad(line, format!("bad seed {:?}", fields[4])))?;
        let query: usize = fields[5]
            .parse()
            .map_err(|_| bad(line, format!("bad query_index {:?}", fields[5])))?;
        let acc: f64 = fields[6]
            .parse()
            .map_err(|_| bad(line, format!("bad accuracy {:?}", fields[6])))?;
        let current = match curves.last_mut() {
            Some(c) if c.strategy == strategy && c.fold == fold && c.seed == seed => c,
            _ => {
                curves.push(LearningCurve {
                    strategy,
                    fold,
                    seed,
                    accuracies: Vec::new(),
                    queried_rows: Vec::new(),
                });
                curves.last_mut().unwrap()
            }
        };
        if query != current.accuracies.len() {
            return Err(bad(
                line,
                format!("query_index {query} out of order (expected {})", current.accuracies.len()),
            ));
        }
        current.accuracies.push(acc);
    }
    Ok(curves)
}

/// Re-renders curves.svg from the raw.csv inside `dir`.
pub fn replot(dir: &Path) -> Result<PathBuf> {
    let curves = read_raw_csv(&dir.join("raw.csv"))?;
    let mut present: Vec<Strategy> = Vec::new();
    for c in &curves {
        if !present.contains(&c.strategy) {
            present.push(c.strategy);
        }
    }
    present.sort_by_key(|&s| strategy_rank(s));
    let mut aggregates = Vec::new();
    for strategy in present {
        let group: Vec<&LearningCurve> =
            curves.iter().filter(|c| c.strategy == strategy).collect();
        aggregates.push((strategy, aggregate(&group)?));
    }
    let path = dir.join("curves.svg");
    plot::emit_plot(&aggregates, &path)?;
    Ok(path)
}
