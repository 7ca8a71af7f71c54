use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use epis_cli::{assess_instance, replot, run_experiment, support_table, ExperimentConfig};

/// Active learning benchmarks with epistemic/aleatoric uncertainty sampling.
#[derive(Parser)]
#[command(name = "epis", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the Parzen uncertainty grid for window counts up to --max.
    Table {
        #[arg(long)]
        max: u32,
    },
    /// Report the uncertainty decomposition at one dataset row, with the
    /// model fitted on all the other rows.
    Assess {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        learner: String,
        #[arg(long)]
        instance: usize,
    },
    /// Re-render curves.svg from the raw.csv in an output directory.
    Plot {
        #[arg(long)]
        input: PathBuf,
    },
}

fn dispatch(command: Command) -> epis_cli::Result<()> {
    match command {
        Command::Run { config } => {
            let config = ExperimentConfig::load(&config)?;
            let outputs = run_experiment(&config)?;
            println!(
                "{} runs ({} strategies x {} folds x {} seeds), budget {}",
                config.strategies.len() * config.folds * config.seeds.len(),
                config.strategies.len(),
                config.folds,
                config.seeds.len(),
                outputs.budget
            );
            for file in &outputs.files {
                println!("wrote {}", file.display());
            }
        }
        Command::Table { max } => {
            print!("{}", support_table(max));
        }
        Command::Assess { dataset, learner, instance } => {
            print!("{}", assess_instance(&dataset, &learner, instance)?);
        }
        Command::Plot { input } => {
            let path = replot(&input)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are successful outcomes; everything else is a
            // usage error.
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
