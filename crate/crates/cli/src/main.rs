use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod error;
mod experiments;

use config::ExperimentKind;
use error::CliError;
use experiments::Options;

/// Fractional-program experiment runner.
#[derive(Debug, Parser)]
#[command(name = "fsps", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (overrides the configuration's `output`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed; replaces the configured seed list with seed, seed+1, ...
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a JSON configuration.
    Run { config: PathBuf },
    /// Check a configuration and list every problem found.
    Validate { config: PathBuf },
    /// List the built-in experiment kinds.
    ListExperiments,
}

fn load(path: &Path) -> Result<config::Resolved, CliError> {
    let text = config::read(path)?;
    config::resolve(&text).map_err(CliError::Config)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::ListExperiments => {
            for kind in ExperimentKind::ALL {
                let solvers: Vec<String> = kind.default_solvers().into_iter().map(|s| s.name).collect();
                let solvers = if solvers.is_empty() {
                    "-".to_string()
                } else {
                    solvers.join(",")
                };
                println!("{:<15} [{}] {}", kind.name(), solvers, kind.description());
            }
            Ok(())
        }
        Command::Validate { config } => {
            let r = load(config)?;
            if !cli.quiet {
                println!(
                    "{}: ok ({} experiment, {} solver(s), {} seed(s))",
                    config.display(),
                    r.experiment.name(),
                    r.solvers.len(),
                    r.seeds.len()
                );
            }
            Ok(())
        }
        Command::Run { config } => {
            let mut r = load(config)?;
            if let Some(seed) = cli.seed {
                let n = r.seeds.len();
                r = r.with_seed(seed, Some(n));
            }
            let out = cli
                .out
                .clone()
                .or_else(|| r.output.clone())
                .unwrap_or_else(|| PathBuf::from("out"));
            let opts = Options {
                out,
                threads: cli.threads,
                quiet: cli.quiet,
            };
            let outcome = experiments::run(&r, &opts)?;
            for note in &outcome.notes {
                println!("{note}");
            }
            if outcome.failed > 0 {
                return Err(CliError::RunsFailed {
                    failed: outcome.failed,
                    total: outcome.runs,
                });
            }
            if !cli.quiet {
                println!("{} run(s) written to {}", outcome.runs, opts.out.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(diags)) => {
            for d in &diags {
                eprintln!("error: {d}");
            }
            eprintln!("{} problem(s) found", diags.len());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
