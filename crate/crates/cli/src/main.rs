use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod artifacts;
mod compare;
mod plot;
mod run;

/// Simulate single-photon spectroscopy in a 1D cavity and compare the
/// analyzer-atom and filtered-correlation spectra.
#[derive(Debug, Parser)]
#[command(name = "cavspec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a built-in scenario or a TOML experiment and write CSV artifacts.
    Run(RunArgs),
    /// Compare two spectrum CSVs, or every comparison pair of a run directory.
    Compare(CompareArgs),
    /// Write gnuplot scripts for the artifacts of a run directory.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["scenario", "config"])))]
pub struct RunArgs {
    /// Built-in scenario: one_atom, three_atoms or random_photon.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Experiment description in TOML.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default: runs/<experiment name>).
    #[arg(long, env = "CAVSPEC_OUT")]
    pub out: Option<PathBuf>,
    /// Seed for random initial states.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Integrator tolerance on norm drift.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Largest propagation step.
    #[arg(long)]
    pub dt_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Two spectrum CSV files.
    #[arg(num_args = 2, conflicts_with = "run")]
    pub files: Vec<PathBuf>,
    /// Run directory whose recorded comparison pairs are re-evaluated.
    #[arg(long)]
    pub run: Option<PathBuf>,
    /// Restrict `--run` to the named comparisons.
    #[arg(long, requires = "run")]
    pub name: Vec<String>,
    /// L1 tolerance (default 0.05, or each pair's recorded tolerance with `--run`).
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Run directory produced by `cavspec run`.
    pub dir: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run::execute(&args).map(|()| true),
        Command::Compare(args) => compare::execute(&args),
        Command::Plot(args) => plot::execute(&args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
