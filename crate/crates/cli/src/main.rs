//! `crest` — fitting, gap testing and extreme-value prediction for
//! scores above a high threshold.
//!
//! Exit codes: 0 success, 2 usage/input error, 3 numerical failure.

mod commands;
mod meta;
mod render;
mod support;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "crest",
    version,
    about = "Analyse scores above a high threshold: maximum-likelihood fits \
             (full or top-k), two-group gap tests, extreme-value prediction \
             and reproducible plot data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the two-parameter over-threshold law to one stratum
    Fit(commands::fit::FitArgs),
    /// Pooled permutation bootstrap gap test between two strata
    Gap(commands::gap::GapArgs),
    /// Expected maximum and Gumbel norming for a fitted or given model
    PredictMax(commands::predict_max::PredictMaxArgs),
    /// Emit plot-data tables (and optional SVGs) for a two-strata file
    Report(commands::report::ReportArgs),
    /// Generate a synthetic rating-list CSV from model parameters
    Simulate(commands::simulate::SimulateArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => commands::fit::run(args),
        Command::Gap(args) => commands::gap::run(args),
        Command::PredictMax(args) => commands::predict_max::run(args),
        Command::Report(args) => commands::report::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
    };
    match result {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(support::exit_code(&err));
        }
    }
}
