//! `covar`: tail-regime limits, Monte Carlo studies, tail-model estimation and
//! rolling CoVaR analysis from the command line.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod cmd;
mod config;
mod error;
mod io;

#[derive(Debug, Parser)]
#[command(
    name = "covar",
    version,
    about = "Copula tail inference for CoVaR and delta-CoVaR"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form asymptotic levels and delta-CoVaR limits.
    Limits(cmd::limits::LimitsArgs),
    /// Monte Carlo study of the tail estimators for a catalogued copula.
    Simulate(cmd::simulate::SimulateArgs),
    /// Classify the tail regime of a sample and fit a tail model.
    Estimate(cmd::estimate::EstimateArgs),
    /// Rolling-window CoVaR and delta-CoVaR for a pair of return series.
    Analyze(cmd::analyze::AnalyzeArgs),
    /// Write a synthetic Clayton-linked AR-GARCH return pair.
    Synth(cmd::synth::SynthArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Limits(a) => cmd::limits::run(a),
        Command::Simulate(a) => cmd::simulate::run(a),
        Command::Estimate(a) => cmd::estimate::run(a),
        Command::Analyze(a) => cmd::analyze::run(a),
        Command::Synth(a) => cmd::synth::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let error::CliError::Usage(_) = e {
                eprintln!("run with --help for usage");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
