//! `qperiodic` — trajectory simulation, symmetry verification, and spectral
//! analysis for collision-model open dynamics on small spin registers.
//!
//! Exit codes: 0 on success, 1 for runtime failures (and for a failed
//! symmetry verification), 2 for configuration errors.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use commands::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qperiodic", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run stochastic collision trajectories and write observable time series.
    Simulate {
        /// Path to the JSON run configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Check the dynamical-symmetry conditions for the 4-site ring.
    VerifySymmetry {
        /// Path to the JSON run configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Fourier-analyze a time-series CSV and report the dominant peak.
    Spectrum {
        /// CSV with `t,value` rows, e.g. an output of `simulate`.
        #[arg(long)]
        input: PathBuf,
        /// Path to the JSON run configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Summarize the single-collision channel: Kraus rank, trace
    /// preservation, complete positivity, fixed points.
    ChannelInfo {
        /// Path to the JSON run configuration.
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config_path, run): (&PathBuf, _) = match &cli.command {
        Command::Simulate { config } => (config, Run::Simulate),
        Command::VerifySymmetry { config } => (config, Run::VerifySymmetry),
        Command::Spectrum { input, config } => (config, Run::Spectrum(input.clone())),
        Command::ChannelInfo { config } => (config, Run::ChannelInfo),
    };

    let cfg = match config::parse_config(config_path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };

    let outcome = match run {
        Run::Simulate => commands::simulate(&cfg).map(|()| true),
        Run::VerifySymmetry => commands::verify_symmetry(&cfg),
        Run::Spectrum(input) => commands::spectrum(&input, &cfg).map(|()| true),
        Run::ChannelInfo => commands::channel_info(&cfg).map(|()| true),
    };

    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Schema(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

enum Run {
    Simulate,
    VerifySymmetry,
    Spectrum(PathBuf),
    ChannelInfo,
}
