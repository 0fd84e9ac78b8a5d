// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: runs crash experiments, threshold scans and
//! comparison sweeps from a TOML configuration, writing CSV/JSON results
//! with a reproducibility manifest.
//!
//! Exit codes: 0 success, 1 simulation error, 2 invalid configuration,
//! 3 no threshold crossing bracketed (curve still written).

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{cmd_compare, cmd_run, cmd_threshold, CmdOutcome, CompareAxis};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "qec", version, about = "Fault-tolerant QEC noise-threshold simulator")]
struct Cli {
    /// Path to the TOML run configuration.
    #[arg(long, global = true, default_value = "qec.toml")]
    config: PathBuf,

    /// Override the integrator step.
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Override the number of computational steps per experiment.
    #[arg(long, global = true)]
    steps: Option<usize>,

    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweep points (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment (single point or sweep).
    Run,
    /// Locate the noise threshold over the configured sweep grid.
    Threshold,
    /// Sweep the grid while varying one axis (protocol, bath, parallelism).
    Compare {
        #[arg(value_enum)]
        axis: CompareAxis,
    },
    /// Parse and validate the configuration, then exit.
    ValidateConfig,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let mut cfg = match RunConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(dt) = cli.dt {
        cfg.integrator.dt = dt;
    }
    if let Some(steps) = cli.steps {
        cfg.experiment.n_steps = steps;
    }
    if let Some(out) = cli.out {
        cfg.output.dir = out;
    }
    if let Some(workers) = cli.workers {
        cfg.run.workers = workers;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("config error: {e:#}");
        return ExitCode::from(2);
    }

    if cfg.run.workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.run.workers)
            .build_global()
        {
            eprintln!("worker pool: {e}");
        }
    }

    let outcome = match cli.command {
        Command::Run => cmd_run(&cfg),
        Command::Threshold => cmd_threshold(&cfg),
        Command::Compare { axis } => cmd_compare(&cfg, axis),
        Command::ValidateConfig => {
            println!("configuration ok");
            return ExitCode::SUCCESS;
        }
    };

    match outcome {
        Ok(CmdOutcome::Ok) => ExitCode::SUCCESS,
        Ok(CmdOutcome::NoCrossing) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
