//! File formats and command implementations for the `progressa` binary.
//!
//! Inference itself lives in `progressa_core`; this crate reads datasets and
//! hypothesis files, writes model documents (JSON and GraphViz), manifests and
//! benchmark tables, and runs confidence replicates and benchmark grids on a
//! thread pool without letting the pool size change any result.

pub mod cli;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod dot;
pub mod error;
pub mod hypotheses;
pub mod manifest;
pub mod model;
pub mod report;
pub mod svg;

use progressa_core::inference::ConfidenceMode;

pub use error::{CliError, Result};

pub fn mode_name(mode: ConfidenceMode) -> &'static str {
    match mode {
        ConfidenceMode::NonParametric => "nonparametric",
        ConfidenceMode::Parametric => "parametric",
    }
}

/// Runs a parsed command line; returns text for stdout.
pub fn run(args: cli::Cli) -> Result<String> {
    let file = config::load(args.config.as_deref())?;
    let jobs = args.jobs.or(file.jobs);
    match &args.command {
        cli::Command::Infer(a) => commands::infer_cmd(a, &file, jobs).map(|p| format!("{}\n", p.display())),
        cli::Command::Simulate(a) => commands::simulate_cmd(a, &file).map(|p| format!("{}\n", p.display())),
        cli::Command::Evaluate(a) => commands::evaluate_cmd(a),
        cli::Command::Benchmark(a) => commands::benchmark_cmd(a, &file, jobs).map(|p| format!("{}\n", p.display())),
    }
}
