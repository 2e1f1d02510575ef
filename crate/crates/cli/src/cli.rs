//! Command-line arguments. Options left unset fall back to the TOML file and
//! then to defaults, so none of them carry clap defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "progressa", version, about = "Infer selectivity-based progression models from binary alteration data")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads; results do not depend on it. Defaults to all cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reconstruct a progression model from a dataset.
    Infer(InferArgs),
    /// Generate a random model and sample a dataset from it.
    Simulate(SimulateArgs),
    /// Compare an inferred model with the ground truth.
    Evaluate(EvaluateArgs),
    /// Run a grid of simulate / infer / evaluate experiments.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
pub struct InferArgs {
    /// Dataset (TSV or CSV, header of event names, one row per sample).
    pub dataset: PathBuf,
    /// Hypotheses file, one `formula -> event` per line.
    #[arg(long, value_name = "FILE")]
    pub hypotheses: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long, value_name = "DIR")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// The dataset has one row per event.
    #[arg(long)]
    pub transpose: bool,
    /// Test bare patterns against every event outside them.
    #[arg(long)]
    pub expand_hypotheses: bool,
    /// Significance level of both selectivity tests [default: 0.05].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Retained bootstrap values per distribution [default: 100].
    #[arg(long, value_name = "K")]
    pub bootstrap: Option<usize>,
    /// Confidence replicates per mode; 0 disables [default: 1000].
    #[arg(long, value_name = "N")]
    pub confidence_iterations: Option<usize>,
    /// nonparametric, parametric, both or none [default: nonparametric].
    #[arg(long, value_name = "MODE")]
    pub confidence_mode: Option<String>,
    /// Benjamini-Hochberg adjustment of the selectivity p-values.
    #[arg(long)]
    pub fdr: bool,
    /// Keep degenerate and duplicate columns.
    #[arg(long)]
    pub force: bool,
    /// Hill-climbing restarts [default: 1].
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Parent set size cap [default: 10].
    #[arg(long)]
    pub max_parents: Option<usize>,
    /// Also write every selectivity score to scores.tsv.
    #[arg(long)]
    pub dump_scores: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(short, long, value_name = "DIR")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// tree, forest, connected_dag, disconnected_dag or xor_lethality [default: tree].
    #[arg(long)]
    pub topology: Option<String>,
    /// conjunctive or disjunctive [default: conjunctive].
    #[arg(long)]
    pub semantics: Option<String>,
    /// Events [default: 15].
    #[arg(long)]
    pub n: Option<usize>,
    /// Samples [default: 250].
    #[arg(long)]
    pub m: Option<usize>,
    /// Noise rate [default: 0].
    #[arg(long)]
    pub nu: Option<f64>,
    /// Maximum parents per event [default: 3].
    #[arg(long)]
    pub w_star: Option<usize>,
    #[arg(long)]
    pub p_min: Option<f64>,
    #[arg(long)]
    pub p_max: Option<f64>,
    /// Components of forests and disconnected DAGs [default: random 2 to 4].
    #[arg(long)]
    pub components: Option<usize>,
    /// Probability of the `a` branch in the exclusivity model [default: 0.7].
    #[arg(long)]
    pub p_preferential: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub truth: PathBuf,
    pub inferred: PathBuf,
    /// Also write the score to this file.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(short, long, value_name = "DIR")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated model families [default: the four random topologies].
    #[arg(long, value_delimiter = ',')]
    pub families: Option<Vec<String>>,
    /// Events per random model [default: 15].
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub w_star: Option<usize>,
    /// Ensemble size: `full` is 100 models x 10 datasets, `desk` 10 x 3 [default: full].
    #[arg(long)]
    pub scale: Option<String>,
    /// Models per family, overriding the scale.
    #[arg(long)]
    pub models: Option<usize>,
    /// Datasets per model, overriding the scale.
    #[arg(long)]
    pub datasets: Option<usize>,
    /// Comma-separated sample sizes [default: 50,100,150,200,250].
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// Comma-separated noise rates [default: 0,0.05,0.1,0.15,0.2].
    #[arg(long, value_delimiter = ',')]
    pub nu: Option<Vec<f64>>,
    /// `full`, or `none` to score the prima facie graph without BIC pruning.
    #[arg(long)]
    pub algorithm: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_name = "K")]
    pub bootstrap: Option<usize>,
    #[arg(long)]
    pub p_preferential: Option<f64>,
    /// Write hd_vs_m.svg and hd_vs_nu.svg.
    #[arg(long)]
    pub svg: bool,
}
