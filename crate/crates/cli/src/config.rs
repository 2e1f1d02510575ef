//! TOML configuration. Every key is optional; command-line flags override the
//! file, and the file overrides built-in defaults.
//!
//! ```toml
//! seed = 7
//! jobs = 4
//!
//! [infer]
//! alpha = 0.05
//! bootstrap = 100
//! confidence_iterations = 1000
//!
//! [benchmark]
//! families = ["tree", "connected_dag"]
//! m = [50, 150, 250]
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, Result};

pub const SEED_VAR: &str = "PROGRESSA_SEED";

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub infer: InferSection,
    pub simulate: SimulateSection,
    pub benchmark: BenchmarkSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InferSection {
    pub hypotheses: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub transpose: Option<bool>,
    pub expand_hypotheses: Option<bool>,
    pub alpha: Option<f64>,
    pub bootstrap: Option<usize>,
    pub confidence_iterations: Option<usize>,
    pub confidence_mode: Option<String>,
    pub fdr: Option<bool>,
    pub force: Option<bool>,
    pub restarts: Option<usize>,
    pub max_parents: Option<usize>,
    pub dump_scores: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub output: Option<PathBuf>,
    pub topology: Option<String>,
    pub semantics: Option<String>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub nu: Option<f64>,
    pub w_star: Option<usize>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub components: Option<usize>,
    pub p_preferential: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSection {
    pub output: Option<PathBuf>,
    pub families: Option<Vec<String>>,
    pub n: Option<usize>,
    pub w_star: Option<usize>,
    pub scale: Option<String>,
    pub models: Option<usize>,
    pub datasets: Option<usize>,
    pub m: Option<Vec<usize>>,
    pub nu: Option<Vec<f64>>,
    pub algorithm: Option<String>,
    pub alpha: Option<f64>,
    pub bootstrap: Option<usize>,
    pub p_preferential: Option<f64>,
    pub svg: Option<bool>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Config { path: path.to_path_buf(), message: e.to_string() })
}

/// Flag, then file, then the environment variable, then 0.
pub fn resolve_seed(flag: Option<u64>, file: &FileConfig) -> Result<u64> {
    if let Some(s) = flag.or(file.seed) {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_VAR} must be an unsigned integer, found `{v}`"))),
        Err(_) => Ok(0),
    }
}
