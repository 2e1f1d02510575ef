//! Run manifests: everything needed to replay a run, and nothing that changes
//! between identical runs (no timestamps, no output location).

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Serialize)]
pub struct Input {
    pub role: &'static str,
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

impl Input {
    pub fn of(role: &'static str, path: &Path) -> Result<Input> {
        let data = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let digest = Sha256::digest(&data);
        Ok(Input {
            role,
            path: path.display().to_string(),
            bytes: data.len(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, S: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub settings: &'a S,
    pub inputs: Vec<Input>,
    pub outputs: Vec<String>,
}

impl<'a, S: Serialize> Manifest<'a, S> {
    pub fn new(command: &'static str, seed: u64, settings: &'a S) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            settings,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifests serialize");
        s.push('\n');
        s
    }
}
