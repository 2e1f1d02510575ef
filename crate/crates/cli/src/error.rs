use std::path::{Path, PathBuf};

use serde_json::json;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    /// Malformed dataset; `line` and `column` are 1-based.
    #[error("{}:{line}:{column}: {message}", path.display())]
    Data { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{}:{line}: {source}", path.display())]
    Hypothesis { path: PathBuf, line: usize, source: progressa_core::Error },
    #[error("{}: {message}", path.display())]
    Schema { path: PathBuf, message: String },
    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] progressa_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Data { .. } => "data",
            CliError::Hypothesis { .. } => "hypothesis",
            CliError::Schema { .. } => "schema",
            CliError::Config { .. } => "config",
            CliError::Usage(_) => "usage",
            CliError::Core(e) => match e {
                progressa_core::Error::InvalidParameter(_) => "invalid_parameter",
                progressa_core::Error::CatalogMismatch => "catalog_mismatch",
                progressa_core::Error::BootstrapStarvation { .. } => "bootstrap_starvation",
                progressa_core::Error::ParentCap { .. } => "parent_cap",
                _ => "inference",
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// The machine-readable form written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        let extra = match self {
            CliError::Io { path, .. } | CliError::Schema { path, .. } | CliError::Config { path, .. } => {
                json!({ "path": path })
            }
            CliError::Data { path, line, column, .. } => json!({ "path": path, "line": line, "column": column }),
            CliError::Hypothesis { path, line, .. } => json!({ "path": path, "line": line }),
            _ => json!({}),
        };
        if let (Some(body), Some(extra)) = (body.as_object_mut(), extra.as_object()) {
            body.extend(extra.clone());
        }
        json!({ "error": body })
    }
}
