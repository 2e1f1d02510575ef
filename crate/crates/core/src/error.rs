use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::formula::SyntaxError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix has no rows or no columns.
    EmptyMatrix,
    RowWidth { row: usize, expected: usize, found: usize },
    DuplicateEvent(String),
    UnknownEvent(String),
    Syntax(SyntaxError),
    /// Hypothesis target occurs among the atoms of its own formula.
    TargetInFormula { target: String },
    DuplicateHypothesis(String),
    DegenerateUnit { unit: String },
    BootstrapStarvation { units: Vec<String>, attempts: usize },
    ParentCap { node: String, parents: usize, cap: usize },
    InvalidParameter(String),
    CatalogMismatch,
    /// The fitted DAG cannot be sampled forward (clause atoms depend on their own target).
    NotSampleable(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyMatrix => write!(f, "matrix must have at least one sample and one event"),
            Error::RowWidth { row, expected, found } => {
                write!(f, "row {row} has {found} cells, expected {expected}")
            }
            Error::DuplicateEvent(name) => write!(f, "duplicate event name `{name}`"),
            Error::UnknownEvent(name) => write!(f, "unknown event `{name}`"),
            Error::Syntax(e) => write!(f, "{e}"),
            Error::TargetInFormula { target } => {
                write!(f, "hypothesis target `{target}` occurs in its own formula")
            }
            Error::DuplicateHypothesis(h) => write!(f, "duplicate hypothesis `{h}`"),
            Error::DegenerateUnit { unit } => {
                write!(f, "unit `{unit}` has observed probability 0 or 1")
            }
            Error::BootstrapStarvation { units, attempts } => write!(
                f,
                "bootstrap starved after {attempts} resamples; degenerate units: {}",
                units.join(", ")
            ),
            Error::ParentCap { node, parents, cap } => {
                write!(f, "node `{node}` has {parents} parents, cap is {cap}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::CatalogMismatch => write!(f, "event catalogs differ"),
            Error::NotSampleable(msg) => write!(f, "model cannot be sampled: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

impl From<SyntaxError> for Error {
    fn from(e: SyntaxError) -> Self {
        Error::Syntax(e)
    }
}
