//! Selectivity-based progression model inference over binary alteration data.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. Datasets come in
//! as [`AlterationMatrix`] values, hypotheses as parsed [`formula::Hypothesis`]
//! values, and everything random is driven by an explicit `u64` seed so that a
//! run is a pure function of its inputs.
//!
//! The pipeline, in order:
//!
//! 1. [`lift`] appends one evaluated column per hypothesis formula and per
//!    non-atomic clause.
//! 2. [`stats`] bootstraps marginal and conditional probabilities and tests
//!    temporal priority and probability raising with one-sided Mann-Whitney tests.
//! 3. [`inference`] builds the prima facie DAG, breaks loops, prunes spurious
//!    edges by BIC hill climbing and labels the result.
//!
//! [`synth`] and [`eval`] provide the random model generator, the DAG-induced
//! sampler and the reconstruction metrics used to benchmark the above.
#![no_std]

extern crate alloc;

pub mod error;
pub mod eval;
pub mod formula;
pub mod inference;
pub mod lift;
pub mod matrix;
pub mod rng;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::{AlterationMatrix, BitColumn, EmpiricalProbabilities, EventCatalog, EventId};
