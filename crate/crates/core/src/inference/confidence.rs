//! Edge confidence by re-running the pipeline on resampled data, plus the
//! hypergeometric co-occurrence test.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand::{Rng as _, RngCore};

use super::{infer, Inference, InferenceConfig};
use crate::error::{Error, Result};
use crate::formula::BoundHypothesis;
use crate::matrix::AlterationMatrix;
use crate::rng;
use crate::synth::{sample_dag, NoiseSpec, PatternSemantics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConfidenceMode {
    /// Resample rows of the input with replacement.
    NonParametric,
    /// Sample fresh data from the fitted DAG.
    Parametric,
}

impl ConfidenceMode {
    fn label(self) -> &'static str {
        match self {
            ConfidenceMode::NonParametric => rng::CONFIDENCE_NONPARAMETRIC,
            ConfidenceMode::Parametric => rng::CONFIDENCE_PARAMETRIC,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeConfidence {
    pub parent: usize,
    pub child: usize,
    pub nonparametric_support: Option<f64>,
    pub parametric_support: Option<f64>,
    pub hypergeometric_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceReport {
    pub edges: Vec<EdgeConfidence>,
    pub iterations: usize,
    /// Replicates whose inference failed, per mode; they count as reproducing
    /// no edge.
    pub failures: BTreeMap<ConfidenceMode, usize>,
}

/// Edges found by one replicate, or `None` if its inference failed.
pub type ReplicateEdges = Option<BTreeSet<(usize, usize)>>;

/// `P(X >= observed)` for `X ~ Hypergeometric(population, successes, draws)`.
pub fn hypergeometric_upper_tail(population: usize, successes: usize, draws: usize, observed: usize) -> f64 {
    let ln_choose = |n: usize, k: usize| {
        libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
    };
    let lo = (draws + successes).saturating_sub(population);
    let hi = draws.min(successes);
    if observed <= lo {
        return 1.0;
    }
    if observed > hi {
        return 0.0;
    }
    let denom = ln_choose(population, draws);
    let tail: f64 = (observed..=hi)
        .map(|k| libm::exp(ln_choose(successes, k) + ln_choose(population - successes, draws - k) - denom))
        .sum();
    tail.clamp(0.0, 1.0)
}

/// Runs replicate `index` of the given mode and returns the edges it infers.
pub fn confidence_replicate(
    base: &AlterationMatrix,
    hypotheses: &[BoundHypothesis],
    config: &InferenceConfig,
    fitted: &Inference,
    mode: ConfidenceMode,
    seed: u64,
    index: usize,
) -> Result<BTreeSet<(usize, usize)>> {
    let mut stream = rng::substream(seed, mode.label(), index as u64);
    let m = base.n_samples();
    let data = match mode {
        ConfidenceMode::NonParametric => {
            let rows: Vec<usize> = (0..m).map(|_| stream.gen_range(0..m)).collect();
            base.select_rows(&rows)?
        }
        ConfidenceMode::Parametric => {
            let sample_seed = stream.next_u64();
            sample_dag(&fitted.dag, base.catalog(), PatternSemantics::Conjunctive, m, NoiseSpec::NONE, sample_seed)?
        }
    };
    let run_seed = stream.next_u64();
    let replicate = infer(&data, hypotheses, config, run_seed)?;
    Ok(replicate.dag.edges().into_iter().collect())
}

/// Fraction of replicates containing each edge; failed replicates count in
/// the denominator.
pub fn aggregate_support(edges: &[(usize, usize)], replicates: &[ReplicateEdges]) -> Vec<f64> {
    let total = replicates.len().max(1) as f64;
    edges
        .iter()
        .map(|e| replicates.iter().filter(|r| r.as_ref().is_some_and(|s| s.contains(e))).count() as f64 / total)
        .collect()
}

/// Sequential confidence assessment of every edge of `fitted.dag`.
pub fn edge_confidence(
    base: &AlterationMatrix,
    hypotheses: &[BoundHypothesis],
    config: &InferenceConfig,
    fitted: &Inference,
    iterations: usize,
    modes: &[ConfidenceMode],
    seed: u64,
) -> Result<ConfidenceReport> {
    if iterations == 0 {
        return Err(Error::InvalidParameter("confidence needs at least one iteration".into()));
    }
    let mut runs = BTreeMap::new();
    for &mode in modes {
        let reps: Vec<ReplicateEdges> = (0..iterations)
            .map(|r| confidence_replicate(base, hypotheses, config, fitted, mode, seed, r).ok())
            .collect();
        runs.insert(mode, reps);
    }
    Ok(assemble_report(fitted, iterations, &runs))
}

/// Builds the report from replicate results computed elsewhere (for example
/// in parallel).
pub fn assemble_report(
    fitted: &Inference,
    iterations: usize,
    runs: &BTreeMap<ConfidenceMode, Vec<ReplicateEdges>>,
) -> ConfidenceReport {
    let edges = fitted.dag.edges();
    let support: BTreeMap<ConfidenceMode, Vec<f64>> =
        runs.iter().map(|(&mode, reps)| (mode, aggregate_support(&edges, reps))).collect();
    let failures = runs.iter().map(|(&mode, reps)| (mode, reps.iter().filter(|r| r.is_none()).count())).collect();
    let lifted = &fitted.lifted;
    let m = lifted.n_samples();
    let edges = edges
        .iter()
        .enumerate()
        .map(|(k, &(p, c))| {
            let (cp, cc) = (lifted.column(p), lifted.column(c));
            EdgeConfidence {
                parent: p,
                child: c,
                nonparametric_support: support.get(&ConfidenceMode::NonParametric).map(|s| s[k]),
                parametric_support: support.get(&ConfidenceMode::Parametric).map(|s| s[k]),
                hypergeometric_p: hypergeometric_upper_tail(m, cc.count_ones(), cp.count_ones(), cp.and_count(cc)),
            }
        })
        .collect();
    ConfidenceReport { edges, iterations, failures }
}
