//! Structure inference: prima facie DAG, loop removal, BIC pruning and
//! edge confidence.

mod confidence;
mod dag;
mod likelihood;
mod topology;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

pub use confidence::{
    aggregate_support, assemble_report, confidence_replicate, edge_confidence, hypergeometric_upper_tail, ConfidenceMode,
    ConfidenceReport, EdgeConfidence, ReplicateEdges,
};
pub use dag::{NodeKind, ProgressionDag};
pub use likelihood::{
    bic_score, dimension, family_log_likelihood, label, likelihood_fit, log_likelihood, search_order, FitConfig,
    FitResult, DEFAULT_MAX_PARENTS,
};
pub use topology::{break_loops, prima_facie_topology, CandidateEdge};

use crate::error::{Error, Result};
use crate::formula::BoundHypothesis;
use crate::lift::{lift, LiftedMatrix};
use crate::matrix::{AlterationMatrix, EmpiricalProbabilities, ValidationReport};
use crate::stats::{assess_selectivity, bootstrap_distributions, BootstrapConfig, SelectivityTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceConfig {
    /// Significance level for both selectivity tests.
    pub alpha: f64,
    pub bootstrap: BootstrapConfig,
    /// Benjamini-Hochberg adjustment of the selectivity p-values.
    pub fdr: bool,
    /// Keep degenerate and duplicate columns instead of excluding them.
    pub force: bool,
    /// Run the BIC fit; when off the prima facie DAG is returned.
    pub prune: bool,
    pub fit: FitConfig,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            alpha: 0.05,
            bootstrap: BootstrapConfig::default(),
            fdr: false,
            force: false,
            prune: true,
            fit: FitConfig::default(),
        }
    }
}

impl InferenceConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("alpha must lie in [0, 1), got {}", self.alpha)));
        }
        if self.bootstrap.k == 0 {
            return Err(Error::InvalidParameter("bootstrap size K must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SkipReason {
    /// The target column was excluded or is degenerate.
    TargetUnusable,
    /// The formula is never or always true on the data.
    DegenerateFormula,
    /// The formula column equals the target column.
    IndistinguishableFromTarget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub validation: ValidationReport,
    /// Events left out of every selectivity test.
    pub excluded: BTreeSet<usize>,
    pub lifted: LiftedMatrix,
    /// Hypotheses (by index) that were not tested.
    pub skipped: BTreeMap<usize, SkipReason>,
    /// Event pairs that could not be tested under `force` (identical or
    /// degenerate columns).
    pub unassessable: Vec<(usize, usize)>,
    pub scores: SelectivityTable,
    pub candidates: Vec<CandidateEdge>,
    /// Prima facie DAG after loop removal, labeled.
    pub prima_facie: ProgressionDag,
    pub loops_removed: Vec<CandidateEdge>,
    pub dag: ProgressionDag,
    pub bic: f64,
    pub bic_empty: f64,
    /// `None` when a prima facie parent set exceeds the cap.
    pub bic_prima_facie: Option<f64>,
    pub bootstrap_resamples: usize,
    pub bootstrap_rejected: usize,
    pub rejections_by_unit: BTreeMap<usize, usize>,
}

impl Inference {
    /// Edge metadata of the final DAG, in `dag.edges()` order.
    pub fn edge_details(&self) -> Vec<&CandidateEdge> {
        self.dag
            .edges()
            .into_iter()
            .map(|(p, c)| {
                self.candidates.iter().find(|e| e.parent == p && e.child == c).expect("fitted edges are prima facie")
            })
            .collect()
    }
}

/// Runs the whole pipeline on `base` with bound hypotheses. Deterministic in
/// `seed`.
pub fn infer(
    base: &AlterationMatrix,
    hypotheses: &[BoundHypothesis],
    config: &InferenceConfig,
    seed: u64,
) -> Result<Inference> {
    config.check()?;
    let validation = base.validate();
    let excluded: BTreeSet<usize> =
        if config.force { BTreeSet::new() } else { validation.excluded().into_iter().map(|e| e.0).collect() };
    let lifted = lift(base, hypotheses)?;
    let n = lifted.n_events();
    let m = lifted.n_samples();
    let columns = lifted.columns();
    let counts: Vec<usize> = columns.iter().map(|c| c.count_ones()).collect();
    let usable = |k: usize| counts[k] > 0 && counts[k] < m;

    let events: Vec<usize> = (0..n).filter(|k| !excluded.contains(k)).collect();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut unassessable = Vec::new();
    for &i in &events {
        for &j in &events {
            if i == j {
                continue;
            }
            if usable(i) && usable(j) && columns[i] != columns[j] {
                pairs.insert((i, j));
            } else {
                unassessable.push((i, j));
            }
        }
    }

    let mut skipped = BTreeMap::new();
    let mut active = vec![false; lifted.hypotheses().len()];
    for (h, lh) in lifted.hypotheses().iter().enumerate() {
        let (f, t) = (lh.formula_column, lh.hypothesis.target);
        let reason = if excluded.contains(&t) || !usable(t) {
            Some(SkipReason::TargetUnusable)
        } else if !usable(f) {
            Some(SkipReason::DegenerateFormula)
        } else if columns[f] == columns[t] {
            Some(SkipReason::IndistinguishableFromTarget)
        } else {
            None
        };
        match reason {
            Some(r) => {
                skipped.insert(h, r);
            }
            None => {
                active[h] = true;
                pairs.insert((f, t));
            }
        }
    }

    let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
    let units: Vec<usize> =
        pairs.iter().flat_map(|&(i, j)| [i, j]).collect::<BTreeSet<_>>().into_iter().collect();
    let dists = if pairs.is_empty() {
        Default::default()
    } else {
        bootstrap_distributions(&lifted, &units, &pairs, &config.bootstrap, seed)?
    };
    let probs = EmpiricalProbabilities::estimate(columns);
    let mut scores = SelectivityTable::default();
    for &(i, j) in &pairs {
        scores.scores.insert((i, j), assess_selectivity(&probs, &dists, i, j)?);
    }
    if config.fdr {
        scores.apply_fdr();
    }

    let (raw, candidates) = prima_facie_topology(&lifted, &scores, config.alpha, &active);
    let (mut prima_facie, loops_removed) = break_loops(&raw, &candidates);
    label(&mut prima_facie, &lifted);
    let cap = config.fit.max_parents;
    let bic_prima_facie = bic_score(&prima_facie, &lifted, cap).ok();
    let bic_empty = bic_score(&prima_facie.without_edges(), &lifted, cap)?;
    let (dag, bic) = if config.prune {
        let fit = likelihood_fit(&prima_facie, &candidates, &lifted, &config.fit, seed)?;
        (fit.dag, fit.bic)
    } else {
        let bic = bic_prima_facie.unwrap_or(f64::NEG_INFINITY);
        (prima_facie.clone(), bic)
    };

    Ok(Inference {
        validation,
        excluded,
        lifted,
        skipped,
        unassessable,
        scores,
        candidates,
        prima_facie,
        loops_removed,
        dag,
        bic,
        bic_empty,
        bic_prima_facie,
        bootstrap_resamples: dists.resamples,
        bootstrap_rejected: dists.rejected_resamples,
        rejections_by_unit: dists.rejections_by_unit,
    })
}
