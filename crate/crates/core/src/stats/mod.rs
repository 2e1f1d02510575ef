//! Selectivity scores and their bootstrap significance.
//!
//! For a candidate cause `i` and effect `j`, temporal priority is
//! `Γ = P(i) - P(j) > 0` and probability raising is
//! `Λ = P(j|i) - P(j|not i) > 0`. Both inequalities are tested one-sided with
//! Mann-Whitney over bootstrap distributions.

mod bootstrap;
mod mann_whitney;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

pub use bootstrap::{bootstrap_distributions, BootstrapConfig, BootstrapDistributions, PairSamples};
pub use mann_whitney::{mann_whitney_greater, MannWhitney, Method, EXACT_MAX_POOLED, NORMAL_THRESHOLD};

use crate::error::{Error, Result};
use crate::matrix::EmpiricalProbabilities;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScorePair {
    /// Temporal-priority margin `P(i) - P(j)`.
    pub gamma: f64,
    /// Probability-raising margin `P(j|i) - P(j|not i)`.
    pub lambda: f64,
    pub p_tp: Option<f64>,
    pub p_pr: Option<f64>,
}

impl ScorePair {
    pub fn accepted(&self, alpha: f64) -> bool {
        matches!((self.p_tp, self.p_pr), (Some(a), Some(b)) if a < alpha && b < alpha)
    }

    /// The larger of the two p-values; lower is more confident.
    pub fn combined_p(&self) -> f64 {
        self.p_tp.unwrap_or(1.0).max(self.p_pr.unwrap_or(1.0))
    }
}

/// Point estimates for the pair `(cause, effect)`.
pub fn score_pair(probs: &EmpiricalProbabilities, cause: usize, effect: usize) -> Result<ScorePair> {
    let p = probs.marginal[cause];
    let (Some(given), Some(given_not)) = (probs.conditional(effect, cause), probs.conditional_not(effect, cause))
    else {
        return Err(Error::DegenerateUnit { unit: format!("#{cause} (P = {p})") });
    };
    Ok(ScorePair {
        gamma: p - probs.marginal[effect],
        lambda: given - given_not,
        p_tp: None,
        p_pr: None,
    })
}

/// Point estimates plus bootstrap p-values for `(cause, effect)`.
pub fn assess_selectivity(
    probs: &EmpiricalProbabilities,
    dists: &BootstrapDistributions,
    cause: usize,
    effect: usize,
) -> Result<ScorePair> {
    let missing = || Error::InvalidParameter(format!("no bootstrap distribution for pair ({cause}, {effect})"));
    let mi = dists.marginal(cause).ok_or_else(missing)?;
    let mj = dists.marginal(effect).ok_or_else(missing)?;
    let pair = dists.pair(cause, effect).ok_or_else(missing)?;
    let mut score = score_pair(probs, cause, effect)?;
    score.p_tp = Some(mann_whitney_greater(mi, mj)?.p_value);
    score.p_pr = Some(mann_whitney_greater(&pair.given, &pair.given_not)?.p_value);
    Ok(score)
}

/// Benjamini-Hochberg adjusted p-values, in input order.
pub fn benjamini_hochberg(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut adjusted = alloc::vec![0.0; n];
    let mut running = 1.0f64;
    for rank in (0..n).rev() {
        let idx = order[rank];
        let q = (p[idx] * n as f64 / (rank + 1) as f64).min(1.0);
        running = running.min(q);
        adjusted[idx] = running;
    }
    adjusted
}

/// Assessed `(cause column, effect event)` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelectivityTable {
    pub scores: BTreeMap<(usize, usize), ScorePair>,
}

impl SelectivityTable {
    pub fn get(&self, cause: usize, effect: usize) -> Option<&ScorePair> {
        self.scores.get(&(cause, effect))
    }

    pub fn accepted(&self, cause: usize, effect: usize, alpha: f64) -> bool {
        self.get(cause, effect).is_some_and(|s| s.accepted(alpha))
    }

    /// Replaces both p-value families by their Benjamini-Hochberg adjustment.
    pub fn apply_fdr(&mut self) {
        let keys: Vec<(usize, usize)> = self.scores.keys().copied().collect();
        let tp: Vec<f64> = keys.iter().map(|k| self.scores[k].p_tp.unwrap_or(1.0)).collect();
        let pr: Vec<f64> = keys.iter().map(|k| self.scores[k].p_pr.unwrap_or(1.0)).collect();
        let (tp, pr) = (benjamini_hochberg(&tp), benjamini_hochberg(&pr));
        for (k, key) in keys.iter().enumerate() {
            let s = self.scores.get_mut(key).expect("key from map");
            s.p_tp = Some(tp[k]);
            s.p_pr = Some(pr[k]);
        }
    }
}
