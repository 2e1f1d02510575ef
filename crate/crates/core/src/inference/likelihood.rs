//! Log-likelihood, BIC and the hill-climbing fit over prima facie subgraphs.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng as _;

use super::dag::ProgressionDag;
use super::topology::CandidateEdge;
use crate::error::{Error, Result};
use crate::lift::LiftedMatrix;
use crate::matrix::BitColumn;
use crate::rng;

pub const DEFAULT_MAX_PARENTS: usize = 10;

/// Improvements at or below this are treated as no improvement.
const MIN_GAIN: f64 = 1e-10;

fn xlogx_ratio(n: usize, total: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * libm::log(n as f64 / total as f64)
    }
}

fn split(child: &BitColumn, parents: &[&BitColumn], mask: &BitColumn, rows: usize) -> f64 {
    let Some((first, rest)) = parents.split_first() else {
        let n1 = mask.and_count(child);
        return xlogx_ratio(n1, rows) + xlogx_ratio(rows - n1, rows);
    };
    let on = mask.and(first);
    let off = mask.and_not(first);
    let mut ll = 0.0;
    for part in [on, off] {
        let count = part.count_ones();
        if count > 0 {
            ll += split(child, rest, &part, count);
        }
    }
    ll
}

/// `Σ_u Σ_v N(child = v, u) log(N(child = v, u) / N(u))` over parent
/// configurations `u` that occur in the data.
pub fn family_log_likelihood(child: &BitColumn, parents: &[&BitColumn]) -> f64 {
    let all = BitColumn::ones(child.len());
    split(child, parents, &all, child.len())
}

fn parent_columns<'a>(lifted: &'a LiftedMatrix, dag: &ProgressionDag, k: usize) -> Vec<&'a BitColumn> {
    dag.parents(k).iter().map(|&p| lifted.column(p)).collect()
}

pub fn log_likelihood(dag: &ProgressionDag, lifted: &LiftedMatrix) -> f64 {
    (0..dag.len())
        .map(|k| family_log_likelihood(lifted.column(k), &parent_columns(lifted, dag, k)))
        .sum()
}

fn penalty_weight(m: usize) -> f64 {
    libm::log(m as f64) / 2.0
}

fn check_cap(dag: &ProgressionDag, lifted: &LiftedMatrix, cap: usize) -> Result<()> {
    for k in 0..dag.len() {
        let parents = dag.parents(k).len();
        if parents > cap {
            return Err(Error::ParentCap { node: lifted.label(k).into(), parents, cap });
        }
    }
    Ok(())
}

/// Number of free parameters: `Σ_j 2^|π(j)|`.
pub fn dimension(dag: &ProgressionDag) -> f64 {
    (0..dag.len()).map(|k| libm::ldexp(1.0, dag.parents(k).len() as i32)).sum()
}

/// `LL - (ln m / 2) * dim`. Errors if a parent set exceeds `cap`.
pub fn bic_score(dag: &ProgressionDag, lifted: &LiftedMatrix, cap: usize) -> Result<f64> {
    check_cap(dag, lifted, cap)?;
    Ok(log_likelihood(dag, lifted) - penalty_weight(lifted.n_samples()) * dimension(dag))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitConfig {
    /// Independent hill climbs; the first starts from the empty graph, the
    /// others from random subsets of the candidates.
    pub restarts: usize,
    pub max_parents: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { restarts: 1, max_parents: DEFAULT_MAX_PARENTS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub dag: ProgressionDag,
    pub bic: f64,
    /// Restart that produced `dag`.
    pub restart: usize,
    /// Moves applied in that restart.
    pub moves: usize,
}

struct FamilyScorer<'a> {
    lifted: &'a LiftedMatrix,
    penalty: f64,
    memo: BTreeMap<(usize, Vec<usize>), f64>,
}

impl FamilyScorer<'_> {
    fn score(&mut self, child: usize, parents: &[usize]) -> f64 {
        let key = (child, parents.to_vec());
        if let Some(&s) = self.memo.get(&key) {
            return s;
        }
        let cols: Vec<&BitColumn> = parents.iter().map(|&p| self.lifted.column(p)).collect();
        let s = family_log_likelihood(self.lifted.column(child), &cols)
            - self.penalty * libm::ldexp(1.0, parents.len() as i32);
        self.memo.insert(key, s);
        s
    }
}

fn climb(
    start: ProgressionDag,
    candidates: &[(usize, usize)],
    scorer: &mut FamilyScorer<'_>,
    cap: usize,
) -> (ProgressionDag, usize) {
    let mut dag = start;
    let mut family: Vec<f64> = (0..dag.len())
        .map(|k| scorer.score(k, &dag.parents(k).iter().copied().collect::<Vec<_>>()))
        .collect();
    let mut moves = 0;
    loop {
        let mut best: Option<(f64, usize, Vec<usize>)> = None;
        for &(p, c) in candidates {
            let mut ps: Vec<usize> = dag.parents(c).iter().copied().collect();
            if let Some(pos) = ps.iter().position(|&x| x == p) {
                ps.remove(pos);
            } else if ps.len() < cap {
                ps.push(p);
                ps.sort_unstable();
            } else {
                continue;
            }
            let gain = scorer.score(c, &ps) - family[c];
            if gain > MIN_GAIN && best.as_ref().is_none_or(|b| gain > b.0) {
                best = Some((gain, c, ps));
            }
        }
        let Some((_, c, ps)) = best else { break };
        let current: Vec<usize> = dag.parents(c).iter().copied().collect();
        for p in current {
            dag.remove_edge(p, c);
        }
        for &p in &ps {
            dag.add_edge(p, c);
        }
        family[c] = scorer.score(c, &ps);
        moves += 1;
    }
    (dag, moves)
}

/// Candidate edges in search order: ascending `p_pr`, then by confidence.
pub fn search_order(candidates: &[CandidateEdge]) -> Vec<(usize, usize)> {
    let mut sorted = candidates.to_vec();
    sorted.sort_by(|a, b| {
        a.score.p_pr.unwrap_or(1.0).total_cmp(&b.score.p_pr.unwrap_or(1.0)).then(a.cmp_confidence(b))
    });
    sorted.into_iter().map(|e| (e.parent, e.child)).collect()
}

/// Greedy BIC hill climbing over subgraphs of `prima_facie`: each step applies
/// the single edge addition or removal with the largest gain.
///
/// `prima_facie` must be acyclic; every subgraph then is too.
pub fn likelihood_fit(
    prima_facie: &ProgressionDag,
    candidates: &[CandidateEdge],
    lifted: &LiftedMatrix,
    config: &FitConfig,
    seed: u64,
) -> Result<FitResult> {
    if config.restarts == 0 {
        return Err(Error::InvalidParameter("at least one hill-climbing restart is required".into()));
    }
    let present: Vec<CandidateEdge> =
        candidates.iter().filter(|e| prima_facie.has_edge(e.parent, e.child)).copied().collect();
    let order = search_order(&present);
    let mut scorer = FamilyScorer { lifted, penalty: penalty_weight(lifted.n_samples()), memo: BTreeMap::new() };
    let empty = prima_facie.without_edges();
    let mut best: Option<FitResult> = None;
    for restart in 0..config.restarts {
        let mut start = empty.clone();
        if restart > 0 {
            let mut rng = rng::substream(seed, rng::HILL_CLIMB, restart as u64);
            for &(p, c) in &order {
                if rng.gen_bool(0.5) && start.parents(c).len() < config.max_parents {
                    start.add_edge(p, c);
                }
            }
        }
        let (dag, moves) = climb(start, &order, &mut scorer, config.max_parents);
        let bic = (0..dag.len())
            .map(|k| scorer.score(k, &dag.parents(k).iter().copied().collect::<Vec<_>>()))
            .sum::<f64>();
        if best.as_ref().is_none_or(|b| bic > b.bic + MIN_GAIN) {
            best = Some(FitResult { dag, bic, restart, moves });
        }
    }
    let mut fit = best.expect("at least one restart");
    label(&mut fit.dag, lifted);
    Ok(fit)
}

/// Sets `α(j) = P(j | all parents present)`, or `P(j)` for parentless nodes;
/// 0 when the parents never co-occur.
pub fn label(dag: &mut ProgressionDag, lifted: &LiftedMatrix) {
    let m = lifted.n_samples();
    for k in 0..dag.len() {
        let mut support = BitColumn::ones(m);
        for &p in dag.parents(k) {
            support = support.and(lifted.column(p));
        }
        let total = support.count_ones();
        dag.alpha[k] = if total == 0 { 0.0 } else { support.and_count(lifted.column(k)) as f64 / total as f64 };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::lift;
    use crate::matrix::AlterationMatrix;
    use alloc::vec;

    fn lifted(rows: &[&str]) -> LiftedMatrix {
        let rows: Vec<Vec<bool>> = rows.iter().map(|r| r.chars().map(|c| c == '1').collect()).collect();
        let names: Vec<_> = (0..rows[0].len()).map(|k| alloc::format!("e{k}")).collect();
        lift(&AlterationMatrix::from_rows(names, &rows).unwrap(), &[]).unwrap()
    }

    #[test]
    fn empty_dag_factorizes() {
        let l = lifted(&["111", "101", "010", "101"]);
        let dag = ProgressionDag::for_events(3);
        let expected: f64 = [0.75f64, 0.5, 0.75]
            .iter()
            .map(|&p| 4.0 * (p * libm::log(p) + (1.0 - p) * libm::log(1.0 - p)))
            .sum();
        assert!((log_likelihood(&dag, &l) - expected).abs() < 1e-12);
        let bic = bic_score(&dag, &l, 10).unwrap();
        assert!((bic - (expected - libm::log(4.0) / 2.0 * 3.0)).abs() < 1e-12);
    }

    #[test]
    fn adding_a_parent_never_lowers_ll() {
        let l = lifted(&["110", "100", "011", "101", "000", "111", "010"]);
        let mut dag = ProgressionDag::for_events(3);
        let before = log_likelihood(&dag, &l);
        dag.add_edge(0, 1);
        let mid = log_likelihood(&dag, &l);
        dag.add_edge(2, 1);
        assert!(mid >= before - 1e-12);
        assert!(log_likelihood(&dag, &l) >= mid - 1e-12);
        assert_eq!(dimension(&dag), 1.0 + 4.0 + 1.0);
    }

    #[test]
    fn parent_cap_guard() {
        let l = lifted(&["110", "100", "011"]);
        let mut dag = ProgressionDag::for_events(3);
        dag.add_edge(0, 2);
        dag.add_edge(1, 2);
        assert!(matches!(bic_score(&dag, &l, 1), Err(Error::ParentCap { parents: 2, cap: 1, .. })));
    }

    #[test]
    fn labels_are_conditionals() {
        let l = lifted(&["11", "11", "10", "00"]);
        let mut dag = ProgressionDag::for_events(2);
        dag.add_edge(0, 1);
        label(&mut dag, &l);
        assert_eq!(dag.alpha, vec![0.75, 2.0 / 3.0]);
    }
}
