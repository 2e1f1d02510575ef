//! Prima facie topology and loop removal.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::dag::ProgressionDag;
use crate::lift::LiftedMatrix;
use crate::stats::{ScorePair, SelectivityTable};

/// A prima facie edge with the selectivity assessment that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateEdge {
    pub parent: usize,
    pub child: usize,
    /// Scored `(cause column, effect)` pair behind the edge.
    pub source: (usize, usize),
    pub score: ScorePair,
}

impl CandidateEdge {
    fn order_key(&self) -> (f64, f64, f64, usize, usize) {
        let s = &self.score;
        (s.combined_p(), s.p_pr.unwrap_or(1.0), s.p_tp.unwrap_or(1.0), self.parent, self.child)
    }

    /// Most confident first.
    pub fn cmp_confidence(&self, other: &Self) -> core::cmp::Ordering {
        let (a, b) = (self.order_key(), other.order_key());
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
            .then(a.3.cmp(&b.3))
            .then(a.4.cmp(&b.4))
    }
}

/// Accepted atomic pairs become edges; an accepted hypothesis `φ -> j` with
/// `active` set makes every clause node of `φ` a parent of `j`.
///
/// Returns the (possibly cyclic) graph and its edges, one per `(parent, child)`.
/// When two sources give the same edge the more confident one is kept.
pub fn prima_facie_topology(
    lifted: &LiftedMatrix,
    table: &SelectivityTable,
    alpha: f64,
    active: &[bool],
) -> (ProgressionDag, Vec<CandidateEdge>) {
    let n = lifted.n_events();
    let mut best: BTreeMap<(usize, usize), CandidateEdge> = BTreeMap::new();
    let mut offer = |edge: CandidateEdge| {
        best.entry((edge.parent, edge.child))
            .and_modify(|e| {
                if edge.cmp_confidence(e).is_lt() {
                    *e = edge;
                }
            })
            .or_insert(edge);
    };
    for (&(i, j), score) in &table.scores {
        if i < n && j < n && i != j && score.accepted(alpha) {
            offer(CandidateEdge { parent: i, child: j, source: (i, j), score: *score });
        }
    }
    for (h, lh) in lifted.hypotheses().iter().enumerate() {
        if !active.get(h).copied().unwrap_or(false) {
            continue;
        }
        let key = (lh.formula_column, lh.hypothesis.target);
        let Some(score) = table.scores.get(&key).filter(|s| s.accepted(alpha)) else { continue };
        for &node in &lh.clause_nodes {
            offer(CandidateEdge { parent: node, child: key.1, source: key, score: *score });
        }
    }
    let mut dag = ProgressionDag::for_lifted(lifted);
    for &(p, c) in best.keys() {
        dag.add_edge(p, c);
    }
    (dag, best.into_values().collect())
}

/// Re-inserts edges from most to least confident, skipping any that would
/// close a loop. Returns the acyclic graph and the dropped edges.
pub fn break_loops(dag: &ProgressionDag, candidates: &[CandidateEdge]) -> (ProgressionDag, Vec<CandidateEdge>) {
    let mut sorted: Vec<CandidateEdge> =
        candidates.iter().filter(|e| dag.has_edge(e.parent, e.child)).copied().collect();
    sorted.sort_by(CandidateEdge::cmp_confidence);
    let mut out = dag.without_edges();
    let mut removed = Vec::new();
    for e in sorted {
        if out.reaches(e.child, e.parent) {
            removed.push(e);
        } else {
            out.add_edge(e.parent, e.child);
        }
    }
    (out, removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn edge(parent: usize, child: usize, p: f64) -> CandidateEdge {
        let score = ScorePair { gamma: 0.1, lambda: 0.1, p_tp: Some(p), p_pr: Some(p) };
        CandidateEdge { parent, child, source: (parent, child), score }
    }

    fn graph(n: usize, edges: &[CandidateEdge]) -> ProgressionDag {
        let mut d = ProgressionDag::for_events(n);
        for e in edges {
            d.add_edge(e.parent, e.child);
        }
        d
    }

    #[test]
    fn two_cycle_drops_less_confident() {
        let edges = [edge(0, 1, 0.001), edge(1, 0, 0.01)];
        let (out, removed) = break_loops(&graph(2, &edges), &edges);
        assert_eq!(out.edges(), vec![(0, 1)]);
        assert_eq!(removed.len(), 1);
        assert_eq!((removed[0].parent, removed[0].child), (1, 0));
    }

    #[test]
    fn acyclic_input_unchanged() {
        let edges = [edge(0, 1, 0.03), edge(1, 2, 0.001), edge(0, 2, 0.02)];
        let d = graph(3, &edges);
        let (out, removed) = break_loops(&d, &edges);
        assert_eq!(out, d);
        assert!(removed.is_empty());
    }
}
