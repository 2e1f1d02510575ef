use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::formula::Clause;
use crate::lift::{LiftedMatrix, UnitKind};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeKind {
    Event(usize),
    /// Non-atomic clause of a hypothesis formula; never has parents.
    Clause(Clause<usize>),
}

/// Progression DAG: nodes, parent sets and labels `α`.
///
/// Node `k` corresponds to column `k` of the lifted matrix it was built from:
/// events come first, then clause nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgressionDag {
    nodes: Vec<NodeKind>,
    parents: Vec<BTreeSet<usize>>,
    pub alpha: Vec<f64>,
}

impl ProgressionDag {
    pub fn empty(nodes: Vec<NodeKind>) -> Self {
        let n = nodes.len();
        ProgressionDag { nodes, parents: vec![BTreeSet::new(); n], alpha: vec![0.0; n] }
    }

    pub fn for_events(n: usize) -> Self {
        Self::empty((0..n).map(NodeKind::Event).collect())
    }

    pub fn for_lifted(lifted: &LiftedMatrix) -> Self {
        let nodes = (0..lifted.node_count())
            .map(|k| match &lifted.unit(k).kind {
                UnitKind::Event => NodeKind::Event(k),
                UnitKind::Clause(c) => NodeKind::Clause(c.clone()),
                UnitKind::Formula(_) => unreachable!("formula columns follow the node columns"),
            })
            .collect();
        Self::empty(nodes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeKind] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> &NodeKind {
        &self.nodes[k]
    }

    pub fn is_event(&self, k: usize) -> bool {
        matches!(self.nodes[k], NodeKind::Event(_))
    }

    pub fn event_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, NodeKind::Event(_))).count()
    }

    pub fn parents(&self, k: usize) -> &BTreeSet<usize> {
        &self.parents[k]
    }

    pub fn add_edge(&mut self, parent: usize, child: usize) -> bool {
        debug_assert!(self.is_event(child), "clause nodes take no parents");
        self.parents[child].insert(parent)
    }

    pub fn remove_edge(&mut self, parent: usize, child: usize) -> bool {
        self.parents[child].remove(&parent)
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.parents[child].contains(&parent)
    }

    /// Edges as `(parent, child)`, ordered by child then parent.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(BTreeSet::len).sum()
    }

    pub fn children(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.parents.iter().enumerate().filter(move |(_, ps)| ps.contains(&k)).map(|(c, _)| c)
    }

    pub fn without_edges(&self) -> Self {
        Self::empty(self.nodes.clone())
    }

    /// Kahn order; `None` if there is a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(BTreeSet::len).collect();
        let mut children = vec![Vec::new(); n];
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&k| indegree[k] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(k) = ready.pop_first() {
            order.push(k);
            for &c in &children[k] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Whether `to` is reachable from `from` along edges.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let mut stack = vec![from];
        let mut seen = vec![false; self.len()];
        while let Some(k) = stack.pop() {
            if k == to {
                return true;
            }
            if core::mem::replace(&mut seen[k], true) {
                continue;
            }
            stack.extend(self.children(k));
        }
        false
    }

    /// Atoms a node stands for: itself for an event, the clause's events otherwise.
    pub fn atoms_of(&self, k: usize) -> Vec<usize> {
        match &self.nodes[k] {
            NodeKind::Event(e) => vec![*e],
            NodeKind::Clause(c) => c.atoms(),
        }
    }

    /// Edges between events implied by the parent sets, clause parents
    /// expanded to their atoms.
    pub fn atomic_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (p, c) in self.edges() {
            let NodeKind::Event(child) = self.nodes[c] else { continue };
            for a in self.atoms_of(p) {
                if a != child {
                    out.insert((a, child));
                }
            }
        }
        out
    }

    /// Topological order of the events under [`Self::atomic_edges`]; `None`
    /// if clause parents hide a cycle between events.
    pub fn atomic_order(&self) -> Option<Vec<usize>> {
        let mut flat = ProgressionDag::for_events(self.len());
        for (p, c) in self.atomic_edges() {
            flat.parents[c].insert(p);
        }
        let order = flat.topological_order()?;
        Some(order.into_iter().filter(|&k| self.is_event(k)).collect())
    }

    /// Whether adding `parent -> child` would close a loop between events,
    /// clause parents counted through their atoms.
    pub fn closes_cycle(&self, parent: usize, child: usize) -> bool {
        let atoms = self.atoms_of(parent);
        if atoms.contains(&child) {
            return true;
        }
        let edges = self.atomic_edges();
        let mut stack = vec![child];
        let mut seen = vec![false; self.len()];
        while let Some(k) = stack.pop() {
            if atoms.contains(&k) {
                return true;
            }
            if core::mem::replace(&mut seen[k], true) {
                continue;
            }
            stack.extend(edges.iter().filter(|&&(p, _)| p == k).map(|&(_, c)| c));
        }
        false
    }

    /// Every parent is an event node.
    pub fn is_atomic_only(&self) -> bool {
        self.edges().iter().all(|&(p, _)| self.is_event(p))
    }

    /// Clause nodes with at least one child.
    pub fn used_clauses(&self) -> BTreeSet<usize> {
        self.edges().into_iter().map(|(p, _)| p).filter(|&p| !self.is_event(p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_detection() {
        let mut d = ProgressionDag::for_events(3);
        d.add_edge(0, 1);
        d.add_edge(1, 2);
        assert_eq!(d.topological_order(), Some(vec![0, 1, 2]));
        assert!(d.reaches(0, 2));
        assert!(!d.reaches(2, 0));
        d.add_edge(2, 0);
        assert!(!d.is_acyclic());
    }

    #[test]
    fn edges_sorted_by_child() {
        let mut d = ProgressionDag::for_events(3);
        d.add_edge(2, 1);
        d.add_edge(0, 1);
        d.add_edge(1, 0);
        assert_eq!(d.edges(), vec![(1, 0), (0, 1), (2, 1)]);
        assert_eq!(d.edge_count(), 3);
    }
}
