//! Lifting: the input matrix augmented with one evaluated column per
//! hypothesis formula and per non-atomic clause.
//!
//! Column layout is fixed: events first (`0..n`), then clause columns (these
//! are DAG nodes), then whole-formula columns that are not already present as
//! an event or clause column. Equal canonical units share one column.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::formula::{BoundHypothesis, Clause, Cnf, Formula};
use crate::matrix::{AlterationMatrix, BitColumn};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitKind {
    Event,
    Clause(Clause<usize>),
    Formula(Cnf<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnOrigin {
    WholeFormula { hypothesis: usize },
    Clause { hypothesis: usize, clause: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedUnit {
    pub kind: UnitKind,
    pub label: String,
    pub origins: Vec<ColumnOrigin>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedHypothesis {
    pub hypothesis: BoundHypothesis,
    /// Column holding the whole formula.
    pub formula_column: usize,
    /// DAG nodes standing for the formula's clauses (event or clause columns).
    pub clause_nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedMatrix {
    base: AlterationMatrix,
    columns: Vec<BitColumn>,
    units: Vec<LiftedUnit>,
    hypotheses: Vec<LiftedHypothesis>,
    node_count: usize,
}

fn evaluate_column(base: &AlterationMatrix, eval: impl Fn(&[bool]) -> bool) -> BitColumn {
    let mut col = BitColumn::zeros(base.n_samples());
    let mut row = Vec::with_capacity(base.n_events());
    for r in 0..base.n_samples() {
        row.clear();
        row.extend(base.columns().iter().map(|c| c.get(r)));
        if eval(&row) {
            col.set(r, true);
        }
    }
    col
}

pub fn lift(base: &AlterationMatrix, hypotheses: &[BoundHypothesis]) -> Result<LiftedMatrix> {
    let n = base.n_events();
    let names = base.catalog().names();
    let mut seen = BTreeMap::new();
    for (k, h) in hypotheses.iter().enumerate() {
        if h.target >= n || h.formula.atoms().iter().any(|&&a| a >= n) {
            return Err(Error::CatalogMismatch);
        }
        if seen.insert((h.cnf.clone(), h.target), k).is_some() {
            return Err(Error::DuplicateHypothesis(h.text.clone()));
        }
    }

    let mut columns: Vec<BitColumn> = base.columns().to_vec();
    let mut units: Vec<LiftedUnit> = names
        .iter()
        .map(|name| LiftedUnit { kind: UnitKind::Event, label: name.clone(), origins: Vec::new() })
        .collect();

    let label = |f: Formula<usize>| render(&f, names);

    let mut clause_column: BTreeMap<Clause<usize>, usize> = BTreeMap::new();
    let mut clause_nodes: Vec<Vec<usize>> = Vec::with_capacity(hypotheses.len());
    for (k, h) in hypotheses.iter().enumerate() {
        let mut nodes = Vec::new();
        for (ci, clause) in h.cnf.clauses().iter().enumerate() {
            let col = if let Some(&atom) = clause.as_atom() {
                atom
            } else if let Some(&col) = clause_column.get(clause) {
                col
            } else {
                let col = columns.len();
                columns.push(evaluate_column(base, |row| clause.evaluate(row)));
                units.push(LiftedUnit {
                    kind: UnitKind::Clause(clause.clone()),
                    label: label(clause.to_formula()),
                    origins: Vec::new(),
                });
                clause_column.insert(clause.clone(), col);
                col
            };
            units[col].origins.push(ColumnOrigin::Clause { hypothesis: k, clause: ci });
            nodes.push(col);
        }
        nodes.sort_unstable();
        nodes.dedup();
        clause_nodes.push(nodes);
    }
    let node_count = columns.len();

    let mut formula_column: BTreeMap<Cnf<usize>, usize> = BTreeMap::new();
    let mut lifted_hypotheses = Vec::with_capacity(hypotheses.len());
    for (k, (h, nodes)) in hypotheses.iter().zip(clause_nodes).enumerate() {
        let col = match h.cnf.clauses() {
            [single] => single.as_atom().copied().unwrap_or_else(|| clause_column[single]),
            _ => *formula_column.entry(h.cnf.clone()).or_insert_with(|| {
                columns.push(evaluate_column(base, |row| h.cnf.evaluate(row)));
                units.push(LiftedUnit {
                    kind: UnitKind::Formula(h.cnf.clone()),
                    label: label(h.cnf.to_formula()),
                    origins: Vec::new(),
                });
                columns.len() - 1
            }),
        };
        units[col].origins.push(ColumnOrigin::WholeFormula { hypothesis: k });
        lifted_hypotheses.push(LiftedHypothesis {
            hypothesis: h.clone(),
            formula_column: col,
            clause_nodes: nodes,
        });
    }

    Ok(LiftedMatrix { base: base.clone(), columns, units, hypotheses: lifted_hypotheses, node_count })
}

/// Renders a bound formula with event names.
pub fn render(f: &Formula<usize>, names: &[String]) -> String {
    let named: Formula<String> = f
        .try_map_atoms(&mut |&a| Ok::<_, core::convert::Infallible>(names[a].clone()))
        .unwrap_or_else(|e| match e {});
    format!("{named}")
}

impl LiftedMatrix {
    pub fn base(&self) -> &AlterationMatrix {
        &self.base
    }

    pub fn n_events(&self) -> usize {
        self.base.n_events()
    }

    pub fn n_samples(&self) -> usize {
        self.base.n_samples()
    }

    /// Events plus clause columns: the node set of a progression DAG.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[BitColumn] {
        &self.columns
    }

    pub fn column(&self, k: usize) -> &BitColumn {
        &self.columns[k]
    }

    /// Columns beyond the input events.
    pub fn extra_columns(&self) -> &[BitColumn] {
        &self.columns[self.n_events()..]
    }

    pub fn unit(&self, k: usize) -> &LiftedUnit {
        &self.units[k]
    }

    pub fn units(&self) -> &[LiftedUnit] {
        &self.units
    }

    pub fn label(&self, k: usize) -> &str {
        &self.units[k].label
    }

    pub fn hypotheses(&self) -> &[LiftedHypothesis] {
        &self.hypotheses
    }

    pub fn is_event(&self, k: usize) -> bool {
        k < self.n_events()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_hypothesis;
    use alloc::vec;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn example() -> AlterationMatrix {
        let rows: Vec<_> = ["111", "101", "010", "101"].iter().map(|r| bits(r)).collect();
        AlterationMatrix::from_rows(["a", "b", "c"], &rows).unwrap()
    }

    fn bind(d: &AlterationMatrix, s: &str) -> BoundHypothesis {
        parse_hypothesis(s).unwrap().bind(d.catalog()).unwrap()
    }

    #[test]
    fn worked_xor_example() {
        let d = example();
        let lifted = lift(&d, &[bind(&d, "a ^ b -> c")]).unwrap();
        assert_eq!(lifted.extra_columns().len(), 1);
        let col: Vec<bool> = lifted.extra_columns()[0].iter().collect();
        assert_eq!(col, bits("0111"));
        assert_eq!(lifted.node_count(), 4);
        let h = &lifted.hypotheses()[0];
        assert_eq!(h.formula_column, 3);
        assert_eq!(h.clause_nodes, vec![3]);
        assert_eq!(lifted.label(3), "a ^ b");
    }

    #[test]
    fn empty_hypotheses_is_identity() {
        let d = example();
        let lifted = lift(&d, &[]).unwrap();
        assert_eq!(lifted.columns(), d.columns());
        assert!(lifted.extra_columns().is_empty());
        assert_eq!(lifted.node_count(), 3);
    }

    #[test]
    fn multi_clause_formula_gets_formula_and_clause_columns() {
        let rows: Vec<_> = ["1001", "0101", "0011", "1110", "0000", "1011"].iter().map(|r| bits(r)).collect();
        let d = AlterationMatrix::from_rows(["a", "b", "c", "d"], &rows).unwrap();
        let lifted = lift(&d, &[bind(&d, "(a | b) & c -> d")]).unwrap();
        // clause (a | b) at 4, formula at 5; clause `c` is the event column.
        assert_eq!(lifted.n_columns(), 6);
        assert_eq!(lifted.node_count(), 5);
        let h = &lifted.hypotheses()[0];
        assert_eq!(h.clause_nodes, vec![2, 4]);
        assert_eq!(h.formula_column, 5);
        assert_eq!(lifted.label(4), "a | b");
        assert_eq!(lifted.label(5), "(a | b) & c");
    }

    #[test]
    fn shared_units_share_columns() {
        let d = example();
        let hs = [bind(&d, "a ^ b -> c"), bind(&d, "b ^ a -> c")];
        assert_eq!(lift(&d, &hs), Err(Error::DuplicateHypothesis("b ^ a -> c".into())));
        let rows: Vec<_> = ["1101", "1010", "0110", "1001"].iter().map(|r| bits(r)).collect();
        let d4 = AlterationMatrix::from_rows(["a", "b", "c", "d"], &rows).unwrap();
        let hs = [bind(&d4, "a ^ b -> c"), bind(&d4, "a ^ b -> d")];
        let lifted = lift(&d4, &hs).unwrap();
        assert_eq!(lifted.n_columns(), 5);
        assert_eq!(lifted.unit(4).origins.len(), 4);
    }
}
