//! Binary alteration matrices, the event catalog and empirical probabilities.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Ordinal of an event in its catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventCatalog {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl EventCatalog {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut catalog = EventCatalog { names: Vec::new(), index: BTreeMap::new() };
        for name in names {
            let name = name.into();
            if catalog.index.contains_key(&name) {
                return Err(Error::DuplicateEvent(name));
            }
            catalog.index.insert(name.clone(), catalog.names.len());
            catalog.names.push(name);
        }
        Ok(catalog)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: EventId) -> &str {
        &self.names[id.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<EventId> {
        self.index.get(name).copied().map(EventId)
    }
}

/// Fixed-length bit vector; bit `r` is sample `r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitColumn {
    words: Vec<u64>,
    len: usize,
}

impl BitColumn {
    pub fn zeros(len: usize) -> Self {
        BitColumn { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn ones(len: usize) -> Self {
        let mut c = BitColumn { words: vec![u64::MAX; len.div_ceil(64)], len };
        c.clear_tail();
        c
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut c = Self::zeros(bits.len());
        for (r, &b) in bits.iter().enumerate() {
            if b {
                c.set(r, true);
            }
        }
        c
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, r: usize) -> bool {
        debug_assert!(r < self.len);
        (self.words[r / 64] >> (r % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, v: bool) {
        debug_assert!(r < self.len);
        let mask = 1u64 << (r % 64);
        if v {
            self.words[r / 64] |= mask;
        } else {
            self.words[r / 64] &= !mask;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and_count(&self, other: &BitColumn) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn and(&self, other: &BitColumn) -> BitColumn {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        BitColumn { words, len: self.len }
    }

    pub fn and_not(&self, other: &BitColumn) -> BitColumn {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect();
        BitColumn { words, len: self.len }
    }

    /// Builds a column whose bit `k` is `self[indices[k]]`.
    pub fn gather(&self, indices: &[usize]) -> BitColumn {
        let mut out = BitColumn::zeros(indices.len());
        for (chunk, word) in indices.chunks(64).zip(out.words.iter_mut()) {
            let mut w = 0u64;
            for (k, &r) in chunk.iter().enumerate() {
                w |= ((self.words[r / 64] >> (r % 64)) & 1) << k;
            }
            *word = w;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |r| self.get(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    NeverObserved,
    AlwaysObserved,
}

/// Columns violating the non-degeneracy or distinguishability assumptions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub degenerate: Vec<(EventId, Degeneracy)>,
    /// Groups of identical columns, each sorted ascending, first member kept.
    pub duplicates: Vec<Vec<EventId>>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.degenerate.is_empty() && self.duplicates.is_empty()
    }

    /// Events dropped from inference: every degenerate column and every
    /// duplicate after the first of its group.
    pub fn excluded(&self) -> Vec<EventId> {
        let mut out: Vec<EventId> = self.degenerate.iter().map(|(e, _)| *e).collect();
        for group in &self.duplicates {
            out.extend(group.iter().skip(1).copied());
        }
        out.sort();
        out.dedup();
        out
    }
}

/// The `m x n` binary dataset, stored column-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlterationMatrix {
    catalog: EventCatalog,
    columns: Vec<BitColumn>,
    samples: usize,
}

impl AlterationMatrix {
    pub fn from_rows<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        rows: &[Vec<bool>],
    ) -> Result<Self> {
        let catalog = EventCatalog::new(names)?;
        let n = catalog.len();
        if n == 0 || rows.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let mut columns = vec![BitColumn::zeros(rows.len()); n];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::RowWidth { row: r, expected: n, found: row.len() });
            }
            for (c, &bit) in row.iter().enumerate() {
                if bit {
                    columns[c].set(r, true);
                }
            }
        }
        Ok(AlterationMatrix { catalog, columns, samples: rows.len() })
    }

    pub fn from_columns(catalog: EventCatalog, columns: Vec<BitColumn>) -> Result<Self> {
        if columns.len() != catalog.len() {
            return Err(Error::RowWidth { row: 0, expected: catalog.len(), found: columns.len() });
        }
        let samples = columns.first().map_or(0, BitColumn::len);
        if samples == 0 || columns.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if let Some(bad) = columns.iter().position(|c| c.len() != samples) {
            return Err(Error::RowWidth { row: bad, expected: samples, found: columns[bad].len() });
        }
        Ok(AlterationMatrix { catalog, columns, samples })
    }

    pub fn catalog(&self) -> &EventCatalog {
        &self.catalog
    }

    pub fn n_events(&self) -> usize {
        self.columns.len()
    }

    pub fn n_samples(&self) -> usize {
        self.samples
    }

    pub fn columns(&self) -> &[BitColumn] {
        &self.columns
    }

    pub fn column(&self, e: EventId) -> &BitColumn {
        &self.columns[e.0]
    }

    pub fn get(&self, row: usize, event: usize) -> bool {
        self.columns[event].get(row)
    }

    pub fn row(&self, r: usize) -> Vec<bool> {
        self.columns.iter().map(|c| c.get(r)).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        (0..self.samples).map(move |r| self.row(r))
    }

    /// New matrix made of the given rows (with repetition), same catalog.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let columns = self.columns.iter().map(|c| c.gather(indices)).collect();
        AlterationMatrix::from_columns(self.catalog.clone(), columns)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (j, col) in self.columns.iter().enumerate() {
            let ones = col.count_ones();
            if ones == 0 {
                report.degenerate.push((EventId(j), Degeneracy::NeverObserved));
            } else if ones == self.samples {
                report.degenerate.push((EventId(j), Degeneracy::AlwaysObserved));
            }
        }
        let mut groups: BTreeMap<&[u64], Vec<EventId>> = BTreeMap::new();
        for (j, col) in self.columns.iter().enumerate() {
            groups.entry(col.words()).or_default().push(EventId(j));
        }
        let mut dups: Vec<Vec<EventId>> = groups.into_values().filter(|g| g.len() > 1).collect();
        dups.sort();
        report.duplicates = dups;
        report
    }

    pub fn probabilities(&self) -> EmpiricalProbabilities {
        EmpiricalProbabilities::estimate(&self.columns)
    }
}

/// Maximum-likelihood marginal and pairwise joint frequencies, unsmoothed.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalProbabilities {
    pub marginal: Vec<f64>,
    joint: Vec<f64>,
    n: usize,
}

impl EmpiricalProbabilities {
    pub fn estimate(columns: &[BitColumn]) -> Self {
        let n = columns.len();
        let m = columns.first().map_or(0, BitColumn::len).max(1) as f64;
        let marginal: Vec<f64> = columns.iter().map(|c| c.count_ones() as f64 / m).collect();
        let mut joint = vec![0.0; n * n];
        for i in 0..n {
            joint[i * n + i] = marginal[i];
            for j in (i + 1)..n {
                let p = columns[i].and_count(&columns[j]) as f64 / m;
                joint[i * n + j] = p;
                joint[j * n + i] = p;
            }
        }
        EmpiricalProbabilities { marginal, joint, n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn joint(&self, i: usize, j: usize) -> f64 {
        self.joint[i * self.n + j]
    }

    /// `P(j | i)`, defined when `P(i) > 0`.
    pub fn conditional(&self, j: usize, given: usize) -> Option<f64> {
        let p = self.marginal[given];
        (p > 0.0).then(|| self.joint(given, j) / p)
    }

    /// `P(j | not i)`, defined when `P(i) < 1`.
    pub fn conditional_not(&self, j: usize, given: usize) -> Option<f64> {
        let p = self.marginal[given];
        (p < 1.0).then(|| (self.marginal[j] - self.joint(given, j)) / (1.0 - p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn example() -> AlterationMatrix {
        let rows: Vec<_> = ["111", "101", "010", "101"].iter().map(|r| bits(r)).collect();
        AlterationMatrix::from_rows(["a", "b", "c"], &rows).unwrap()
    }

    #[test]
    fn builds_example_matrix() {
        let d = example();
        assert_eq!(d.n_samples(), 4);
        assert_eq!(d.n_events(), 3);
        assert_eq!(d.row(2), bits("010"));
    }

    #[test]
    fn example_probabilities() {
        let p = example().probabilities();
        assert_eq!(p.marginal, vec![0.75, 0.5, 0.75]);
        assert_eq!(p.joint(0, 2), 0.75);
        assert_eq!(p.joint(0, 1), 0.25);
        assert_eq!(p.conditional(2, 0), Some(1.0));
        assert_eq!(p.conditional_not(2, 0), Some(0.0));
    }

    #[test]
    fn saturated_column() {
        let rows = vec![bits("10"), bits("11"), bits("10"), bits("11")];
        let d = AlterationMatrix::from_rows(["x", "y"], &rows).unwrap();
        let p = d.probabilities();
        assert_eq!(p.marginal[0], 1.0);
        assert_eq!(p.conditional_not(1, 0), None);
        let report = d.validate();
        assert_eq!(report.degenerate, vec![(EventId(0), Degeneracy::AlwaysObserved)]);
    }

    #[test]
    fn identical_columns_are_reported() {
        let rows = vec![bits("110"), bits("001"), bits("111")];
        let d = AlterationMatrix::from_rows(["a", "b", "c"], &rows).unwrap();
        let p = d.probabilities();
        assert_eq!(p.marginal[0], p.marginal[1]);
        assert_eq!(p.joint(0, 1), p.marginal[0]);
        let report = d.validate();
        assert_eq!(report.duplicates, vec![vec![EventId(0), EventId(1)]]);
        assert_eq!(report.excluded(), vec![EventId(1)]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(AlterationMatrix::from_rows(["a"], &[]), Err(Error::EmptyMatrix));
        assert_eq!(
            AlterationMatrix::from_rows(["a", "a"], &[bits("10")]),
            Err(Error::DuplicateEvent("a".into()))
        );
        assert!(matches!(
            AlterationMatrix::from_rows(["a", "b"], &[bits("1")]),
            Err(Error::RowWidth { row: 0, .. })
        ));
    }

    #[test]
    fn gather_matches_get() {
        let col = BitColumn::from_bools(&(0..130).map(|r| r % 3 == 0).collect::<Vec<_>>());
        let idx: Vec<usize> = (0..200).map(|k| (k * 7) % 130).collect();
        let g = col.gather(&idx);
        for (k, &r) in idx.iter().enumerate() {
            assert_eq!(g.get(k), col.get(r));
        }
        assert_eq!(BitColumn::ones(70).count_ones(), 70);
    }
}
