#![allow(dead_code)]

use progressa_core::formula::Formula;
use progressa_core::AlterationMatrix;
use proptest::prelude::*;

/// Matrix from rows written as `"101"`, events named `a`, `b`, ...
pub fn matrix(rows: &[&str]) -> AlterationMatrix {
    let rows: Vec<Vec<bool>> = rows.iter().map(|r| r.chars().map(|c| c == '1').collect()).collect();
    AlterationMatrix::from_rows(names(rows[0].len()), &rows).unwrap()
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|k| ((b'a' + k as u8) as char).to_string()).collect()
}

pub fn bools(n: usize, code: usize) -> Vec<bool> {
    (0..n).map(|k| code >> k & 1 == 1).collect()
}

pub fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = AlterationMatrix> {
    (1..=max_cols).prop_flat_map(move |n| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), n), 1..=max_rows)
            .prop_map(move |rows| AlterationMatrix::from_rows(names(n), &rows).unwrap())
    })
}

/// Formulas over atoms `0..atoms` with nesting depth at most `depth`.
pub fn arb_formula(atoms: usize, depth: u32) -> impl Strategy<Value = Formula<usize>> {
    let leaf = (0..atoms).prop_map(Formula::Atom);
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| f.negate()),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            prop::collection::vec(inner, 2..=3).prop_map(Formula::Xor),
        ]
    })
}

pub fn named(f: &Formula<usize>) -> Formula<String> {
    let names = names(8);
    f.try_map_atoms(&mut |&a| Ok::<_, ()>(names[a].clone())).unwrap()
}
