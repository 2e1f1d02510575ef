//! Random progression models and the DAG-induced sampler.
//!
//! A connected component of `k` events is built level by level: one root at
//! level 1, the others spread over levels `2..=L` with `L = max(2, ceil(ln k))`
//! (capped by `k`) and every level non-empty. Each non-root draws `|π(j)|`
//! uniformly from `1..=w*`, truncated by the size of the previous level, and
//! picks its parents there. Labels are `α(r) ~ U[p_min, p_max]` and
//! `α(j) = y * Π α(parents)` with `y ~ U[p_min, p_max]`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::formula::{Clause, Formula};
use crate::inference::{NodeKind, ProgressionDag};
use crate::matrix::{AlterationMatrix, BitColumn, EventCatalog};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Topology {
    Tree,
    Forest,
    ConnectedDag,
    DisconnectedDag,
}

impl Topology {
    pub const ALL: [Topology; 4] = [Topology::Tree, Topology::Forest, Topology::ConnectedDag, Topology::DisconnectedDag];

    pub fn name(self) -> &'static str {
        match self {
            Topology::Tree => "tree",
            Topology::Forest => "forest",
            Topology::ConnectedDag => "connected_dag",
            Topology::DisconnectedDag => "disconnected_dag",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }

    fn single_parent(self) -> bool {
        matches!(self, Topology::Tree | Topology::Forest)
    }

    fn connected(self) -> bool {
        matches!(self, Topology::Tree | Topology::ConnectedDag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternSemantics {
    /// A child can occur only when all parents are present.
    Conjunctive,
    /// A child can occur when at least one parent is present.
    Disjunctive,
    /// Exactly one of the two drivers leads to the target.
    XorLethality,
}

impl PatternSemantics {
    pub fn name(self) -> &'static str {
        match self {
            PatternSemantics::Conjunctive => "conjunctive",
            PatternSemantics::Disjunctive => "disjunctive",
            PatternSemantics::XorLethality => "xor_lethality",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Self::Conjunctive, Self::Disjunctive, Self::XorLethality].into_iter().find(|t| t.name() == s)
    }
}

/// Noise level `ν`: each entry is replaced by a fair coin with probability
/// `ν`, so it flips with probability `ν / 2` in either direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    nu: f64,
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec { nu: 0.0 };

    pub fn new(nu: f64) -> Result<Self> {
        if (0.0..1.0).contains(&nu) {
            Ok(NoiseSpec { nu })
        } else {
            Err(Error::InvalidParameter(format!("noise rate must lie in [0, 1), got {nu}")))
        }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn false_positive_rate(&self) -> f64 {
        self.nu / 2.0
    }

    pub fn false_negative_rate(&self) -> f64 {
        self.nu / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub topology: Topology,
    /// Maximum parents per node; forced to 1 for trees and forests.
    pub w_star: usize,
    pub p_min: f64,
    pub p_max: f64,
    /// Component count for forests and disconnected DAGs; drawn from `2..=4`
    /// (capped by `n`) when `None`.
    pub components: Option<usize>,
}

impl ModelParams {
    pub fn new(n: usize, topology: Topology) -> Self {
        ModelParams { n, topology, w_star: 3, p_min: 0.05, p_max: 0.95, components: None }
    }
}

/// Parameters of the three-event synthetic-lethality model `a ^ b -> c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LethalityParams {
    /// Probability that a sample follows the `a` branch rather than `b`.
    pub p_preferential: f64,
    /// Probability that the branch driver is present.
    pub driver_rate: f64,
    /// Probability that the other driver co-occurs with a present branch driver.
    pub co_occurrence: f64,
    /// Probability of `c` when exactly one driver is present.
    pub target_rate: f64,
}

impl Default for LethalityParams {
    fn default() -> Self {
        LethalityParams { p_preferential: 0.7, driver_rate: 0.8, co_occurrence: 0.1, target_rate: 0.8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerativeModel {
    pub dag: ProgressionDag,
    pub names: Vec<String>,
    pub topology: Option<Topology>,
    pub semantics: PatternSemantics,
    pub lethality: Option<LethalityParams>,
}

impl GenerativeModel {
    pub fn n_events(&self) -> usize {
        self.dag.event_count()
    }

    pub fn catalog(&self) -> EventCatalog {
        EventCatalog::new(self.names.iter().cloned()).expect("generated names are unique")
    }

    /// The pattern set: one `(parents, target)` per node with parents.
    pub fn true_patterns(&self) -> Vec<(Vec<usize>, usize)> {
        (0..self.dag.len())
            .filter(|&k| !self.dag.parents(k).is_empty())
            .map(|k| (self.dag.parents(k).iter().copied().collect(), k))
            .collect()
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.dag.len()).filter(|&k| self.dag.is_event(k) && self.dag.parents(k).is_empty()).collect()
    }

    /// Longest root-to-leaf path, counted in nodes.
    pub fn depth(&self) -> usize {
        let order = self.dag.atomic_order().expect("generated models are acyclic");
        let edges = self.dag.atomic_edges();
        let mut level = vec![1usize; self.dag.len()];
        for &k in &order {
            for &(p, c) in edges.iter().filter(|e| e.1 == k) {
                level[c] = level[c].max(level[p] + 1);
            }
        }
        order.iter().map(|&k| level[k]).max().unwrap_or(0)
    }
}

/// Number of levels for a component of `k` events.
pub fn max_depth(k: usize) -> usize {
    let ln = libm::ceil(libm::log(k as f64)) as usize;
    ln.max(2).min(k.max(1))
}

/// Parent sets (in slot space `0..k`) and labels for one component.
fn generate_component(k: usize, w_star: usize, p_min: f64, p_max: f64, rng: &mut Rng) -> (Vec<Vec<usize>>, Vec<f64>) {
    let mut parents = vec![Vec::new(); k];
    let mut alpha = vec![0.0; k];
    alpha[0] = rng.gen_range(p_min..=p_max);
    if k == 1 {
        return (parents, alpha);
    }
    let levels = max_depth(k);
    let mut others: Vec<usize> = (1..k).collect();
    others.shuffle(rng);
    let mut level = vec![1usize; k];
    for (pos, &j) in others.iter().enumerate() {
        level[j] = if pos < levels - 1 { pos + 2 } else { rng.gen_range(2..=levels) };
    }
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); levels + 1];
    for j in 0..k {
        by_level[level[j]].push(j);
    }
    for l in 2..=levels {
        for &j in &by_level[l] {
            let pool = &by_level[l - 1];
            let w = rng.gen_range(1..=w_star).min(pool.len());
            let mut chosen: Vec<usize> = pool.choose_multiple(rng, w).copied().collect();
            chosen.sort_unstable();
            let y: f64 = rng.gen_range(p_min..=p_max);
            alpha[j] = y * chosen.iter().map(|&p| alpha[p]).product::<f64>();
            parents[j] = chosen;
        }
    }
    (parents, alpha)
}

/// Uniform composition of `n` into `parts` positive sizes.
fn composition(n: usize, parts: usize, rng: &mut Rng) -> Vec<usize> {
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, n - 1, parts - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    cuts.push(n);
    let mut prev = 0;
    cuts.into_iter()
        .map(|c| {
            let size = c - prev;
            prev = c;
            size
        })
        .collect()
}

pub fn event_names(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("e{k}")).collect()
}

pub fn generate_model(params: &ModelParams, seed: u64) -> Result<GenerativeModel> {
    let ModelParams { n, topology, p_min, p_max, .. } = *params;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("a model needs at least 2 events, got {n}")));
    }
    if params.w_star == 0 {
        return Err(Error::InvalidParameter("w* must be at least 1".into()));
    }
    if !(0.0 <= p_min && p_min <= p_max && p_max <= 1.0) {
        return Err(Error::InvalidParameter(format!("invalid label range [{p_min}, {p_max}]")));
    }
    let w_star = if topology.single_parent() { 1 } else { params.w_star };
    let mut rng = rng::substream(seed, rng::MODEL, 0);
    let components = if topology.connected() {
        1
    } else {
        let c = match params.components {
            Some(c) => c,
            None => rng.gen_range(2..=4usize.min(n)),
        };
        if c < 2 || c > n {
            return Err(Error::InvalidParameter(format!("cannot split {n} events into {c} components")));
        }
        c
    };
    let sizes = if components == 1 { vec![n] } else { composition(n, components, &mut rng) };

    let mut slot_parents: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut slot_alpha: Vec<f64> = Vec::with_capacity(n);
    for size in sizes {
        let offset = slot_parents.len();
        let (ps, alpha) = generate_component(size, w_star, p_min, p_max, &mut rng);
        slot_parents.extend(ps.into_iter().map(|p| p.into_iter().map(|x| x + offset).collect()));
        slot_alpha.extend(alpha);
    }
    let mut event_of_slot: Vec<usize> = (0..n).collect();
    event_of_slot.shuffle(&mut rng);

    let mut dag = ProgressionDag::for_events(n);
    for (slot, ps) in slot_parents.iter().enumerate() {
        let child = event_of_slot[slot];
        dag.alpha[child] = slot_alpha[slot];
        for &p in ps {
            dag.add_edge(event_of_slot[p], child);
        }
    }
    Ok(GenerativeModel {
        dag,
        names: event_names(n),
        topology: Some(topology),
        semantics: PatternSemantics::Conjunctive,
        lethality: None,
    })
}

/// The fixed model `a ^ b -> c`; it involves no randomness.
pub fn generate_lethality_model(params: &LethalityParams) -> Result<GenerativeModel> {
    let LethalityParams { p_preferential: p, driver_rate: d, co_occurrence: q, target_rate: t } = *params;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("preferential probability must lie in (0, 1), got {p}")));
    }
    for (name, v) in [("driver rate", d), ("co-occurrence", q), ("target rate", t)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")));
        }
    }
    let xor = Formula::Xor(vec![Formula::Atom(0usize), Formula::Atom(1)]).to_cnf()?;
    let clause: Clause<usize> = xor.clauses()[0].clone();
    let mut dag = ProgressionDag::empty(vec![NodeKind::Event(0), NodeKind::Event(1), NodeKind::Event(2), NodeKind::Clause(clause)]);
    dag.add_edge(3, 2);
    let pa = p * d + (1.0 - p) * d * q;
    let pb = (1.0 - p) * d + p * d * q;
    let exactly_one = d * (1.0 - q);
    dag.alpha = vec![pa, pb, t, exactly_one];
    Ok(GenerativeModel {
        dag,
        names: ["a", "b", "c"].iter().map(|s| String::from(*s)).collect(),
        topology: None,
        semantics: PatternSemantics::XorLethality,
        lethality: Some(*params),
    })
}

fn apply_noise(row: &mut [bool], noise: NoiseSpec, rng: &mut Rng) {
    if noise.nu > 0.0 {
        for bit in row.iter_mut() {
            if rng.gen_bool(noise.nu) {
                *bit = rng.gen_bool(0.5);
            }
        }
    }
}

fn node_value(dag: &ProgressionDag, k: usize, row: &[bool]) -> bool {
    match dag.node(k) {
        NodeKind::Event(e) => row[*e],
        NodeKind::Clause(c) => c.evaluate(row),
    }
}

/// Draws one noiseless row from `dag` under the given semantics.
fn sample_row(dag: &ProgressionDag, order: &[usize], semantics: PatternSemantics, row: &mut [bool], rng: &mut Rng) {
    for &j in order {
        let parents = dag.parents(j);
        let enabled = parents.is_empty()
            || match semantics {
                PatternSemantics::Disjunctive => parents.iter().any(|&p| node_value(dag, p, row)),
                _ => parents.iter().all(|&p| node_value(dag, p, row)),
            };
        row[j] = enabled && rng.gen_bool(dag.alpha[j].clamp(0.0, 1.0));
    }
}

fn sample_lethality_row(params: &LethalityParams, row: &mut [bool], rng: &mut Rng) {
    let a_branch = rng.gen_bool(params.p_preferential);
    let (main, other) = if a_branch { (0, 1) } else { (1, 0) };
    row[main] = rng.gen_bool(params.driver_rate);
    row[other] = row[main] && rng.gen_bool(params.co_occurrence);
    row[2] = (row[0] != row[1]) && rng.gen_bool(params.target_rate);
}

/// Samples `m` rows from an arbitrary labeled DAG. Row `r` uses its own
/// substream, so a longer sample extends a shorter one.
pub fn sample_dag(
    dag: &ProgressionDag,
    catalog: &EventCatalog,
    semantics: PatternSemantics,
    m: usize,
    noise: NoiseSpec,
    seed: u64,
) -> Result<AlterationMatrix> {
    if m == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let order = dag
        .atomic_order()
        .ok_or_else(|| Error::NotSampleable("parent sets form a cycle between events".into()))?;
    let n = dag.event_count();
    if catalog.len() != n {
        return Err(Error::CatalogMismatch);
    }
    let mut columns = vec![BitColumn::zeros(m); n];
    let mut row = vec![false; n];
    for r in 0..m {
        let mut rng = rng::substream(seed, rng::SIMULATION, r as u64);
        sample_row(dag, &order, semantics, &mut row, &mut rng);
        apply_noise(&mut row, noise, &mut rng);
        for (c, &bit) in row.iter().enumerate() {
            if bit {
                columns[c].set(r, true);
            }
        }
    }
    AlterationMatrix::from_columns(catalog.clone(), columns)
}

pub fn sample_dataset(model: &GenerativeModel, m: usize, noise: NoiseSpec, seed: u64) -> Result<AlterationMatrix> {
    let catalog = model.catalog();
    match (model.semantics, &model.lethality) {
        (PatternSemantics::XorLethality, Some(params)) => {
            if m == 0 {
                return Err(Error::InvalidParameter("sample count must be at least 1".into()));
            }
            let mut columns = vec![BitColumn::zeros(m); 3];
            let mut row = [false; 3];
            for r in 0..m {
                let mut rng = rng::substream(seed, rng::SIMULATION, r as u64);
                sample_lethality_row(params, &mut row, &mut rng);
                apply_noise(&mut row, noise, &mut rng);
                for (c, &bit) in row.iter().enumerate() {
                    if bit {
                        columns[c].set(r, true);
                    }
                }
            }
            AlterationMatrix::from_columns(catalog, columns)
        }
        (semantics, _) => sample_dag(&model.dag, &catalog, semantics, m, noise, seed),
    }
}

/// Probability of observing exactly the events in `present` under the
/// conjunctive DAG-induced distribution: zero unless every present event has
/// all its parents present; otherwise `Π α` over present events times
/// `Π (1 - α)` over absent events whose parents are all present.
pub fn genotype_probability(dag: &ProgressionDag, present: &[bool]) -> f64 {
    let mut p = 1.0;
    for j in 0..dag.len() {
        if !dag.is_event(j) {
            continue;
        }
        let parents_present = dag.parents(j).iter().all(|&q| node_value(dag, q, present));
        match (present[j], parents_present) {
            (true, true) => p *= dag.alpha[j],
            (true, false) => return 0.0,
            (false, true) => p *= 1.0 - dag.alpha[j],
            (false, false) => {}
        }
    }
    p
}

/// Every present event has all of its parents present.
pub fn is_parent_closed(dag: &ProgressionDag, present: &[bool]) -> bool {
    (0..dag.len())
        .filter(|&j| dag.is_event(j) && present[j])
        .all(|j| dag.parents(j).iter().all(|&q| node_value(dag, q, present)))
}

/// Number of events per level, levels counted from the roots.
pub fn level_sizes(model: &GenerativeModel) -> Vec<usize> {
    let order = model.dag.atomic_order().expect("generated models are acyclic");
    let mut level = vec![0usize; model.dag.len()];
    for &k in &order {
        level[k] = model.dag.parents(k).iter().map(|&p| level[p] + 1).max().unwrap_or(1);
    }
    let depth = order.iter().map(|&k| level[k]).max().unwrap_or(0);
    let mut sizes = vec![0; depth];
    for &k in &order {
        sizes[level[k] - 1] += 1;
    }
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_has_single_parents() {
        let model = generate_model(&ModelParams::new(10, Topology::Tree), 7).unwrap();
        assert_eq!(model.roots().len(), 1);
        assert_eq!(model.dag.edge_count(), 9);
        assert!((0..10).all(|k| model.dag.parents(k).len() <= 1));
        assert!(model.depth() <= max_depth(10));
    }

    #[test]
    fn two_events() {
        let model = generate_model(&ModelParams::new(2, Topology::ConnectedDag), 1).unwrap();
        let child = (0..2).find(|&k| !model.dag.parents(k).is_empty()).unwrap();
        let root = 1 - child;
        assert!(model.dag.alpha[child] <= model.dag.alpha[root] * 0.95 + 1e-12);
    }

    #[test]
    fn disconnected_has_several_roots() {
        for seed in 0..20 {
            let model = generate_model(&ModelParams::new(10, Topology::DisconnectedDag), seed).unwrap();
            assert!(model.roots().len() >= 2);
        }
        let bad = ModelParams { components: Some(5), ..ModelParams::new(4, Topology::Forest) };
        assert!(generate_model(&bad, 0).is_err());
    }

    #[test]
    fn deterministic_chain() {
        let mut dag = ProgressionDag::for_events(2);
        dag.add_edge(0, 1);
        dag.alpha = vec![1.0, 1.0];
        let catalog = EventCatalog::new(["a", "b"]).unwrap();
        let d = sample_dag(&dag, &catalog, PatternSemantics::Conjunctive, 50, NoiseSpec::NONE, 3).unwrap();
        assert!(d.rows().all(|r| r == [true, true]));
    }

    #[test]
    fn lethality_never_emits_all_three() {
        let model = generate_lethality_model(&LethalityParams::default()).unwrap();
        let d = sample_dataset(&model, 5000, NoiseSpec::NONE, 9).unwrap();
        assert!(d.rows().all(|r| !(r[0] && r[1] && r[2])));
    }

    #[test]
    fn genotype_probabilities_sum_to_one() {
        let model = generate_model(&ModelParams::new(5, Topology::ConnectedDag), 4).unwrap();
        let total: f64 = (0u32..32)
            .map(|bits| {
                let g: Vec<bool> = (0..5).map(|k| bits >> k & 1 == 1).collect();
                genotype_probability(&model.dag, &g)
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
