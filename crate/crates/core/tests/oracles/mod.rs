//! Independent reference implementations, shared with the CLI acceptance suite.
#![allow(dead_code)]

use std::collections::HashMap;

use progressa_core::eval::{ExperimentGrid, Family};
use progressa_core::formula::parse_hypothesis;
use progressa_core::inference::{bic_score, infer, Inference, InferenceConfig, ProgressionDag, DEFAULT_MAX_PARENTS};
use progressa_core::lift::LiftedMatrix;
use progressa_core::synth::{
    genotype_probability, generate_model, sample_dataset, LethalityParams, ModelParams, NoiseSpec, Topology,
};

/// `P(U' >= U)` over every split of the pooled sample into groups of the
/// original sizes.
pub fn exhaustive_mann_whitney_p(x: &[f64], y: &[f64]) -> f64 {
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let u_of = |xs: &[f64], ys: &[f64]| -> f64 {
        xs.iter()
            .flat_map(|a| ys.iter().map(move |b| if a > b { 1.0 } else if a == b { 0.5 } else { 0.0 }))
            .sum()
    };
    let observed = u_of(x, y);
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..1 << pooled.len() {
        if mask.count_ones() as usize != x.len() {
            continue;
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (k, &v) in pooled.iter().enumerate() {
            if mask >> k & 1 == 1 { xs.push(v) } else { ys.push(v) }
        }
        total += 1;
        if u_of(&xs, &ys) >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

/// Log-likelihood by counting each node's value per observed parent
/// configuration.
pub fn cpt_log_likelihood(dag: &ProgressionDag, lifted: &LiftedMatrix) -> f64 {
    let m = lifted.n_samples();
    let mut ll = 0.0;
    for k in 0..dag.len() {
        let parents: Vec<usize> = dag.parents(k).iter().copied().collect();
        let mut table: HashMap<Vec<bool>, [u64; 2]> = HashMap::new();
        for r in 0..m {
            let config: Vec<bool> = parents.iter().map(|&p| lifted.column(p).get(r)).collect();
            table.entry(config).or_default()[lifted.column(k).get(r) as usize] += 1;
        }
        for counts in table.values() {
            let total = (counts[0] + counts[1]) as f64;
            for &c in counts {
                if c > 0 {
                    ll += c as f64 * (c as f64 / total).ln();
                }
            }
        }
    }
    ll
}

/// Best BIC over every subgraph of `dag`.
pub fn exhaustive_best_bic(dag: &ProgressionDag, lifted: &LiftedMatrix) -> f64 {
    let edges = dag.edges();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..1 << edges.len() {
        let mut sub = dag.without_edges();
        for (k, &(p, c)) in edges.iter().enumerate() {
            if mask >> k & 1 == 1 {
                sub.add_edge(p, c);
            }
        }
        best = best.max(bic_score(&sub, lifted, DEFAULT_MAX_PARENTS).unwrap());
    }
    best
}

/// Inference runs whose loop-free prima facie graph has between 1 and
/// `max_edges` edges. Datasets come from small random models and from the
/// exclusivity model, so clause nodes are covered too.
pub fn small_fit_instances(count: usize, max_edges: usize) -> Vec<Inference> {
    let config = InferenceConfig::default();
    let lethality = LethalityParams::default();
    let mut out = Vec::new();
    let mut k = 0u64;
    while out.len() < count {
        k += 1;
        assert!(k < 50 * count as u64, "not enough small instances");
        let (data, hyps) = if k % 4 == 0 {
            let model = progressa_core::synth::generate_lethality_model(&lethality).unwrap();
            let data = sample_dataset(&model, 80, NoiseSpec::new(0.1).unwrap(), k).unwrap();
            let h = parse_hypothesis("a ^ b -> c").unwrap().bind(data.catalog()).unwrap();
            (data, vec![h])
        } else {
            let topology = Topology::ALL[k as usize % 4];
            let params = ModelParams { w_star: 2, ..ModelParams::new(4, topology) };
            let model = generate_model(&params, k).unwrap();
            (sample_dataset(&model, 120, NoiseSpec::new(0.05).unwrap(), k).unwrap(), vec![])
        };
        let Ok(run) = infer(&data, &hyps, &config, k) else { continue };
        if (1..=max_edges).contains(&run.prima_facie.edge_count()) {
            out.push(run);
        }
    }
    out
}

/// Largest `|observed - expected| / sigma` over the genotypes of `dag`, and
/// the number of rows whose genotype has probability zero.
pub fn genotype_deviation(dag: &ProgressionDag, rows: &[Vec<bool>]) -> (f64, usize) {
    let n = dag.event_count();
    let m = rows.len() as f64;
    let mut counts: HashMap<Vec<bool>, usize> = HashMap::new();
    for row in rows {
        *counts.entry(row.clone()).or_default() += 1;
    }
    let mut worst: f64 = 0.0;
    let mut impossible = 0;
    for code in 0..1usize << n {
        let g: Vec<bool> = (0..n).map(|k| code >> k & 1 == 1).collect();
        let p = genotype_probability(dag, &g);
        let seen = counts.get(&g).copied().unwrap_or(0);
        if p == 0.0 {
            impossible += seen;
        } else if p < 1.0 {
            let sigma = (m * p * (1.0 - p)).sqrt();
            worst = worst.max((seen as f64 - m * p).abs() / sigma);
        }
    }
    (worst, impossible)
}

/// The small default grid shape used by several checks.
pub fn grid(families: Vec<Family>, n: usize, m_values: Vec<usize>, nu_values: Vec<f64>, seed: u64) -> ExperimentGrid {
    ExperimentGrid {
        families,
        n,
        w_star: 3,
        models_per_family: 10,
        datasets_per_model: 3,
        m_values,
        nu_values,
        lethality: LethalityParams::default(),
        seed,
    }
}
