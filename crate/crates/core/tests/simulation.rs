mod oracles;

use oracles::genotype_deviation;
use progressa_core::inference::ProgressionDag;
use progressa_core::synth::{
    generate_lethality_model, generate_model, is_parent_closed, level_sizes, max_depth, sample_dag, sample_dataset,
    LethalityParams, ModelParams, NoiseSpec, PatternSemantics, Topology,
};
use progressa_core::EventCatalog;

#[test]
fn genotype_frequencies_follow_product_formula() {
    for seed in 0..3 {
        let model = generate_model(&ModelParams { w_star: 2, ..ModelParams::new(5, Topology::ConnectedDag) }, seed).unwrap();
        let data = sample_dataset(&model, 100_000, NoiseSpec::NONE, seed + 100).unwrap();
        let rows: Vec<Vec<bool>> = data.rows().collect();
        let (worst, impossible) = genotype_deviation(&model.dag, &rows);
        assert_eq!(impossible, 0);
        assert!(worst < 3.0, "seed {seed}: deviation {worst} sigma");
    }
}

#[test]
fn noise_flips_each_bit_at_half_rate() {
    let n = 6;
    let m = 50_000;
    let catalog = EventCatalog::new((0..n).map(|k| format!("e{k}"))).unwrap();
    for (alpha, nu) in [(0.0, 0.2), (1.0, 0.2), (0.0, 0.05)] {
        let mut dag = ProgressionDag::for_events(n);
        dag.alpha = vec![alpha; n];
        let data = sample_dag(&dag, &catalog, PatternSemantics::Conjunctive, m, NoiseSpec::new(nu).unwrap(), 5).unwrap();
        let ones: usize = data.columns().iter().map(|c| c.count_ones()).sum();
        let cells = (n * m) as f64;
        let flipped = if alpha == 0.0 { ones as f64 } else { cells - ones as f64 };
        let p = nu / 2.0;
        let sigma = (cells * p * (1.0 - p)).sqrt();
        assert!((flipped - cells * p).abs() < 3.0 * sigma, "nu={nu}: {flipped} flips of {cells}");
    }
}

#[test]
fn generator_structure_audit() {
    let n = 15;
    for seed in 0..100 {
        let model = generate_model(&ModelParams::new(n, Topology::ConnectedDag), seed).unwrap();
        let dag = &model.dag;
        assert_eq!(model.roots().len(), 1);
        assert!(model.depth() <= max_depth(n));
        assert!(level_sizes(&model).iter().all(|&s| s > 0));
        for j in 0..n {
            let parents = dag.parents(j);
            assert!(parents.len() <= 3);
            let bound: f64 = parents.iter().map(|&p| dag.alpha[p]).product::<f64>() * 0.95;
            assert!(dag.alpha[j] <= bound + 1e-12);
            assert!(dag.alpha[j] > 0.0);
        }
    }
    for seed in 0..50 {
        for topology in [Topology::Tree, Topology::Forest] {
            let model = generate_model(&ModelParams::new(10, topology), seed).unwrap();
            assert!((0..10).all(|j| model.dag.parents(j).len() <= 1));
            if topology == Topology::Tree {
                assert_eq!(model.dag.edge_count(), 9);
            }
        }
        let model = generate_model(&ModelParams::new(10, Topology::DisconnectedDag), seed).unwrap();
        assert!(model.roots().len() >= 2);
    }
}

#[test]
fn noiseless_rows_are_parent_closed() {
    let model = generate_model(&ModelParams::new(8, Topology::ConnectedDag), 42).unwrap();
    let data = sample_dataset(&model, 2000, NoiseSpec::NONE, 1).unwrap();
    assert!(data.rows().all(|row| is_parent_closed(&model.dag, &row)));
}

#[test]
fn smallest_model() {
    let model = generate_model(&ModelParams::new(2, Topology::Tree), 3).unwrap();
    assert_eq!(model.dag.edges(), vec![(model.roots()[0], 1 - model.roots()[0])]);
    let (root, child) = (model.roots()[0], 1 - model.roots()[0]);
    assert!(model.dag.alpha[child] <= model.dag.alpha[root] * 0.95 + 1e-12);
}

#[test]
fn lethality_branches() {
    let model = generate_lethality_model(&LethalityParams::default()).unwrap();
    let data = sample_dataset(&model, 10_000, NoiseSpec::NONE, 9).unwrap();
    let (mut a_only, mut b_only, mut all) = (0, 0, 0);
    for row in data.rows() {
        match (row[0], row[1], row[2]) {
            (true, false, true) => a_only += 1,
            (false, true, true) => b_only += 1,
            (true, true, true) => all += 1,
            _ => {}
        }
    }
    assert_eq!(all, 0);
    let frac = a_only as f64 / (a_only + b_only) as f64;
    assert!((frac - 0.7).abs() < 0.03, "{frac}");

    let symmetric = generate_lethality_model(&LethalityParams { p_preferential: 0.5, ..Default::default() }).unwrap();
    let data = sample_dataset(&symmetric, 10_000, NoiseSpec::NONE, 9).unwrap();
    let (a, b) = (data.columns()[0].count_ones() as f64, data.columns()[1].count_ones() as f64);
    assert!((a - b).abs() / (a + b) < 0.03);

    let noisy = sample_dataset(&model, 1000, NoiseSpec::new(0.1).unwrap(), 9).unwrap();
    assert!(noisy.rows().any(|r| r[0] && r[1] && r[2]));
}

#[test]
fn sampling_is_deterministic() {
    let params = ModelParams::new(12, Topology::DisconnectedDag);
    assert_eq!(generate_model(&params, 8).unwrap(), generate_model(&params, 8).unwrap());
    let model = generate_model(&params, 8).unwrap();
    let noise = NoiseSpec::new(0.1).unwrap();
    let a = sample_dataset(&model, 300, noise, 2).unwrap();
    assert_eq!(a, sample_dataset(&model, 300, noise, 2).unwrap());
    // Rows have their own streams, so a longer sample extends a shorter one.
    let longer = sample_dataset(&model, 400, noise, 2).unwrap();
    assert_eq!(a, longer.select_rows(&(0..300).collect::<Vec<_>>()).unwrap());
}
