mod common;
mod oracles;

use common::{arb_matrix, matrix};
use oracles::exhaustive_mann_whitney_p;
use progressa_core::inference::{infer, InferenceConfig, ProgressionDag};
use progressa_core::stats::{mann_whitney_greater, score_pair, Method};
use progressa_core::synth::{sample_dag, NoiseSpec, PatternSemantics};
use progressa_core::{EmpiricalProbabilities, EventCatalog};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

#[test]
fn mann_whitney_matches_enumeration_up_to_seven() {
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = move |k: u64| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state % k
    };
    let mut checked = 0;
    for nx in 1..=7 {
        for ny in 1..=7 {
            for trial in 0..12 {
                // Small alphabets force ties, wide ones avoid them.
                let alphabet = if trial % 2 == 0 { 3 } else { 1000 };
                let x: Vec<f64> = (0..nx).map(|_| next(alphabet) as f64 / 10.0).collect();
                let y: Vec<f64> = (0..ny).map(|_| next(alphabet) as f64 / 10.0).collect();
                let mw = mann_whitney_greater(&x, &y).unwrap();
                if mw.all_tied {
                    assert_eq!(mw.p_value, 0.5);
                    continue;
                }
                assert_eq!(mw.method, Method::Exact);
                let want = exhaustive_mann_whitney_p(&x, &y);
                assert!((mw.p_value - want).abs() < 1e-12, "x={x:?} y={y:?} got {} want {want}", mw.p_value);
                checked += 1;
            }
        }
    }
    assert!(checked > 500);
}

#[test]
fn worked_probabilities() {
    let p = matrix(&["111", "101", "010", "101"]).probabilities();
    assert_eq!(p.marginal, vec![0.75, 0.5, 0.75]);
    assert_eq!(p.joint(0, 2), 0.75);
}

proptest! {
    #[test]
    fn frechet_bounds(data in arb_matrix(20, 5)) {
        let p = data.probabilities();
        let n = data.n_events();
        for i in 0..n {
            prop_assert_eq!(p.joint(i, i), p.marginal[i]);
            for j in 0..n {
                let joint = p.joint(i, j);
                prop_assert_eq!(joint, p.joint(j, i));
                prop_assert!(joint <= p.marginal[i].min(p.marginal[j]) + 1e-15);
                prop_assert!(joint >= p.marginal[i] + p.marginal[j] - 1.0 - 1e-15);
            }
        }
    }

    #[test]
    fn strict_containment_is_selective(
        sizes in (2usize..40).prop_flat_map(|m| (Just(m), 1..m)).prop_flat_map(|(m, ci)| (Just(m), Just(ci), 1..=ci)),
    ) {
        // j's rows are a strict subset of i's rows, and i is not always present.
        let (m, ci, cj) = sizes;
        prop_assume!(cj < ci);
        let rows: Vec<Vec<bool>> = (0..m).map(|r| vec![r < ci, r < cj]).collect();
        let data = progressa_core::AlterationMatrix::from_rows(["i", "j"], &rows).unwrap();
        let s = score_pair(&data.probabilities(), 0, 1).unwrap();
        prop_assert!(s.gamma > 0.0);
        prop_assert!(s.lambda > 0.0);
    }

    #[test]
    fn gamma_is_antisymmetric(data in arb_matrix(20, 3)) {
        let p: EmpiricalProbabilities = data.probabilities();
        for i in 0..data.n_events() {
            for j in 0..data.n_events() {
                if let (Ok(a), Ok(b)) = (score_pair(&p, i, j), score_pair(&p, j, i)) {
                    prop_assert_eq!(a.gamma, -b.gamma);
                }
            }
        }
    }
}

#[test]
fn temporal_priority_never_accepted_both_ways() {
    let config = InferenceConfig { bootstrap: progressa_core::stats::BootstrapConfig { k: 40, max_rejections: None }, ..Default::default() };
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..40 {
        let data = arb_matrix(30, 4).new_tree(&mut runner).unwrap().current();
        let Ok(run) = infer(&data, &[], &config, 7) else { continue };
        for (&(i, j), s) in &run.scores.scores {
            if let Some(rev) = run.scores.get(j, i) {
                let both = s.p_tp.unwrap() < 0.5 && rev.p_tp.unwrap() < 0.5;
                assert!(!both, "pair ({i}, {j}) has temporal priority both ways");
            }
        }
    }
}

#[test]
fn chain_is_accepted_in_one_direction() {
    let mut dag = ProgressionDag::for_events(2);
    dag.add_edge(0, 1);
    dag.alpha = vec![0.6, 0.7];
    let catalog = EventCatalog::new(["a", "b"]).unwrap();
    let data = sample_dag(&dag, &catalog, PatternSemantics::Conjunctive, 500, NoiseSpec::NONE, 11).unwrap();
    let run = infer(&data, &[], &InferenceConfig::default(), 3).unwrap();
    assert!(run.scores.accepted(0, 1, 0.05));
    assert!(!run.scores.accepted(1, 0, 0.05));
    assert_eq!(run.dag.edges(), vec![(0, 1)]);
}
