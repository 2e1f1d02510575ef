//! Tabular outputs: selectivity dumps and benchmark tables.

use std::fmt::Write as _;

use progressa_core::eval::{CellSummary, RunOutcome};
use progressa_core::inference::Inference;

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// One row per tested `(cause, effect)` pair.
pub fn scores_tsv(run: &Inference, alpha: f64) -> String {
    let lifted = &run.lifted;
    let mut out = String::from("cause\teffect\tgamma\tlambda\tp_tp\tp_pr\taccepted\tprima_facie\tfitted\n");
    for (&(i, j), s) in &run.scores.scores {
        let hit = |dag: &progressa_core::inference::ProgressionDag| {
            if i < dag.len() {
                dag.has_edge(i, j)
            } else {
                lifted.hypotheses().iter().any(|h| {
                    h.formula_column == i && h.hypothesis.target == j && h.clause_nodes.iter().any(|&c| dag.has_edge(c, j))
                })
            }
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            lifted.label(i),
            lifted.label(j),
            s.gamma,
            s.lambda,
            opt(s.p_tp),
            opt(s.p_pr),
            s.accepted(alpha),
            hit(&run.prima_facie),
            hit(&run.dag),
        );
    }
    out
}

pub fn results_tsv(outcomes: &[RunOutcome]) -> String {
    let mut out = String::from(
        "family\tm\tnu\tmodel\tdataset\tstatus\ttp\tfp\tfn\thamming\tprecision\trecall\tedges\tatomic_only\tpattern_recovered\terror\n",
    );
    for o in outcomes {
        let j = &o.job;
        let _ = write!(out, "{}\t{}\t{}\t{}\t{}\t", j.family.name(), j.m, j.nu, j.model, j.dataset);
        match &o.result {
            Ok(r) => {
                let s = &r.score;
                let pattern = r.pattern_recovered.map_or("NA".to_string(), |b| b.to_string());
                let _ = writeln!(
                    out,
                    "ok\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{pattern}\t",
                    s.tp, s.fp, s.fn_, s.hamming, s.precision, s.recall, r.edges, r.atomic_only
                );
            }
            Err(e) => {
                let _ = writeln!(out, "error\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\t{}", e.replace(['\t', '\n'], " "));
            }
        }
    }
    out
}

pub fn summary_tsv(cells: &[CellSummary]) -> String {
    let mut out = String::from(
        "family\tm\tnu\truns\tfailures\thamming_mean\thamming_median\thamming_sd\tprecision_mean\tprecision_median\tprecision_sd\trecall_mean\trecall_median\trecall_sd\tnon_atomic_runs\tpattern_rate\n",
    );
    for c in cells {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.family.name(),
            c.m,
            c.nu,
            c.runs,
            c.failures,
            c.hamming.mean,
            c.hamming.median,
            c.hamming.sd,
            c.precision.mean,
            c.precision.median,
            c.precision.sd,
            c.recall.mean,
            c.recall.median,
            c.recall.sd,
            c.non_atomic_runs,
            opt(c.pattern_rate),
        );
    }
    out
}
