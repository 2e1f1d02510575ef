//! Reconstruction metrics and the synthetic benchmark grid.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::formula::parse_hypothesis;
use crate::inference::{infer, InferenceConfig, NodeKind, ProgressionDag};
use crate::rng::derive_seed;
use crate::synth::{
    generate_lethality_model, generate_model, sample_dataset, GenerativeModel, LethalityParams, ModelParams,
    NoiseSpec, Topology,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionScore {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    /// `fp + fn`.
    pub hamming: usize,
    pub precision: f64,
    pub recall: f64,
}

fn ratio(num: usize, den: usize, both_empty: bool) -> f64 {
    match den {
        0 if both_empty => 1.0,
        0 => 0.0,
        _ => num as f64 / den as f64,
    }
}

/// Compares two directed edge sets.
pub fn score_edges(truth: &BTreeSet<(usize, usize)>, inferred: &BTreeSet<(usize, usize)>) -> ReconstructionScore {
    let tp = truth.intersection(inferred).count();
    let fp = inferred.len() - tp;
    let fn_ = truth.len() - tp;
    let both_empty = truth.is_empty() && inferred.is_empty();
    ReconstructionScore {
        tp,
        fp,
        fn_,
        hamming: fp + fn_,
        precision: ratio(tp, tp + fp, both_empty),
        recall: ratio(tp, tp + fn_, both_empty),
    }
}

/// Edge-level comparison over events; clause parents count as edges from
/// each of their atoms.
pub fn score_reconstruction(truth: &GenerativeModel, inferred: &ProgressionDag) -> Result<ReconstructionScore> {
    if truth.n_events() != inferred.event_count() {
        return Err(Error::CatalogMismatch);
    }
    Ok(score_edges(&truth.dag.atomic_edges(), &inferred.atomic_edges()))
}

/// Whether every clause-parent edge of the truth appears in `inferred` with
/// the same clause; `None` when the truth has no clause parents.
pub fn pattern_recovered(truth: &ProgressionDag, inferred: &ProgressionDag) -> Option<bool> {
    let wanted: Vec<(&NodeKind, usize)> = truth
        .edges()
        .into_iter()
        .filter(|&(p, _)| !truth.is_event(p))
        .map(|(p, c)| (truth.node(p), c))
        .collect();
    if wanted.is_empty() {
        return None;
    }
    Some(wanted.iter().all(|&(kind, c)| inferred.parents(c).iter().any(|&p| inferred.node(p) == kind)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Random(Topology),
    /// The `a ^ b -> c` model, inferred with that hypothesis supplied.
    Lethality,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Random(t) => t.name(),
            Family::Lethality => "xor_lethality",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        if s == "xor_lethality" {
            Some(Family::Lethality)
        } else {
            Topology::from_name(s).map(Family::Random)
        }
    }

    fn index(self) -> u64 {
        match self {
            Family::Random(t) => Topology::ALL.iter().position(|&x| x == t).unwrap_or(0) as u64,
            Family::Lethality => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    /// Prima facie DAG followed by the BIC fit.
    Full,
    /// Prima facie DAG only.
    PrimaFacie,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub families: Vec<Family>,
    pub n: usize,
    pub w_star: usize,
    pub models_per_family: usize,
    pub datasets_per_model: usize,
    pub m_values: Vec<usize>,
    pub nu_values: Vec<f64>,
    pub lethality: LethalityParams,
    pub seed: u64,
}

impl ExperimentGrid {
    pub fn check(&self) -> Result<()> {
        let empty = self.families.is_empty() || self.m_values.is_empty() || self.nu_values.is_empty();
        if empty || self.models_per_family == 0 || self.datasets_per_model == 0 {
            return Err(Error::InvalidParameter("every grid dimension needs at least one entry".into()));
        }
        if self.m_values.contains(&0) {
            return Err(Error::InvalidParameter("sample sizes must be positive".into()));
        }
        for &nu in &self.nu_values {
            NoiseSpec::new(nu)?;
        }
        Ok(())
    }

    /// Every job, ordered by family, m, ν, model, dataset.
    pub fn jobs(&self) -> Vec<Job> {
        let mut out = Vec::new();
        for &family in &self.families {
            for &m in &self.m_values {
                for &nu in &self.nu_values {
                    for model in 0..self.models_per_family {
                        for dataset in 0..self.datasets_per_model {
                            out.push(Job { family, m, nu, model, dataset });
                        }
                    }
                }
            }
        }
        out
    }

    /// Model `index` of a family; the same across all m and ν cells.
    pub fn model(&self, family: Family, index: usize) -> Result<GenerativeModel> {
        match family {
            Family::Random(topology) => {
                let params = ModelParams { w_star: self.w_star, ..ModelParams::new(self.n, topology) };
                generate_model(&params, derive_seed(self.seed, "grid-model", family.index() << 32 | index as u64))
            }
            Family::Lethality => generate_lethality_model(&self.lethality),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub family: Family,
    pub m: usize,
    pub nu: f64,
    pub model: usize,
    pub dataset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub job: Job,
    pub result: core::result::Result<RunMetrics, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub score: ReconstructionScore,
    /// Every inferred parent is an event.
    pub atomic_only: bool,
    pub pattern_recovered: Option<bool>,
    pub edges: usize,
}

fn dataset_seed(grid: &ExperimentGrid, job: &Job) -> u64 {
    derive_seed(grid.seed, "grid-dataset", (job.family.index() << 48) ^ ((job.model as u64) << 24) ^ job.dataset as u64)
}

/// Runs one grid job. Failures are captured in the outcome.
pub fn run_job(grid: &ExperimentGrid, job: &Job, config: &InferenceConfig, algorithm: Algorithm) -> RunOutcome {
    let result = (|| -> Result<RunMetrics> {
        let model = grid.model(job.family, job.model)?;
        let data_seed = dataset_seed(grid, job);
        let data = sample_dataset(&model, job.m, NoiseSpec::new(job.nu)?, data_seed)?;
        let hypotheses = match job.family {
            Family::Lethality => {
                let h = parse_hypothesis("a ^ b -> c")?;
                alloc::vec![h.bind(data.catalog())?]
            }
            Family::Random(_) => Vec::new(),
        };
        let config = InferenceConfig { prune: algorithm == Algorithm::Full, ..*config };
        let run_seed = derive_seed(data_seed, "grid-infer", (job.m as u64) ^ job.nu.to_bits());
        let inference = infer(&data, &hypotheses, &config, run_seed)?;
        Ok(RunMetrics {
            score: score_reconstruction(&model, &inference.dag)?,
            atomic_only: inference.dag.is_atomic_only(),
            pattern_recovered: pattern_recovered(&model.dag, &inference.dag),
            edges: inference.dag.edge_count(),
        })
    })();
    RunOutcome { job: *job, result: result.map_err(|e| e.to_string()) }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation; 0 for a single value.
    pub sd: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        if values.is_empty() {
            return Summary { mean: f64::NAN, median: f64::NAN, sd: f64::NAN };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 0 { (sorted[mid - 1] + sorted[mid]) / 2.0 } else { sorted[mid] };
        let sd = if values.len() < 2 {
            0.0
        } else {
            libm::sqrt(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0))
        };
        Summary { mean, median, sd }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub family: Family,
    pub m: usize,
    pub nu: f64,
    pub runs: usize,
    pub failures: usize,
    pub hamming: Summary,
    pub precision: Summary,
    pub recall: Summary,
    /// Runs whose DAG had a clause parent although no hypothesis was given.
    pub non_atomic_runs: usize,
    /// Fraction of successful runs recovering the true clause pattern.
    pub pattern_rate: Option<f64>,
}

/// Aggregates outcomes per `(family, m, ν)` cell, in grid order.
pub fn summarize(outcomes: &[RunOutcome]) -> Vec<CellSummary> {
    let mut cells: BTreeMap<(Family, usize, u64), Vec<&RunOutcome>> = BTreeMap::new();
    for o in outcomes {
        cells.entry((o.job.family, o.job.m, o.job.nu.to_bits())).or_default().push(o);
    }
    cells
        .into_iter()
        .map(|((family, m, nu), runs)| {
            let ok: Vec<&RunMetrics> = runs.iter().filter_map(|o| o.result.as_ref().ok()).collect();
            let pick = |f: fn(&RunMetrics) -> f64| Summary::of(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
            let patterns: Vec<bool> = ok.iter().filter_map(|r| r.pattern_recovered).collect();
            let non_atomic_runs = if family == Family::Lethality {
                0
            } else {
                ok.iter().filter(|r| !r.atomic_only).count()
            };
            CellSummary {
                family,
                m,
                nu: f64::from_bits(nu),
                runs: runs.len(),
                failures: runs.len() - ok.len(),
                hamming: pick(|r| r.score.hamming as f64),
                precision: pick(|r| r.score.precision),
                recall: pick(|r| r.score.recall),
                non_atomic_runs,
                pattern_rate: (!patterns.is_empty())
                    .then(|| patterns.iter().filter(|&&b| b).count() as f64 / patterns.len() as f64),
            }
        })
        .collect()
}

/// Sequential grid run.
pub fn run_grid(grid: &ExperimentGrid, config: &InferenceConfig, algorithm: Algorithm) -> Result<Vec<RunOutcome>> {
    grid.check()?;
    Ok(grid.jobs().iter().map(|job| run_job(grid, job, config, algorithm)).collect())
}

impl core::fmt::Display for ReconstructionScore {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "tp={} fp={} fn={} hamming={} precision={} recall={}",
            self.tp, self.fp, self.fn_, self.hamming, self.precision, self.recall
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(edges: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        edges.iter().copied().collect()
    }

    #[test]
    fn chain_versus_fork() {
        let s = score_edges(&set(&[(0, 1), (1, 2)]), &set(&[(0, 1), (0, 2)]));
        assert_eq!((s.tp, s.fp, s.fn_, s.hamming), (1, 1, 1, 2));
        assert_eq!(s.precision, 0.5);
    }

    #[test]
    fn empty_conventions() {
        let s = score_edges(&set(&[]), &set(&[]));
        assert_eq!((s.precision, s.recall, s.hamming), (1.0, 1.0, 0));
        let s = score_edges(&set(&[(0, 1), (1, 2)]), &set(&[]));
        assert_eq!((s.precision, s.recall, s.hamming), (0.0, 0.0, 2));
    }

    #[test]
    fn summary_stats() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.median, 2.5);
        assert!((s.sd - libm::sqrt(5.0 / 3.0)).abs() < 1e-12);
    }
}
