//! The four subcommands. Each resolves its settings (flags over file over
//! defaults), runs, writes its bundle and finally its manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use progressa_core::eval::{
    pattern_recovered, run_job, score_edges, summarize, Algorithm, CellSummary, ExperimentGrid, Family, RunOutcome,
};
use progressa_core::inference::{
    assemble_report, confidence_replicate, infer, ConfidenceMode, FitConfig, InferenceConfig, ReplicateEdges,
};
use progressa_core::stats::BootstrapConfig;
use progressa_core::synth::{
    generate_lethality_model, generate_model, sample_dataset, LethalityParams, ModelParams, NoiseSpec,
    PatternSemantics, Topology,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::cli::{BenchmarkArgs, EvaluateArgs, InferArgs, SimulateArgs};
use crate::config::{resolve_seed, FileConfig};
use crate::error::{CliError, Result};
use crate::manifest::{Input, Manifest};
use crate::{dataset, dot, hypotheses, model, report, svg};

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} worker threads: {e}", jobs.unwrap_or(0))))
}

fn output_dir(flag: &Option<PathBuf>, file: &Option<PathBuf>) -> Result<PathBuf> {
    flag.clone().or_else(|| file.clone()).ok_or_else(|| CliError::Usage("an output directory is required (--output)".into()))
}

/// Writes `files` into `dir` and then the manifest, so a manifest marks a
/// complete bundle.
fn write_bundle<S: Serialize>(dir: &Path, files: &[(&str, String)], mut manifest: Manifest<'_, S>) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let stale = dir.join("manifest.json");
    if stale.exists() {
        std::fs::remove_file(&stale).map_err(|e| CliError::io(&stale, e))?;
    }
    for (name, contents) in files {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        manifest.outputs.push(name.to_string());
    }
    manifest.outputs.sort();
    std::fs::write(&stale, manifest.to_json()).map_err(|e| CliError::io(&stale, e))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn parse_modes(s: &str) -> Result<Vec<ConfidenceMode>> {
    match s {
        "nonparametric" => Ok(vec![ConfidenceMode::NonParametric]),
        "parametric" => Ok(vec![ConfidenceMode::Parametric]),
        "both" => Ok(vec![ConfidenceMode::NonParametric, ConfidenceMode::Parametric]),
        "none" => Ok(vec![]),
        other => Err(CliError::Usage(format!(
            "unknown confidence mode `{other}` (expected nonparametric, parametric, both or none)"
        ))),
    }
}

#[derive(Debug, Serialize)]
pub struct InferSettings {
    pub dataset: PathBuf,
    pub hypotheses: Option<PathBuf>,
    pub transpose: bool,
    pub expand_hypotheses: bool,
    pub alpha: f64,
    pub bootstrap: usize,
    pub confidence_iterations: usize,
    pub confidence_mode: String,
    pub fdr: bool,
    pub force: bool,
    pub restarts: usize,
    pub max_parents: usize,
    pub dump_scores: bool,
}

pub fn infer_cmd(args: &InferArgs, file: &FileConfig, jobs: Option<usize>) -> Result<PathBuf> {
    let f = &file.infer;
    let out = output_dir(&args.output, &f.output)?;
    let seed = resolve_seed(args.seed, file)?;
    let s = InferSettings {
        dataset: args.dataset.clone(),
        hypotheses: args.hypotheses.clone().or_else(|| f.hypotheses.clone()),
        transpose: args.transpose || f.transpose.unwrap_or(false),
        expand_hypotheses: args.expand_hypotheses || f.expand_hypotheses.unwrap_or(false),
        alpha: args.alpha.or(f.alpha).unwrap_or(0.05),
        bootstrap: args.bootstrap.or(f.bootstrap).unwrap_or(100),
        confidence_iterations: args.confidence_iterations.or(f.confidence_iterations).unwrap_or(1000),
        confidence_mode: args.confidence_mode.clone().or_else(|| f.confidence_mode.clone()).unwrap_or("nonparametric".into()),
        fdr: args.fdr || f.fdr.unwrap_or(false),
        force: args.force || f.force.unwrap_or(false),
        restarts: args.restarts.or(f.restarts).unwrap_or(1),
        max_parents: args.max_parents.or(f.max_parents).unwrap_or(progressa_core::inference::DEFAULT_MAX_PARENTS),
        dump_scores: args.dump_scores || f.dump_scores.unwrap_or(false),
    };
    check_alpha(s.alpha)?;
    let modes = parse_modes(&s.confidence_mode)?;

    let data = dataset::read_matrix(&s.dataset, s.transpose)?;
    let hyps = match &s.hypotheses {
        Some(p) => hypotheses::read_hypotheses(p, data.catalog(), s.expand_hypotheses)?,
        None => Vec::new(),
    };
    let validation = data.validate();
    let names = data.catalog().names();
    for (e, kind) in &validation.degenerate {
        eprintln!("warning: event `{}` is {:?}", names[e.0], kind);
    }
    for group in &validation.duplicates {
        let g: Vec<&str> = group.iter().map(|e| names[e.0].as_str()).collect();
        eprintln!("warning: identical columns: {}", g.join(", "));
    }

    let config = InferenceConfig {
        alpha: s.alpha,
        bootstrap: BootstrapConfig { k: s.bootstrap, max_rejections: None },
        fdr: s.fdr,
        force: s.force,
        prune: true,
        fit: FitConfig { restarts: s.restarts, max_parents: s.max_parents },
    };
    let run = infer(&data, &hyps, &config, seed)?;

    let confidence = if s.confidence_iterations > 0 && !modes.is_empty() {
        let workers = pool(jobs)?;
        let mut runs: BTreeMap<ConfidenceMode, Vec<ReplicateEdges>> = BTreeMap::new();
        for &mode in &modes {
            let reps = workers.install(|| {
                (0..s.confidence_iterations)
                    .into_par_iter()
                    .map(|r| confidence_replicate(&data, &hyps, &config, &run, mode, seed, r).ok())
                    .collect()
            });
            runs.insert(mode, reps);
        }
        Some(assemble_report(&run, s.confidence_iterations, &runs))
    } else {
        None
    };

    let doc = model::inferred_document(&run, confidence.as_ref());
    let mut files = vec![("model.json", model::to_json(&doc)), ("model.dot", dot::to_dot(&doc))];
    if s.dump_scores {
        files.push(("scores.tsv", report::scores_tsv(&run, s.alpha)));
    }
    let mut manifest = Manifest::new("infer", seed, &s);
    manifest.inputs.push(Input::of("dataset", &s.dataset)?);
    if let Some(p) = &s.hypotheses {
        manifest.inputs.push(Input::of("hypotheses", p)?);
    }
    write_bundle(&out, &files, manifest)?;
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct SimulateSettings {
    pub topology: String,
    pub semantics: String,
    pub n: usize,
    pub m: usize,
    pub nu: f64,
    pub w_star: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub components: Option<usize>,
    pub p_preferential: f64,
}

pub fn simulate_cmd(args: &SimulateArgs, file: &FileConfig) -> Result<PathBuf> {
    let f = &file.simulate;
    let out = output_dir(&args.output, &f.output)?;
    let seed = resolve_seed(args.seed, file)?;
    let s = SimulateSettings {
        topology: args.topology.clone().or_else(|| f.topology.clone()).unwrap_or("tree".into()),
        semantics: args.semantics.clone().or_else(|| f.semantics.clone()).unwrap_or("conjunctive".into()),
        n: args.n.or(f.n).unwrap_or(15),
        m: args.m.or(f.m).unwrap_or(250),
        nu: args.nu.or(f.nu).unwrap_or(0.0),
        w_star: args.w_star.or(f.w_star).unwrap_or(3),
        p_min: args.p_min.or(f.p_min).unwrap_or(0.05),
        p_max: args.p_max.or(f.p_max).unwrap_or(0.95),
        components: args.components.or(f.components),
        p_preferential: args.p_preferential.or(f.p_preferential).unwrap_or(0.7),
    };
    let family = Family::from_name(&s.topology)
        .ok_or_else(|| CliError::Usage(format!("unknown topology `{}`", s.topology)))?;
    let noise = NoiseSpec::new(s.nu)?;
    let mut params = BTreeMap::new();
    let model = match family {
        Family::Random(topology) => {
            let semantics = match PatternSemantics::from_name(&s.semantics) {
                Some(sem @ (PatternSemantics::Conjunctive | PatternSemantics::Disjunctive)) => sem,
                _ => return Err(CliError::Usage(format!("unknown semantics `{}`", s.semantics))),
            };
            let p = ModelParams { n: s.n, topology, w_star: s.w_star, p_min: s.p_min, p_max: s.p_max, components: s.components };
            let mut model = generate_model(&p, seed)?;
            model.semantics = semantics;
            params.extend([
                ("n".to_string(), s.n as f64),
                ("w_star".to_string(), s.w_star as f64),
                ("p_min".to_string(), s.p_min),
                ("p_max".to_string(), s.p_max),
            ]);
            model
        }
        Family::Lethality => {
            let p = LethalityParams { p_preferential: s.p_preferential, ..Default::default() };
            params.extend([
                ("p_preferential".to_string(), p.p_preferential),
                ("driver_rate".to_string(), p.driver_rate),
                ("co_occurrence".to_string(), p.co_occurrence),
                ("target_rate".to_string(), p.target_rate),
            ]);
            generate_lethality_model(&p)?
        }
    };
    let data = sample_dataset(&model, s.m, noise, seed)?;
    let truth = model::truth_document(&model, family.name(), seed, params);
    let files = [("dataset.tsv", dataset::format_matrix(&data)), ("truth.json", model::to_json(&truth))];
    write_bundle(&out, &files, Manifest::new("simulate", seed, &s))?;
    Ok(out)
}

pub fn evaluate_cmd(args: &EvaluateArgs) -> Result<String> {
    let truth = model::read_document(&args.truth)?;
    let inferred = model::read_document(&args.inferred)?;
    if truth.events != inferred.events {
        return Err(progressa_core::Error::CatalogMismatch.into());
    }
    let t = model::document_dag(&truth, &args.truth)?;
    let i = model::document_dag(&inferred, &args.inferred)?;
    let score = score_edges(&t.atomic_edges(), &i.atomic_edges());
    let body = json!({
        "tp": score.tp,
        "fp": score.fp,
        "fn": score.fn_,
        "hamming": score.hamming,
        "precision": score.precision,
        "recall": score.recall,
        "pattern_recovered": pattern_recovered(&t, &i),
    });
    let mut text = serde_json::to_string_pretty(&body).expect("scores serialize");
    text.push('\n');
    if let Some(path) = &args.output {
        std::fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
    }
    Ok(text)
}

#[derive(Debug, Serialize)]
pub struct BenchmarkSettings {
    pub families: Vec<String>,
    pub n: usize,
    pub w_star: usize,
    pub models: usize,
    pub datasets: usize,
    pub m: Vec<usize>,
    pub nu: Vec<f64>,
    pub algorithm: String,
    pub alpha: f64,
    pub bootstrap: usize,
    pub p_preferential: f64,
    pub svg: bool,
}

pub fn benchmark_settings(args: &BenchmarkArgs, file: &FileConfig) -> Result<BenchmarkSettings> {
    let f = &file.benchmark;
    let scale = args.scale.clone().or_else(|| f.scale.clone()).unwrap_or("full".into());
    let (models, datasets) = match scale.as_str() {
        "full" => (100, 10),
        "desk" => (10, 3),
        other => return Err(CliError::Usage(format!("unknown scale `{other}` (expected full or desk)"))),
    };
    let s = BenchmarkSettings {
        families: args.families.clone().or_else(|| f.families.clone()).unwrap_or_else(|| {
            Topology::ALL.iter().map(|t| t.name().to_string()).collect()
        }),
        n: args.n.or(f.n).unwrap_or(15),
        w_star: args.w_star.or(f.w_star).unwrap_or(3),
        models: args.models.or(f.models).unwrap_or(models),
        datasets: args.datasets.or(f.datasets).unwrap_or(datasets),
        m: args.m.clone().or_else(|| f.m.clone()).unwrap_or_else(|| vec![50, 100, 150, 200, 250]),
        nu: args.nu.clone().or_else(|| f.nu.clone()).unwrap_or_else(|| vec![0.0, 0.05, 0.1, 0.15, 0.2]),
        algorithm: args.algorithm.clone().or_else(|| f.algorithm.clone()).unwrap_or("full".into()),
        alpha: args.alpha.or(f.alpha).unwrap_or(0.05),
        bootstrap: args.bootstrap.or(f.bootstrap).unwrap_or(100),
        p_preferential: args.p_preferential.or(f.p_preferential).unwrap_or(0.7),
        svg: args.svg || f.svg.unwrap_or(false),
    };
    check_alpha(s.alpha)?;
    Ok(s)
}

fn plots(cells: &[CellSummary], s: &BenchmarkSettings) -> Vec<(&'static str, String)> {
    let families: Vec<Family> = s.families.iter().filter_map(|f| Family::from_name(f)).collect();
    let nu0 = s.nu.iter().copied().fold(f64::INFINITY, f64::min);
    let m_max = s.m.iter().copied().max().unwrap_or(0);
    let series = |keep: &dyn Fn(&CellSummary) -> Option<f64>| -> Vec<svg::Series> {
        families
            .iter()
            .map(|&fam| svg::Series {
                name: fam.name().to_string(),
                points: cells
                    .iter()
                    .filter(|c| c.family == fam)
                    .filter_map(|c| keep(c).map(|x| (x, c.hamming.mean)))
                    .collect(),
            })
            .collect()
    };
    let by_m = series(&|c| (c.nu == nu0).then_some(c.m as f64));
    let by_nu = series(&|c| (c.m == m_max).then_some(c.nu));
    vec![
        ("hd_vs_m.svg", svg::line_plot(&format!("Mean Hamming distance, nu = {nu0}"), "samples m", "mean HD", &by_m)),
        ("hd_vs_nu.svg", svg::line_plot(&format!("Mean Hamming distance, m = {m_max}"), "noise nu", "mean HD", &by_nu)),
    ]
}

fn summary_json(cells: &[CellSummary], s: &BenchmarkSettings, seed: u64) -> String {
    let stat = |x: &progressa_core::eval::Summary| json!({ "mean": x.mean, "median": x.median, "sd": x.sd });
    let cells: Vec<_> = cells
        .iter()
        .map(|c| {
            json!({
                "family": c.family.name(),
                "m": c.m,
                "nu": c.nu,
                "runs": c.runs,
                "failures": c.failures,
                "hamming": stat(&c.hamming),
                "precision": stat(&c.precision),
                "recall": stat(&c.recall),
                "non_atomic_runs": c.non_atomic_runs,
                "pattern_rate": c.pattern_rate,
            })
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&json!({ "seed": seed, "grid": s, "cells": cells })).expect("summaries serialize");
    text.push('\n');
    text
}

/// Runs the grid described by `s` on `jobs` threads. Outcomes are in grid
/// order whatever the thread count.
pub fn run_benchmark(s: &BenchmarkSettings, seed: u64, jobs: Option<usize>) -> Result<Vec<RunOutcome>> {
    let families = s
        .families
        .iter()
        .map(|f| Family::from_name(f).ok_or_else(|| CliError::Usage(format!("unknown family `{f}`"))))
        .collect::<Result<Vec<_>>>()?;
    let algorithm = match s.algorithm.as_str() {
        "full" => Algorithm::Full,
        "none" => Algorithm::PrimaFacie,
        other => return Err(CliError::Usage(format!("unknown algorithm `{other}` (expected full or none)"))),
    };
    let grid = ExperimentGrid {
        families,
        n: s.n,
        w_star: s.w_star,
        models_per_family: s.models,
        datasets_per_model: s.datasets,
        m_values: s.m.clone(),
        nu_values: s.nu.clone(),
        lethality: LethalityParams { p_preferential: s.p_preferential, ..Default::default() },
        seed,
    };
    grid.check()?;
    let config = InferenceConfig {
        alpha: s.alpha,
        bootstrap: BootstrapConfig { k: s.bootstrap, max_rejections: None },
        ..Default::default()
    };
    config.check()?;
    let jobs_list = grid.jobs();
    Ok(pool(jobs)?.install(|| jobs_list.par_iter().map(|j| run_job(&grid, j, &config, algorithm)).collect()))
}

pub fn benchmark_cmd(args: &BenchmarkArgs, file: &FileConfig, jobs: Option<usize>) -> Result<PathBuf> {
    let out = output_dir(&args.output, &file.benchmark.output)?;
    let seed = resolve_seed(args.seed, file)?;
    let s = benchmark_settings(args, file)?;
    let outcomes = run_benchmark(&s, seed, jobs)?;
    let cells = summarize(&outcomes);
    let mut files = vec![
        ("results.tsv", report::results_tsv(&outcomes)),
        ("summary.tsv", report::summary_tsv(&cells)),
        ("summary.json", summary_json(&cells, &s, seed)),
    ];
    if s.svg {
        files.extend(plots(&cells, &s));
    }
    write_bundle(&out, &files, Manifest::new("benchmark", seed, &s))?;
    Ok(out)
}

