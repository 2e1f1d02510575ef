//! Model documents: JSON schema `progressa-model` version 1, shared by ground
//! truth and inferred models.

use std::collections::BTreeMap;
use std::path::Path;

use progressa_core::formula::parse_formula;
use progressa_core::inference::{ConfidenceReport, Inference, NodeKind, ProgressionDag, SkipReason};
use progressa_core::lift::render;
use progressa_core::matrix::Degeneracy;
use progressa_core::synth::GenerativeModel;
use progressa_core::EventCatalog;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA: &str = "progressa-model";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Truth,
    Inferred,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeType {
    Event,
    Clause,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: usize,
    #[serde(rename = "type")]
    pub kind: NodeType,
    pub label: String,
    pub alpha: f64,
    /// Observed frequency of the node's column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selectivity {
    /// Column whose test produced the edge: the parent itself, or the whole
    /// hypothesis formula for clause parents.
    pub source: String,
    pub gamma: f64,
    pub lambda: f64,
    pub p_tp: Option<f64>,
    pub p_pr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub parent: usize,
    pub child: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selectivity: Option<Selectivity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonparametric_support: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parametric_support: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypergeometric_p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub family: String,
    pub semantics: String,
    pub seed: u64,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationDoc {
    pub never_observed: Vec<String>,
    pub always_observed: Vec<String>,
    pub duplicate_groups: Vec<Vec<String>>,
    pub excluded: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedDoc {
    pub hypothesis: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapDoc {
    pub resamples: usize,
    pub rejected: usize,
    pub rejections_by_unit: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceDoc {
    pub iterations: usize,
    pub failures: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceDoc {
    pub samples: usize,
    pub hypotheses: Vec<String>,
    pub skipped_hypotheses: Vec<SkippedDoc>,
    pub validation: ValidationDoc,
    pub prima_facie_edges: Vec<[usize; 2]>,
    pub loops_removed: Vec<[usize; 2]>,
    pub bic: f64,
    pub bic_empty: f64,
    pub bic_prima_facie: Option<f64>,
    pub bootstrap: BootstrapDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<ConfidenceDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub schema: String,
    pub version: u32,
    pub kind: ModelKind,
    pub events: Vec<String>,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inference: Option<InferenceDoc>,
}

fn node_doc(dag: &ProgressionDag, names: &[String], k: usize, marginal: Option<f64>) -> NodeDoc {
    let (kind, label) = match dag.node(k) {
        NodeKind::Event(e) => (NodeType::Event, names[*e].clone()),
        NodeKind::Clause(c) => (NodeType::Clause, render(&c.to_formula(), names)),
    };
    NodeDoc { id: k, kind, label, alpha: dag.alpha[k], marginal }
}

/// Events plus the clause nodes that have children.
fn kept_nodes(dag: &ProgressionDag) -> Vec<usize> {
    let used = dag.used_clauses();
    (0..dag.len()).filter(|&k| dag.is_event(k) || used.contains(&k)).collect()
}

pub fn truth_document(model: &GenerativeModel, family: &str, seed: u64, params: BTreeMap<String, f64>) -> ModelDocument {
    let dag = &model.dag;
    ModelDocument {
        schema: SCHEMA.into(),
        version: VERSION,
        kind: ModelKind::Truth,
        events: model.names.clone(),
        nodes: kept_nodes(dag).into_iter().map(|k| node_doc(dag, &model.names, k, None)).collect(),
        edges: dag
            .edges()
            .into_iter()
            .map(|(parent, child)| EdgeDoc {
                parent,
                child,
                selectivity: None,
                nonparametric_support: None,
                parametric_support: None,
                hypergeometric_p: None,
            })
            .collect(),
        generator: Some(GeneratorDoc { family: family.into(), semantics: model.semantics.name().into(), seed, params }),
        inference: None,
    }
}

fn skip_reason(r: SkipReason) -> &'static str {
    match r {
        SkipReason::TargetUnusable => "target_unusable",
        SkipReason::DegenerateFormula => "degenerate_formula",
        SkipReason::IndistinguishableFromTarget => "indistinguishable_from_target",
    }
}

pub fn inferred_document(run: &Inference, confidence: Option<&ConfidenceReport>) -> ModelDocument {
    let lifted = &run.lifted;
    let names = lifted.base().catalog().names().to_vec();
    let m = lifted.n_samples() as f64;
    let dag = &run.dag;
    let support: BTreeMap<(usize, usize), _> = confidence
        .map(|c| c.edges.iter().map(|e| ((e.parent, e.child), e)).collect())
        .unwrap_or_default();
    let edges = run
        .edge_details()
        .into_iter()
        .map(|e| {
            let conf = support.get(&(e.parent, e.child));
            EdgeDoc {
                parent: e.parent,
                child: e.child,
                selectivity: Some(Selectivity {
                    source: lifted.label(e.source.0).to_string(),
                    gamma: e.score.gamma,
                    lambda: e.score.lambda,
                    p_tp: e.score.p_tp,
                    p_pr: e.score.p_pr,
                }),
                nonparametric_support: conf.and_then(|c| c.nonparametric_support),
                parametric_support: conf.and_then(|c| c.parametric_support),
                hypergeometric_p: conf.map(|c| c.hypergeometric_p),
            }
        })
        .collect();
    let v = &run.validation;
    let pick = |d: Degeneracy| v.degenerate.iter().filter(|x| x.1 == d).map(|x| names[x.0 .0].clone()).collect();
    let validation = ValidationDoc {
        never_observed: pick(Degeneracy::NeverObserved),
        always_observed: pick(Degeneracy::AlwaysObserved),
        duplicate_groups: v.duplicates.iter().map(|g| g.iter().map(|e| names[e.0].clone()).collect()).collect(),
        excluded: run.excluded.iter().map(|&e| names[e].clone()).collect(),
    };
    let hyps = lifted.hypotheses();
    let inference = InferenceDoc {
        samples: lifted.n_samples(),
        hypotheses: hyps.iter().map(|h| h.hypothesis.text.clone()).collect(),
        skipped_hypotheses: run
            .skipped
            .iter()
            .map(|(&h, &r)| SkippedDoc { hypothesis: hyps[h].hypothesis.text.clone(), reason: skip_reason(r).into() })
            .collect(),
        validation,
        prima_facie_edges: run.prima_facie.edges().into_iter().map(|(p, c)| [p, c]).collect(),
        loops_removed: run.loops_removed.iter().map(|e| [e.parent, e.child]).collect(),
        bic: run.bic,
        bic_empty: run.bic_empty,
        bic_prima_facie: run.bic_prima_facie,
        bootstrap: BootstrapDoc {
            resamples: run.bootstrap_resamples,
            rejected: run.bootstrap_rejected,
            rejections_by_unit: run
                .rejections_by_unit
                .iter()
                .map(|(&u, &c)| (lifted.label(u).to_string(), c))
                .collect(),
        },
        confidence: confidence.map(|c| ConfidenceDoc {
            iterations: c.iterations,
            failures: c.failures.iter().map(|(&mode, &n)| (crate::mode_name(mode).to_string(), n)).collect(),
        }),
    };
    ModelDocument {
        schema: SCHEMA.into(),
        version: VERSION,
        kind: ModelKind::Inferred,
        events: names.clone(),
        nodes: kept_nodes(dag)
            .into_iter()
            .map(|k| node_doc(dag, &names, k, Some(lifted.column(k).count_ones() as f64 / m)))
            .collect(),
        edges,
        generator: None,
        inference: Some(inference),
    }
}

pub fn to_json(doc: &ModelDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("model documents serialize");
    s.push('\n');
    s
}

/// Parses a model document, checking the schema name and version before
/// anything else.
pub fn parse_document(text: &str, path: &Path) -> Result<ModelDocument> {
    let schema_err = |message: String| CliError::Schema { path: path.to_path_buf(), message };
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| schema_err(format!("invalid JSON: {e}")))?;
    let schema = value.get("schema").and_then(|v| v.as_str());
    let version = value.get("version").and_then(|v| v.as_u64());
    if schema != Some(SCHEMA) || version != Some(VERSION as u64) {
        return Err(schema_err(format!(
            "expected schema `{SCHEMA}` version {VERSION}, found {} version {}",
            schema.map_or("none".to_string(), |s| format!("`{s}`")),
            version.map_or("none".to_string(), |v| v.to_string())
        )));
    }
    serde_json::from_value(value).map_err(|e| schema_err(e.to_string()))
}

pub fn read_document(path: &Path) -> Result<ModelDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_document(&text, path)
}

/// Rebuilds the DAG. Events keep their indices; clause nodes are renumbered
/// after them in document order.
pub fn document_dag(doc: &ModelDocument, path: &Path) -> Result<ProgressionDag> {
    let schema_err = |message: String| CliError::Schema { path: path.to_path_buf(), message };
    let catalog = EventCatalog::new(doc.events.iter().cloned())?;
    let n = catalog.len();
    let mut kinds: Vec<NodeKind> = (0..n).map(NodeKind::Event).collect();
    let mut alpha = vec![0.0; n];
    let mut index = BTreeMap::new();
    for node in &doc.nodes {
        let k = match node.kind {
            NodeType::Event => {
                if node.id >= n || doc.events[node.id] != node.label {
                    return Err(schema_err(format!("event node {} does not match the event list", node.id)));
                }
                node.id
            }
            NodeType::Clause => {
                let cnf = parse_formula(&node.label)
                    .and_then(|f| f.bind(&catalog))
                    .and_then(|f| f.to_cnf())
                    .map_err(|e| schema_err(format!("clause node {}: {e}", node.id)))?;
                let [clause] = cnf.clauses() else {
                    return Err(schema_err(format!("clause node {} is not a single clause", node.id)));
                };
                kinds.push(NodeKind::Clause(clause.clone()));
                alpha.push(0.0);
                kinds.len() - 1
            }
        };
        if index.insert(node.id, k).is_some() {
            return Err(schema_err(format!("node id {} appears twice", node.id)));
        }
        alpha[k] = node.alpha;
    }
    let mut dag = ProgressionDag::empty(kinds);
    dag.alpha = alpha;
    for e in &doc.edges {
        let lookup = |id: usize| index.get(&id).copied().ok_or_else(|| schema_err(format!("edge references unknown node {id}")));
        let (p, c) = (lookup(e.parent)?, lookup(e.child)?);
        if !dag.is_event(c) {
            return Err(schema_err(format!("edge {} -> {} points into a clause node", e.parent, e.child)));
        }
        dag.add_edge(p, c);
    }
    Ok(dag)
}
