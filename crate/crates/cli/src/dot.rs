//! GraphViz rendering of a model document. Node width follows the observed
//! marginal, edge pen width the non-parametric support.

use std::fmt::Write as _;

use crate::model::{ModelDocument, NodeType};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(doc: &ModelDocument) -> String {
    let mut out = String::from("digraph progression {\n");
    out.push_str("  rankdir=TB;\n");
    out.push_str("  node [style=filled, fillcolor=\"#e8e8e8\", fontname=\"Helvetica\"];\n");
    out.push_str("  edge [arrowsize=0.7];\n");
    for node in &doc.nodes {
        let size = 0.4 + 1.2 * node.marginal.unwrap_or(node.alpha);
        let shape = match node.kind {
            NodeType::Event => "ellipse",
            NodeType::Clause => "box",
        };
        let _ = writeln!(
            out,
            "  n{} [label={}, shape={shape}, width={size:.3}, height={:.3}];",
            node.id,
            quote(&node.label),
            size * 0.6
        );
    }
    for e in &doc.edges {
        let support = e.nonparametric_support.or(e.parametric_support);
        let width = 0.5 + 4.0 * support.unwrap_or(0.5);
        let _ = write!(out, "  n{} -> n{} [penwidth={width:.3}", e.parent, e.child);
        if let Some(s) = support {
            let _ = write!(out, ", label=\"{s:.2}\"");
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    out
}
