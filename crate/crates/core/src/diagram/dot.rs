use std::fmt::Write;

use super::{DiagramModel, PanelKind, ShapeKind};

fn quote(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders the panels as one DOT digraph with a cluster per panel.
/// Conclusions are ranked on top, matching the SVG layout.
pub fn emit_dot(models: &[DiagramModel]) -> String {
    let mut out = String::new();
    out.push_str("digraph argument {\n");
    out.push_str("  graph [rankdir=BT];\n");
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    let mut argument_no = 0;
    for (i, model) in models.iter().enumerate() {
        let (cluster, title) = match model.panel {
            PanelKind::Argument => {
                argument_no += 1;
                (format!("cluster_{i}"), format!("Argument {argument_no}"))
            }
            PanelKind::Isolated => ("cluster_isolated".to_string(), "Isolated propositions".to_string()),
        };
        let _ = writeln!(out, "  subgraph {cluster} {{");
        let _ = writeln!(out, "    label={};", quote(&title));
        if model.panel == PanelKind::Isolated {
            out.push_str("    style=dashed;\n");
        }
        for shape in &model.shapes {
            let attrs = match shape.kind {
                ShapeKind::Rect => format!("shape=box, label={}", quote(&shape.label)),
                ShapeKind::SolidCircle => {
                    "shape=circle, style=filled, fillcolor=black, label=\"\", width=0.25, fixedsize=true".to_string()
                }
                ShapeKind::HollowCircle => "shape=circle, label=\"\", width=0.25, fixedsize=true".to_string(),
                ShapeKind::PlusCircle => "shape=circle, label=\"+\", width=0.3, fixedsize=true".to_string(),
            };
            let _ = writeln!(out, "    {} [{attrs}];", quote(&shape.name));
        }
        for link in &model.links {
            let from = quote(&model.shapes[link.from].name);
            let to = quote(&model.shapes[link.to].name);
            if link.arrowed {
                let _ = writeln!(out, "    {from} -> {to};");
            } else {
                let _ = writeln!(out, "    {from} -> {to} [dir=none];");
            }
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}
