//! Text renderings shared by the command line and the HTTP service, so
//! both produce identical bytes for identical inputs.

use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agreement::AgreementReport;
use crate::diagram::{emit_dot, emit_svg, layout};
use crate::graph::{build_graph, infer_roles, merge_identities, GraphError, RoleAssignment};
use crate::model::AnnotationDocument;
use crate::validation::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderFormat {
    Svg,
    Dot,
}

impl FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "svg" => Ok(RenderFormat::Svg),
            "dot" => Ok(RenderFormat::Dot),
            _ => Err(format!("unknown format {s:?} (expected svg or dot)")),
        }
    }
}

/// One diagnostic per line; empty when there are none.
pub fn diagnostics_text(diagnostics: &[Diagnostic]) -> String {
    diagnostics.iter().map(|d| format!("{d}\n")).collect()
}

pub fn document_roles(doc: &AnnotationDocument) -> Result<RoleAssignment, GraphError> {
    Ok(infer_roles(&merge_identities(&build_graph(doc)?)))
}

/// `p<id>\t<role>` per proposition, ascending id.
pub fn roles_text(roles: &RoleAssignment) -> String {
    roles.roles.iter().map(|(id, role)| format!("{id}\t{role}\n")).collect()
}

pub fn render_document(doc: &AnnotationDocument, format: RenderFormat) -> Result<String, GraphError> {
    let models = layout(&merge_identities(&build_graph(doc)?));
    Ok(match format {
        RenderFormat::Svg => emit_svg(&models),
        RenderFormat::Dot => emit_dot(&models),
    })
}

fn fmt_kappa(k: Option<f64>) -> String {
    match k {
        Some(k) => format!("{k:.6}"),
        None => "undefined".to_string(),
    }
}

/// Human-readable summary of an agreement report.
pub fn compare_text(report: &AgreementReport) -> String {
    let mut out = String::new();
    let a = &report.alignment;
    let _ = writeln!(
        out,
        "document {} (A: {}, B: {}), threshold {}",
        report.doc_id, report.annotator_a, report.annotator_b, report.threshold
    );
    let _ = writeln!(
        out,
        "aligned propositions\t{} (unmatched A: {}, unmatched B: {})",
        a.pairs.len(),
        a.unmatched_a.len(),
        a.unmatched_b.len()
    );
    let _ = writeln!(out, "mean boundary overlap\t{:.6}", report.boundary_mean_overlap);
    let _ = writeln!(out, "base type kappa\t{}", fmt_kappa(report.base_type_kappa));
    let _ = writeln!(out, "full type kappa\t{}", fmt_kappa(report.subtype_kappa));
    let _ = writeln!(out, "relation precision\t{:.6}", report.relation_precision);
    let _ = writeln!(out, "relation recall\t{:.6}", report.relation_recall);
    let _ = writeln!(out, "relation F1\t{:.6}", report.relation_f1);
    let _ = writeln!(out, "disagreements\t{}", report.disagreements.len());
    for d in &report.disagreements {
        let _ = writeln!(out, "  {}\t{}", d.category, d.detail);
    }
    out
}
