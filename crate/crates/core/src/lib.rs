//! Toolkit for annotating legal argumentation structure: a proposition
//! type system, a recursive relation notation, document validation,
//! argument graphs with role inference, diagram rendering and
//! inter-annotator agreement.

pub mod agreement;
pub mod dates;
pub mod diagram;
pub mod graph;
pub mod model;
pub mod notation;
pub mod report;
pub mod stats;
pub mod storage;
pub mod validation;

pub use graph::{build_graph, components, infer_roles, merge_identities, ArgumentGraph, Role};
pub use model::{AnnotationDocument, PropId, Proposition, PropositionType, RelationExpr};
pub use notation::{parse_expr, parse_relation_list, serialize_expr, ParseDiagnostic};
pub use validation::{validate_document, Diagnostic, ValidationMode};
