//! Proptest generators for expressions and documents.

use argnota_core::model::{
    AnnotationDocument, CaseCategory, CaseMetadata, GmSubtype, PropId, Proposition, PropositionType, RelationExpr, Span,
};
use argnota_core::validation::{validate_document, ValidationMode};
use proptest::prelude::*;

pub const PROPS: u32 = 12;

/// Trees of depth at most 6 with at most 5 members per joint/identity.
pub fn expr(max_id: u32) -> impl Strategy<Value = RelationExpr> {
    let leaf = (1..=max_id).prop_map(RelationExpr::prop);
    leaf.prop_recursive(6, 96, 5, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RelationExpr::support(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RelationExpr::attack(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RelationExpr::matching(a, b)),
            prop::collection::vec(inner, 2..=5).prop_map(RelationExpr::Joint),
            prop::collection::vec(1..=max_id, 2..=5).prop_map(|ids| RelationExpr::Identity(ids.into_iter().map(PropId).collect())),
        ]
    })
}

pub fn ptype() -> impl Strategy<Value = PropositionType> {
    prop::sample::select(PropositionType::all_concrete())
}

pub fn metadata() -> CaseMetadata {
    CaseMetadata::GuidingCase {
        case_type: "Guiding Case".into(),
        case_name: "generated".into(),
        release_date: chrono::NaiveDate::from_ymd_opt(2011, 12, 20).unwrap(),
        case_category: CaseCategory::Civil,
        relevant_provisions: "Article 424".into(),
        highlights: "none".into(),
    }
}

/// A document over `PROPS` propositions with disjoint spans, keeping only
/// the relations that raise no error in `mode`.
pub fn document(mode: ValidationMode) -> impl Strategy<Value = AnnotationDocument> {
    (
        prop::collection::vec(ptype(), PROPS as usize),
        prop::collection::vec(expr(PROPS), 0..8),
    )
        .prop_map(move |(types, relations)| {
            let scope_text = "判".repeat(PROPS as usize * 10);
            let mut doc = AnnotationDocument {
                doc_id: "gen".into(),
                annotator_id: "a".into(),
                guideline_version: "1.0".into(),
                metadata: metadata(),
                scope_text,
                propositions: types
                    .into_iter()
                    .enumerate()
                    .map(|(i, ptype)| Proposition {
                        id: PropId(i as u32 + 1),
                        text: format!("命题 {}", i + 1),
                        span: Some(Span::new(i * 10, i * 10 + 6)),
                        ptype,
                    })
                    .collect(),
                relations: Vec::new(),
            };
            for rel in relations {
                doc.relations.push(rel);
                if validate_document(&doc, mode).iter().any(|d| d.is_error()) {
                    doc.relations.pop();
                }
            }
            doc
        })
}

#[allow(dead_code)]
pub fn gm_l() -> PropositionType {
    PropositionType::gm(GmSubtype::L)
}
