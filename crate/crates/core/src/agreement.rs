//! Comparison of two independent annotations of the same judgment:
//! span alignment, Cohen's kappa over proposition types, relation
//! precision/recall, and a classified list of disagreements.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AnnotationDocument, PropId, Proposition, Span};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum AgreementError {
    #[error("the two documents annotate different scope texts")]
    ScopeMismatch,
    #[error("document {side:?}: {id} has no span")]
    MissingSpans { side: Side, id: PropId },
    #[error("no aligned propositions")]
    EmptyAlignment,
    #[error("kappa is undefined: both annotators used a single identical label throughout")]
    DegenerateMarginals,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub a: PropId,
    pub b: PropId,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub pairs: Vec<AlignedPair>,
    pub unmatched_a: Vec<PropId>,
    pub unmatched_b: Vec<PropId>,
}

impl Alignment {
    /// B id → A id.
    pub fn b_to_a(&self) -> BTreeMap<PropId, PropId> {
        self.pairs.iter().map(|p| (p.b, p.a)).collect()
    }

    pub fn mean_overlap(&self) -> f64 {
        if self.pairs.is_empty() {
            return 0.0;
        }
        self.pairs.iter().map(|p| p.overlap).sum::<f64>() / self.pairs.len() as f64
    }
}

fn spans(doc: &AnnotationDocument, side: Side) -> Result<Vec<(PropId, Span)>, AgreementError> {
    doc.propositions
        .iter()
        .map(|p| p.span.map(|s| (p.id, s)).ok_or(AgreementError::MissingSpans { side, id: p.id }))
        .collect()
}

/// Greedy one-to-one alignment by descending Jaccard overlap of spans.
/// Ties go to the smaller A id, then the smaller B id. Pairs with no
/// overlap or overlap below `threshold` are never formed.
pub fn align_propositions(
    a: &AnnotationDocument,
    b: &AnnotationDocument,
    threshold: f64,
) -> Result<Alignment, AgreementError> {
    if a.scope_text != b.scope_text {
        return Err(AgreementError::ScopeMismatch);
    }
    let spans_a = spans(a, Side::A)?;
    let spans_b = spans(b, Side::B)?;
    let mut candidates = Vec::new();
    for (ia, sa) in &spans_a {
        for (ib, sb) in &spans_b {
            let overlap = sa.jaccard(sb);
            if overlap > 0.0 && overlap >= threshold {
                candidates.push(AlignedPair { a: *ia, b: *ib, overlap });
            }
        }
    }
    candidates.sort_by(|x, y| y.overlap.total_cmp(&x.overlap).then(x.a.cmp(&y.a)).then(x.b.cmp(&y.b)));
    let mut used_a = BTreeSet::new();
    let mut used_b = BTreeSet::new();
    let mut pairs = Vec::new();
    for c in candidates {
        if used_a.contains(&c.a) || used_b.contains(&c.b) {
            continue;
        }
        used_a.insert(c.a);
        used_b.insert(c.b);
        pairs.push(c);
    }
    pairs.sort_by_key(|p| (p.a, p.b));
    let unmatched = |spans: &[(PropId, Span)], used: &BTreeSet<PropId>| {
        let mut ids: Vec<PropId> = spans.iter().map(|(id, _)| *id).filter(|id| !used.contains(id)).collect();
        ids.sort();
        ids
    };
    Ok(Alignment {
        unmatched_a: unmatched(&spans_a, &used_a),
        unmatched_b: unmatched(&spans_b, &used_b),
        pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Granularity {
    /// The four base types.
    Base,
    /// The nine concrete labels, GM split by subtype.
    Full,
}

/// Cohen's kappa over paired labels.
pub fn cohen_kappa<L: Ord + Eq + Hash + Clone>(pairs: &[(L, L)]) -> Result<f64, AgreementError> {
    if pairs.is_empty() {
        return Err(AgreementError::EmptyAlignment);
    }
    let n = pairs.len();
    let mut marginals: BTreeMap<L, (usize, usize)> = BTreeMap::new();
    let mut agree = 0usize;
    for (x, y) in pairs {
        marginals.entry(x.clone()).or_default().0 += 1;
        marginals.entry(y.clone()).or_default().1 += 1;
        if x == y {
            agree += 1;
        }
    }
    if marginals.values().any(|&(ca, cb)| ca == n && cb == n) {
        return Err(AgreementError::DegenerateMarginals);
    }
    if agree == n {
        return Ok(1.0);
    }
    let nf = n as f64;
    let observed = agree as f64 / nf;
    let expected: f64 = marginals.values().map(|&(ca, cb)| (ca as f64 / nf) * (cb as f64 / nf)).sum();
    Ok((observed - expected) / (1.0 - expected))
}

fn prop_map(doc: &AnnotationDocument) -> BTreeMap<PropId, &Proposition> {
    doc.propositions.iter().map(|p| (p.id, p)).collect()
}

/// Kappa over the type labels of aligned propositions.
pub fn type_kappa(
    a: &AnnotationDocument,
    b: &AnnotationDocument,
    alignment: &Alignment,
    granularity: Granularity,
) -> Result<f64, AgreementError> {
    let (pa, pb) = (prop_map(a), prop_map(b));
    let labels: Vec<_> = alignment
        .pairs
        .iter()
        .filter_map(|p| Some((pa.get(&p.a)?.ptype, pb.get(&p.b)?.ptype)))
        .collect();
    match granularity {
        Granularity::Full => cohen_kappa(&labels),
        Granularity::Base => cohen_kappa(&labels.iter().map(|(x, y)| (x.base, y.base)).collect::<Vec<_>>()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Canonical strings of A's relations, and of B's relations rewritten into
/// A's ids (`None` when a relation touches an unaligned proposition).
fn relation_sets(
    a: &AnnotationDocument,
    b: &AnnotationDocument,
    alignment: &Alignment,
) -> (BTreeSet<String>, Vec<(String, Option<String>)>) {
    let set_a: BTreeSet<String> = a.relations.iter().map(|r| r.to_string()).collect();
    let to_a = alignment.b_to_a();
    let mut seen = BTreeSet::new();
    let mapped_b = b
        .relations
        .iter()
        .filter(|r| seen.insert(r.to_string()))
        .map(|r| {
            let mapped = r
                .prop_ids()
                .iter()
                .all(|id| to_a.contains_key(id))
                .then(|| r.map_ids(&|id| to_a[&id]).to_string());
            (r.to_string(), mapped)
        })
        .collect();
    (set_a, mapped_b)
}

/// Relation precision and recall of B against A, comparing canonical
/// expressions as sets after mapping B's ids through the alignment.
/// Two empty relation lists agree perfectly; otherwise an empty side
/// scores 0.
pub fn relation_f1(a: &AnnotationDocument, b: &AnnotationDocument, alignment: &Alignment) -> RelationScores {
    let (set_a, mapped_b) = relation_sets(a, b, alignment);
    let mapped: BTreeSet<&String> = mapped_b.iter().filter_map(|(_, m)| m.as_ref()).collect();
    let shared = set_a.iter().filter(|s| mapped.contains(s)).count() as f64;
    if set_a.is_empty() && mapped_b.is_empty() {
        return RelationScores { precision: 1.0, recall: 1.0, f1: 1.0 };
    }
    let ratio = |den: usize| if den == 0 { 0.0 } else { shared / den as f64 };
    let precision = ratio(mapped_b.len());
    let recall = ratio(set_a.len());
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    RelationScores { precision, recall, f1 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DisagreementCategory {
    Label,
    Boundary,
    RelationDirectionOrTarget,
}

impl fmt::Display for DisagreementCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub category: DisagreementCategory,
    /// Proposition id or relation notation on A's side, if any.
    pub a: Option<String>,
    /// Proposition id or relation notation on B's side, if any.
    pub b: Option<String>,
    pub detail: String,
}

/// Label, boundary and relation disagreements, in that order.
pub fn classify_disagreements(a: &AnnotationDocument, b: &AnnotationDocument, alignment: &Alignment) -> Vec<Disagreement> {
    use DisagreementCategory as C;
    let (pa, pb) = (prop_map(a), prop_map(b));
    let mut out = Vec::new();
    for p in &alignment.pairs {
        let (Some(x), Some(y)) = (pa.get(&p.a), pb.get(&p.b)) else {
            continue;
        };
        if x.ptype != y.ptype {
            out.push(Disagreement {
                category: C::Label,
                a: Some(p.a.to_string()),
                b: Some(p.b.to_string()),
                detail: format!("{} is {} in A but {} is {} in B", p.a, x.ptype, p.b, y.ptype),
            });
        }
    }
    for p in &alignment.pairs {
        if p.overlap < 1.0 {
            out.push(Disagreement {
                category: C::Boundary,
                a: Some(p.a.to_string()),
                b: Some(p.b.to_string()),
                detail: format!("{} and {} overlap {:.3}", p.a, p.b, p.overlap),
            });
        }
    }
    for id in &alignment.unmatched_a {
        out.push(Disagreement {
            category: C::Boundary,
            a: Some(id.to_string()),
            b: None,
            detail: format!("{id} in A has no counterpart in B"),
        });
    }
    for id in &alignment.unmatched_b {
        out.push(Disagreement {
            category: C::Boundary,
            a: None,
            b: Some(id.to_string()),
            detail: format!("{id} in B has no counterpart in A"),
        });
    }
    let (set_a, mapped_b) = relation_sets(a, b, alignment);
    let mapped: BTreeSet<&String> = mapped_b.iter().filter_map(|(_, m)| m.as_ref()).collect();
    for rel in set_a.iter().filter(|s| !mapped.contains(s)) {
        out.push(Disagreement {
            category: C::RelationDirectionOrTarget,
            a: Some(rel.clone()),
            b: None,
            detail: format!("{rel} only in A"),
        });
    }
    for (original, m) in &mapped_b {
        if m.as_ref().is_none_or(|m| !set_a.contains(m)) {
            out.push(Disagreement {
                category: C::RelationDirectionOrTarget,
                a: None,
                b: Some(original.clone()),
                detail: match m {
                    Some(m) if m != original => format!("{original} only in B (as {m} in A's numbering)"),
                    Some(_) => format!("{original} only in B"),
                    None => format!("{original} only in B (touches unaligned propositions)"),
                },
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub doc_id: String,
    pub annotator_a: String,
    pub annotator_b: String,
    pub threshold: f64,
    pub alignment: Alignment,
    /// `None` when kappa is undefined (degenerate marginals).
    pub base_type_kappa: Option<f64>,
    pub subtype_kappa: Option<f64>,
    pub relation_precision: f64,
    pub relation_recall: f64,
    pub relation_f1: f64,
    pub boundary_mean_overlap: f64,
    pub disagreements: Vec<Disagreement>,
}

/// Full comparison of two annotations of one judgment.
pub fn compare_documents(
    a: &AnnotationDocument,
    b: &AnnotationDocument,
    threshold: f64,
) -> Result<AgreementReport, AgreementError> {
    let alignment = align_propositions(a, b, threshold)?;
    let kappa = |g| match type_kappa(a, b, &alignment, g) {
        Ok(k) => Ok(Some(k)),
        Err(AgreementError::DegenerateMarginals | AgreementError::EmptyAlignment) => Ok(None),
        Err(e) => Err(e),
    };
    let base_type_kappa = kappa(Granularity::Base)?;
    let subtype_kappa = kappa(Granularity::Full)?;
    let scores = relation_f1(a, b, &alignment);
    Ok(AgreementReport {
        doc_id: a.doc_id.clone(),
        annotator_a: a.annotator_id.clone(),
        annotator_b: b.annotator_id.clone(),
        threshold,
        base_type_kappa,
        subtype_kappa,
        relation_precision: scores.precision,
        relation_recall: scores.recall,
        relation_f1: scores.f1,
        boundary_mean_overlap: alignment.mean_overlap(),
        disagreements: classify_disagreements(a, b, &alignment),
        alignment,
    })
}
