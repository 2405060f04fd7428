//! Structural and semantic checks over annotation documents.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    AnnotationDocument, BaseType, ExprKind, PropId, PropositionType, RelationExpr,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagnosticCode {
    DanglingPropRef,
    DuplicatePropId,
    MatchTypeViolation,
    IdentityTypeMixWarning,
    NonWhitelistedNesting,
    DuplicateRelation,
    JointArity,
    GmSubtypeMissing,
    GmSubtypeOnNonGm,
    SelfRelation,
}

impl DiagnosticCode {
    /// Each code has one fixed severity.
    pub fn severity(self) -> Severity {
        match self {
            DiagnosticCode::IdentityTypeMixWarning
            | DiagnosticCode::NonWhitelistedNesting
            | DiagnosticCode::DuplicateRelation => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locus {
    Relation(usize),
    Proposition(PropId),
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locus::Relation(i) => write!(f, "relation {i}"),
            Locus::Proposition(id) => write!(f, "{id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub locus: Locus,
    /// Child-index path to the offending sub-expression, empty when the
    /// diagnostic concerns the whole relation or a proposition.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub path: Vec<usize>,
    pub message: String,
}

impl Diagnostic {
    fn new(code: DiagnosticCode, locus: Locus, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: code.severity(),
            code,
            locus,
            path: Vec::new(),
            message: message.into(),
        }
    }

    fn at_path(mut self, path: &[usize]) -> Self {
        self.path = path.to_vec();
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}] {}", self.code, self.locus)?;
        if !self.path.is_empty() {
            let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            write!(f, " at /{}", path.join("/"))?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ValidationMode {
    #[default]
    Strict,
    Permissive,
}

impl std::str::FromStr for ValidationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(ValidationMode::Strict),
            "permissive" => Ok(ValidationMode::Permissive),
            _ => Err(format!("unknown validation mode {s:?}")),
        }
    }
}

/// Which slot of a match relation breaks the particular/general typing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchSlot {
    Particular,
    General,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchTypeViolation {
    pub slot: MatchSlot,
}

/// Named argument position of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    Source,
    Target,
    Member,
    Particular,
    General,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Slot::Source => "source",
            Slot::Target => "target",
            Slot::Member => "member",
            Slot::Particular => "particular",
            Slot::General => "general",
        };
        f.write_str(s)
    }
}

/// Slot names for the children returned by [`RelationExpr::children`].
pub fn child_slots(expr: &RelationExpr) -> Vec<Slot> {
    match expr {
        RelationExpr::Support(..) | RelationExpr::Attack(..) => vec![Slot::Source, Slot::Target],
        RelationExpr::Match(..) => vec![Slot::Particular, Slot::General],
        RelationExpr::Joint(m) => vec![Slot::Member; m.len()],
        RelationExpr::Prop(_) | RelationExpr::Identity(_) => Vec::new(),
    }
}

/// A parent/child embedding outside the catalogued nested forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestingFlag {
    pub path: Vec<usize>,
    pub parent: ExprKind,
    pub slot: Slot,
    pub child: ExprKind,
}

impl fmt::Display for NestingFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{} contains {}", self.parent, self.slot, self.child)
    }
}

fn whitelisted(parent: ExprKind, slot: Slot, child: ExprKind) -> bool {
    use ExprKind as K;
    matches!(
        (parent, slot, child),
        (_, _, K::Prop)
            | (K::Match, Slot::Particular, K::Joint)
            | (K::Joint, Slot::Member, K::Match)
            | (K::Support, Slot::Source, K::Joint)
            | (K::Support, Slot::Source, K::Match)
            | (K::Attack, Slot::Target, K::Support)
    )
}

/// Flags every parent/child embedding that is not one of the catalogued
/// forms. Multi-level nesting is accepted when each step is.
pub fn nesting_whitelist_check(expr: &RelationExpr) -> Vec<NestingFlag> {
    let mut out = Vec::new();
    walk(expr, &mut Vec::new(), &mut |node, path| {
        for ((i, child), slot) in node.children().into_iter().enumerate().zip(child_slots(node)) {
            if !whitelisted(node.kind(), slot, child.kind()) {
                let mut child_path = path.to_vec();
                child_path.push(i);
                out.push(NestingFlag {
                    path: child_path,
                    parent: node.kind(),
                    slot,
                    child: child.kind(),
                });
            }
        }
    });
    out
}

/// Pre-order walk passing each node with its child-index path.
pub(crate) fn walk<'a>(
    expr: &'a RelationExpr,
    path: &mut Vec<usize>,
    f: &mut impl FnMut(&'a RelationExpr, &[usize]),
) {
    f(expr, path);
    for (i, child) in expr.children().into_iter().enumerate() {
        path.push(i);
        walk(child, path, f);
        path.pop();
    }
}

fn is_particular_unit(expr: &RelationExpr, types: &BTreeMap<PropId, PropositionType>) -> bool {
    match expr {
        RelationExpr::Prop(id) => types.get(id).is_none_or(|t| t.base.is_particular()),
        RelationExpr::Joint(members) => members.iter().all(|m| is_particular_unit(m, types)),
        _ => false,
    }
}

fn is_general_unit(expr: &RelationExpr, types: &BTreeMap<PropId, PropositionType>) -> bool {
    match expr {
        RelationExpr::Prop(id) => types.get(id).is_none_or(|t| t.base.is_general()),
        _ => false,
    }
}

/// Checks one match relation: the particular slot holds an SF/SM
/// proposition or a joint of such units, the general slot a GF/GM
/// proposition. Ids missing from `types` are not held against the match.
pub fn check_match_types(
    particular: &RelationExpr,
    general: &RelationExpr,
    types: &BTreeMap<PropId, PropositionType>,
) -> Option<MatchTypeViolation> {
    let slot = match (is_particular_unit(particular, types), is_general_unit(general, types)) {
        (true, true) => return None,
        (false, true) => MatchSlot::Particular,
        (true, false) => MatchSlot::General,
        (false, false) => MatchSlot::Both,
    };
    Some(MatchTypeViolation { slot })
}

fn same_ids(a: &RelationExpr, b: &RelationExpr) -> bool {
    let a: BTreeSet<PropId> = a.prop_ids().into_iter().collect();
    let b: BTreeSet<PropId> = b.prop_ids().into_iter().collect();
    a == b
}

/// Returns every diagnostic for `doc`; an empty list means the document
/// conforms. Output order: propositions in stored order, then relations in
/// stored order with each tree walked pre-order.
pub fn validate_document(doc: &AnnotationDocument, mode: ValidationMode) -> Vec<Diagnostic> {
    use DiagnosticCode as C;
    let strict = mode == ValidationMode::Strict;
    let mut out = Vec::new();

    let mut types = BTreeMap::new();
    for p in &doc.propositions {
        let locus = Locus::Proposition(p.id);
        if let std::collections::btree_map::Entry::Vacant(slot) = types.entry(p.id) {
            slot.insert(p.ptype);
        } else {
            out.push(Diagnostic::new(C::DuplicatePropId, locus, format!("{} is defined more than once", p.id)));
        }
        match (p.ptype.base, p.ptype.gm_subtype) {
            (BaseType::GM, None) => out.push(Diagnostic::new(
                C::GmSubtypeMissing,
                locus,
                format!("{} is GM but has no subtype (L, I, C, U, M or O)", p.id),
            )),
            (base, Some(sub)) if base != BaseType::GM => out.push(Diagnostic::new(
                C::GmSubtypeOnNonGm,
                locus,
                format!("{} is {} but carries GM subtype {}", p.id, base.code(), sub.code()),
            )),
            _ => {}
        }
    }

    let mut seen_relations = HashSet::new();
    for (index, rel) in doc.relations.iter().enumerate() {
        let locus = Locus::Relation(index);
        for id in rel.prop_ids() {
            if !types.contains_key(&id) {
                out.push(Diagnostic::new(C::DanglingPropRef, locus, format!("{id} is not a proposition of this document")));
            }
        }
        let canonical = rel.to_string();
        let mut per_node = Vec::new();
        walk(rel, &mut Vec::new(), &mut |node, path| {
            match node {
                RelationExpr::Joint(m) if m.len() < 2 => per_node.push(
                    Diagnostic::new(C::JointArity, locus, format!("joint has {} member(s), needs at least 2", m.len()))
                        .at_path(path),
                ),
                RelationExpr::Identity(m) if m.len() < 2 => per_node.push(
                    Diagnostic::new(C::JointArity, locus, format!("identity has {} member(s), needs at least 2", m.len()))
                        .at_path(path),
                ),
                RelationExpr::Support(a, b) | RelationExpr::Attack(a, b) | RelationExpr::Match(a, b)
                    if same_ids(a, b) =>
                {
                    per_node.push(
                        Diagnostic::new(C::SelfRelation, locus, format!("{node} relates a unit to itself")).at_path(path),
                    )
                }
                _ => {}
            }
            if strict {
                if let RelationExpr::Match(particular, general) = node {
                    if let Some(v) = check_match_types(particular, general, &types) {
                        let what = match v.slot {
                            MatchSlot::Particular => "particular slot does not hold particular judgments (SF/SM)",
                            MatchSlot::General => "general slot does not hold a general judgment (GF/GM)",
                            MatchSlot::Both => "particular and general slots are both mistyped",
                        };
                        per_node.push(Diagnostic::new(C::MatchTypeViolation, locus, format!("{node}: {what}")).at_path(path));
                    }
                }
            }
            if let RelationExpr::Identity(members) = node {
                let bases: BTreeSet<BaseType> = members.iter().filter_map(|id| types.get(id)).map(|t| t.base).collect();
                if bases.len() > 1 {
                    let codes: Vec<&str> = bases.iter().map(|b| b.code()).collect();
                    per_node.push(
                        Diagnostic::new(
                            C::IdentityTypeMixWarning,
                            locus,
                            format!("identity members have different base types ({})", codes.join(", ")),
                        )
                        .at_path(path),
                    );
                }
            }
        });
        out.extend(per_node);
        if strict {
            for flag in nesting_whitelist_check(rel) {
                out.push(
                    Diagnostic::new(C::NonWhitelistedNesting, locus, format!("{flag} is not a catalogued nested form"))
                        .at_path(&flag.path),
                );
            }
        }
        if !seen_relations.insert(canonical.clone()) {
            out.push(Diagnostic::new(C::DuplicateRelation, locus, format!("{canonical} is annotated more than once")));
        }
    }
    out
}

/// True if any diagnostic is an error.
pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}
