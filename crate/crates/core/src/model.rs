//! Shared domain types: propositions, their types, relation expressions,
//! case metadata and annotation documents.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a proposition within one document. Rendered as `p<id>`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PropId(pub u32);

impl fmt::Display for PropId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// The four basic judgment types, crossing particular/general with fact/norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseType {
    SF,
    GF,
    SM,
    GM,
}

impl BaseType {
    pub const ALL: [BaseType; 4] = [BaseType::SF, BaseType::GF, BaseType::SM, BaseType::GM];

    pub fn code(self) -> &'static str {
        match self {
            BaseType::SF => "SF",
            BaseType::GF => "GF",
            BaseType::SM => "SM",
            BaseType::GM => "GM",
        }
    }

    /// SF and SM: judgments about the particular case.
    pub fn is_particular(self) -> bool {
        matches!(self, BaseType::SF | BaseType::SM)
    }

    /// GF and GM.
    pub fn is_general(self) -> bool {
        !self.is_particular()
    }
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Source-based refinement of general normative judgments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GmSubtype {
    /// Statutory provisions.
    L,
    /// Legal interpretation.
    I,
    /// Contracts and contract interpretation.
    C,
    /// Customs and industry practices.
    U,
    /// Morality and value principles.
    M,
    /// Other normative judgments.
    O,
}

impl GmSubtype {
    pub const ALL: [GmSubtype; 6] = [
        GmSubtype::L,
        GmSubtype::I,
        GmSubtype::C,
        GmSubtype::U,
        GmSubtype::M,
        GmSubtype::O,
    ];

    pub fn code(self) -> char {
        match self {
            GmSubtype::L => 'L',
            GmSubtype::I => 'I',
            GmSubtype::C => 'C',
            GmSubtype::U => 'U',
            GmSubtype::M => 'M',
            GmSubtype::O => 'O',
        }
    }
}

/// A proposition type. The fields are public so that a malformed value
/// (GM without subtype, subtype on a non-GM base) can be represented and
/// reported by validation; use [`PropositionType::new`] to construct
/// checked values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropositionType {
    pub base: BaseType,
    pub gm_subtype: Option<GmSubtype>,
}

impl PropositionType {
    pub const SF: PropositionType = PropositionType::plain(BaseType::SF);
    pub const GF: PropositionType = PropositionType::plain(BaseType::GF);
    pub const SM: PropositionType = PropositionType::plain(BaseType::SM);

    const fn plain(base: BaseType) -> Self {
        PropositionType {
            base,
            gm_subtype: None,
        }
    }

    pub const fn gm(subtype: GmSubtype) -> Self {
        PropositionType {
            base: BaseType::GM,
            gm_subtype: Some(subtype),
        }
    }

    pub fn new(base: BaseType, gm_subtype: Option<GmSubtype>) -> Result<Self, ModelError> {
        let t = PropositionType { base, gm_subtype };
        t.check()?;
        Ok(t)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        match (self.base, self.gm_subtype) {
            (BaseType::GM, None) => Err(ModelError::GmSubtypeMissing),
            (base, Some(_)) if base != BaseType::GM => Err(ModelError::GmSubtypeOnNonGm(base)),
            _ => Ok(()),
        }
    }

    /// The nine concrete labels, in a fixed order.
    pub fn all_concrete() -> Vec<PropositionType> {
        let mut out = vec![Self::SF, Self::GF, Self::SM];
        out.extend(GmSubtype::ALL.iter().map(|s| Self::gm(*s)));
        out
    }
}

impl fmt::Display for PropositionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base.code())?;
        if let Some(sub) = self.gm_subtype {
            write!(f, "-{}", sub.code())?;
        }
        Ok(())
    }
}

/// Parses the type codes used in files: `SF`, `GF`, `SM`, `GM-L` … `GM-O`.
/// A bare `GM` parses into the unchecked value `GM` without subtype so that
/// the missing subtype can be reported as an invariant violation.
impl FromStr for PropositionType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (base, sub) = match s.split_once('-') {
            Some((b, sub)) => (b, Some(sub)),
            None => (s, None),
        };
        let base = match base {
            "SF" => BaseType::SF,
            "GF" => BaseType::GF,
            "SM" => BaseType::SM,
            "GM" => BaseType::GM,
            _ => return Err(ModelError::UnknownTypeCode(s.to_string())),
        };
        let gm_subtype = match sub {
            None => None,
            Some("L") => Some(GmSubtype::L),
            Some("I") => Some(GmSubtype::I),
            Some("C") => Some(GmSubtype::C),
            Some("U") => Some(GmSubtype::U),
            Some("M") => Some(GmSubtype::M),
            Some("O") => Some(GmSubtype::O),
            Some(_) => return Err(ModelError::UnknownTypeCode(s.to_string())),
        };
        Ok(PropositionType { base, gm_subtype })
    }
}

/// Half-open character range `[start, end)` into a document's scope text.
/// Offsets count Unicode scalar values, not bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Jaccard overlap of the two character sets.
    pub fn jaccard(&self, other: &Span) -> f64 {
        let inter = self.end.min(other.end).saturating_sub(self.start.max(other.start));
        let union = self.len() + other.len() - inter;
        if union == 0 {
            return 0.0;
        }
        inter as f64 / union as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proposition {
    pub id: PropId,
    pub text: String,
    pub span: Option<Span>,
    pub ptype: PropositionType,
}

/// A relation expression. Identity members are proposition ids only, so
/// the leaf-only rule for identity holds by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RelationExpr {
    Prop(PropId),
    Support(Box<RelationExpr>, Box<RelationExpr>),
    Attack(Box<RelationExpr>, Box<RelationExpr>),
    Joint(Vec<RelationExpr>),
    /// `Match(particular, general)`.
    Match(Box<RelationExpr>, Box<RelationExpr>),
    Identity(Vec<PropId>),
}

/// Discriminant of [`RelationExpr`] without payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExprKind {
    Prop,
    Support,
    Attack,
    Joint,
    Match,
    Identity,
}

impl ExprKind {
    pub fn letter(self) -> &'static str {
        match self {
            ExprKind::Prop => "p",
            ExprKind::Support => "S",
            ExprKind::Attack => "A",
            ExprKind::Joint => "J",
            ExprKind::Match => "M",
            ExprKind::Identity => "I",
        }
    }
}

impl fmt::Display for ExprKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ExprKind::Prop => "Proposition",
            ExprKind::Support => "Support",
            ExprKind::Attack => "Attack",
            ExprKind::Joint => "Joint",
            ExprKind::Match => "Match",
            ExprKind::Identity => "Identity",
        };
        f.write_str(name)
    }
}

impl RelationExpr {
    pub fn prop(id: u32) -> Self {
        RelationExpr::Prop(PropId(id))
    }

    pub fn support(source: RelationExpr, target: RelationExpr) -> Self {
        RelationExpr::Support(Box::new(source), Box::new(target))
    }

    pub fn attack(source: RelationExpr, target: RelationExpr) -> Self {
        RelationExpr::Attack(Box::new(source), Box::new(target))
    }

    pub fn joint(members: Vec<RelationExpr>) -> Self {
        RelationExpr::Joint(members)
    }

    pub fn matching(particular: RelationExpr, general: RelationExpr) -> Self {
        RelationExpr::Match(Box::new(particular), Box::new(general))
    }

    pub fn identity(members: impl IntoIterator<Item = u32>) -> Self {
        RelationExpr::Identity(members.into_iter().map(PropId).collect())
    }

    pub fn kind(&self) -> ExprKind {
        match self {
            RelationExpr::Prop(_) => ExprKind::Prop,
            RelationExpr::Support(..) => ExprKind::Support,
            RelationExpr::Attack(..) => ExprKind::Attack,
            RelationExpr::Joint(_) => ExprKind::Joint,
            RelationExpr::Match(..) => ExprKind::Match,
            RelationExpr::Identity(_) => ExprKind::Identity,
        }
    }

    /// Direct sub-expressions in slot order. Identity members are leaves
    /// and are not returned here.
    pub fn children(&self) -> Vec<&RelationExpr> {
        match self {
            RelationExpr::Prop(_) | RelationExpr::Identity(_) => Vec::new(),
            RelationExpr::Support(a, b) | RelationExpr::Attack(a, b) | RelationExpr::Match(a, b) => {
                vec![a.as_ref(), b.as_ref()]
            }
            RelationExpr::Joint(members) => members.iter().collect(),
        }
    }

    /// Proposition ids in first-occurrence order, without repeats.
    pub fn prop_ids(&self) -> Vec<PropId> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.visit_ids(&mut |id| {
            if seen.insert(id) {
                out.push(id);
            }
        });
        out
    }

    fn visit_ids(&self, f: &mut impl FnMut(PropId)) {
        match self {
            RelationExpr::Prop(id) => f(*id),
            RelationExpr::Identity(ids) => ids.iter().copied().for_each(f),
            _ => {
                for child in self.children() {
                    child.visit_ids(f);
                }
            }
        }
    }

    /// Nesting depth; a bare proposition has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            RelationExpr::Prop(_) => 0,
            RelationExpr::Identity(_) => 1,
            _ => 1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }

    /// Applies `f` to every proposition id in the tree.
    pub fn map_ids(&self, f: &impl Fn(PropId) -> PropId) -> RelationExpr {
        match self {
            RelationExpr::Prop(id) => RelationExpr::Prop(f(*id)),
            RelationExpr::Identity(ids) => RelationExpr::Identity(ids.iter().map(|i| f(*i)).collect()),
            RelationExpr::Support(a, b) => RelationExpr::support(a.map_ids(f), b.map_ids(f)),
            RelationExpr::Attack(a, b) => RelationExpr::attack(a.map_ids(f), b.map_ids(f)),
            RelationExpr::Match(a, b) => RelationExpr::matching(a.map_ids(f), b.map_ids(f)),
            RelationExpr::Joint(m) => RelationExpr::Joint(m.iter().map(|c| c.map_ids(f)).collect()),
        }
    }

    /// Structural invariants of a single expression: Joint and Identity
    /// need at least two members.
    pub fn check_invariants(&self) -> Result<(), ModelError> {
        match self {
            RelationExpr::Joint(m) if m.len() < 2 => Err(ModelError::ArityFloor(ExprKind::Joint, m.len())),
            RelationExpr::Identity(m) if m.len() < 2 => {
                Err(ModelError::ArityFloor(ExprKind::Identity, m.len()))
            }
            _ => self.children().iter().try_for_each(|c| c.check_invariants()),
        }
    }
}

/// Shorthand for [`RelationExpr::prop_ids`].
pub fn prop_ids_of(expr: &RelationExpr) -> Vec<PropId> {
    expr.prop_ids()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CourtLevel {
    Basic,
    Intermediate,
    Higher,
    Supreme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrialLevel {
    First,
    Second,
    Retrial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseCategory {
    Civil,
    Criminal,
    Administrative,
    Enforcement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeType {
    FullyUpheld,
    PartiallyUpheld,
    Dismissed,
}

/// Case information annotated per source kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CaseMetadata {
    OriginalJudgment {
        case_number: String,
        court: String,
        court_level: CourtLevel,
        trial_level: TrialLevel,
        #[serde(with = "crate::dates")]
        judgment_date: NaiveDate,
        case_category: CaseCategory,
        cause_of_action: String,
        outcome_type: OutcomeType,
    },
    GuidingCase {
        case_type: String,
        case_name: String,
        #[serde(with = "crate::dates")]
        release_date: NaiveDate,
        case_category: CaseCategory,
        relevant_provisions: String,
        highlights: String,
    },
    ReferenceCase {
        case_type: String,
        case_name: String,
        db_entry_number: String,
        case_category: CaseCategory,
        relevant_provisions: String,
        highlights: String,
    },
}

/// One annotator's complete annotation of one judgment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationDocument {
    pub doc_id: String,
    pub annotator_id: String,
    pub guideline_version: String,
    pub metadata: CaseMetadata,
    /// The reasoning section the propositions are drawn from.
    pub scope_text: String,
    pub propositions: Vec<Proposition>,
    pub relations: Vec<RelationExpr>,
}

impl AnnotationDocument {
    pub fn resolve_prop(&self, id: PropId) -> Result<&Proposition, ModelError> {
        self.propositions
            .iter()
            .find(|p| p.id == id)
            .ok_or(ModelError::UnknownProposition(id))
    }

    pub fn prop_ids(&self) -> BTreeSet<PropId> {
        self.propositions.iter().map(|p| p.id).collect()
    }

    /// Rejects any value that breaks a model invariant. Returns the first
    /// violation found, checking propositions before relations.
    pub fn check_invariants(&self) -> Result<(), ModelError> {
        let scope_len = self.scope_text.chars().count();
        let mut seen = BTreeSet::new();
        for p in &self.propositions {
            if p.id.0 == 0 {
                return Err(ModelError::ZeroId);
            }
            if !seen.insert(p.id) {
                return Err(ModelError::DuplicatePropId(p.id));
            }
            if p.text.is_empty() {
                return Err(ModelError::EmptyText(p.id));
            }
            if let Some(span) = p.span {
                if span.start >= span.end || span.end > scope_len {
                    return Err(ModelError::BadSpan {
                        id: p.id,
                        start: span.start,
                        end: span.end,
                        scope_len,
                    });
                }
            }
            p.ptype.check().map_err(|e| e.at(p.id))?;
        }
        for (index, rel) in self.relations.iter().enumerate() {
            rel.check_invariants()?;
            if let Some(missing) = rel.prop_ids().into_iter().find(|id| !seen.contains(id)) {
                return Err(ModelError::DanglingPropRef { relation: index, id: missing });
            }
        }
        Ok(())
    }
}

/// Free-function form of [`AnnotationDocument::resolve_prop`].
pub fn resolve_prop(doc: &AnnotationDocument, id: PropId) -> Result<&Proposition, ModelError> {
    doc.resolve_prop(id)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown proposition {0}")]
    UnknownProposition(PropId),
    #[error("unknown proposition type code {0:?}")]
    UnknownTypeCode(String),
    #[error("GM proposition has no subtype")]
    GmSubtypeMissing,
    #[error("{0} has no subtype but got one")]
    GmSubtypeOnNonGm(BaseType),
    #[error("{id}: {source}")]
    OnProposition { id: PropId, source: Box<ModelError> },
    #[error("proposition ids must be positive")]
    ZeroId,
    #[error("duplicate proposition id {0}")]
    DuplicatePropId(PropId),
    #[error("{0} has empty text")]
    EmptyText(PropId),
    #[error("{id} span [{start},{end}) is empty or outside the scope text ({scope_len} chars)")]
    BadSpan {
        id: PropId,
        start: usize,
        end: usize,
        scope_len: usize,
    },
    #[error("{0} needs at least two members, got {1}")]
    ArityFloor(ExprKind, usize),
    #[error("relation {relation} refers to unknown proposition {id}")]
    DanglingPropRef { relation: usize, id: PropId },
}

impl ModelError {
    fn at(self, id: PropId) -> ModelError {
        ModelError::OnProposition { id, source: Box::new(self) }
    }

    /// The innermost error, with any proposition context stripped.
    pub fn root(&self) -> &ModelError {
        match self {
            ModelError::OnProposition { source, .. } => source.root(),
            other => other,
        }
    }
}
