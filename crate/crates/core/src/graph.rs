//! Logical argument graphs built from annotation documents.
//!
//! Every support, attack and match occurrence becomes a relation node, as
//! does every joint that is not the particular slot of a match (that joint
//! and its match share one node). Identical sub-expressions share a node,
//! so a relation listed on its own and again nested inside a larger one is
//! drawn once. Identity relations add no node; they only group
//! propositions into identity classes.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AnnotationDocument, PropId, RelationExpr};
use crate::validation::{has_errors, validate_document, Diagnostic, ValidationMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeRef {
    Prop(PropId),
    Rel(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationKind {
    Support,
    Attack,
    Joint,
    Match,
}

/// Address of a sub-expression: relation index plus child-index path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExprPath {
    pub relation: usize,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationNode {
    pub kind: RelationKind,
    /// First occurrence of this node's expression in the document.
    pub expr_path: ExprPath,
    /// Canonical notation of the expression.
    pub key: String,
    /// Whether the expression occurs as a whole entry of the relation list.
    pub top_level: bool,
    /// A match whose particular slot is a joint, drawn as one "+" node.
    pub absorbed_joint: bool,
    /// Propositions inside the expression, first-occurrence order.
    pub props: Vec<PropId>,
}

impl RelationNode {
    pub fn min_prop(&self) -> Option<PropId> {
        self.props.iter().min().copied()
    }
}

/// Argument position an edge connects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkRole {
    /// Source unit into a support/attack node.
    Source,
    /// Support/attack node to its target.
    Target,
    /// Joint member (undirected; stored member → node).
    Member,
    /// Particular unit into a match node.
    Particular,
    /// Match node to its general judgment.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeRef,
    pub to: NodeRef,
    pub directed: bool,
    pub role: LinkRole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentGraph {
    pub prop_nodes: BTreeSet<PropId>,
    pub relation_nodes: Vec<RelationNode>,
    pub edges: Vec<Edge>,
    /// Partition of all document propositions; each class sorted, classes
    /// ordered by representative (the minimum id).
    pub identity_classes: Vec<Vec<PropId>>,
    /// Set once edges have been rewired to class representatives.
    pub merged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("document has {} error diagnostic(s)", .0.iter().filter(|d| d.is_error()).count())]
    InvalidDocument(Vec<Diagnostic>),
}

struct DisjointSet {
    parent: BTreeMap<PropId, PropId>,
}

impl DisjointSet {
    fn new(ids: impl IntoIterator<Item = PropId>) -> Self {
        DisjointSet {
            parent: ids.into_iter().map(|i| (i, i)).collect(),
        }
    }

    fn find(&mut self, id: PropId) -> PropId {
        let parent = *self.parent.entry(id).or_insert(id);
        if parent == id {
            return id;
        }
        let root = self.find(parent);
        self.parent.insert(id, root);
        root
    }

    fn union(&mut self, a: PropId, b: PropId) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Keep the smaller id as root so the root is the representative.
        match ra.cmp(&rb) {
            std::cmp::Ordering::Less => {
                self.parent.insert(rb, ra);
            }
            std::cmp::Ordering::Greater => {
                self.parent.insert(ra, rb);
            }
            std::cmp::Ordering::Equal => {}
        }
    }

    fn classes(mut self) -> Vec<Vec<PropId>> {
        let ids: Vec<PropId> = self.parent.keys().copied().collect();
        let mut by_root: BTreeMap<PropId, Vec<PropId>> = BTreeMap::new();
        for id in ids {
            let root = self.find(id);
            by_root.entry(root).or_default().push(id);
        }
        by_root.into_values().collect()
    }
}

struct Builder {
    nodes: Vec<RelationNode>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
}

impl Builder {
    fn add(&mut self, expr: &RelationExpr, relation: usize, path: &mut Vec<usize>, top_level: bool) -> NodeRef {
        let kind = match expr {
            RelationExpr::Prop(id) => return NodeRef::Prop(*id),
            // A nested identity stands for its class.
            RelationExpr::Identity(ids) => {
                return NodeRef::Prop(ids.iter().min().copied().unwrap_or(PropId(0)));
            }
            RelationExpr::Support(..) => RelationKind::Support,
            RelationExpr::Attack(..) => RelationKind::Attack,
            RelationExpr::Joint(_) => RelationKind::Joint,
            RelationExpr::Match(..) => RelationKind::Match,
        };
        let key = expr.to_string();
        if let Some(&existing) = self.index.get(&key) {
            self.nodes[existing].top_level |= top_level;
            return NodeRef::Rel(existing);
        }
        let id = self.nodes.len();
        let absorbed_joint = matches!(expr, RelationExpr::Match(p, _) if matches!(**p, RelationExpr::Joint(_)));
        self.nodes.push(RelationNode {
            kind,
            expr_path: ExprPath { relation, path: path.clone() },
            key: key.clone(),
            top_level,
            absorbed_joint,
            props: expr.prop_ids(),
        });
        self.index.insert(key, id);
        let me = NodeRef::Rel(id);
        match expr {
            RelationExpr::Support(src, tgt) | RelationExpr::Attack(src, tgt) => {
                let s = self.add_at(src, relation, path, &[0]);
                let t = self.add_at(tgt, relation, path, &[1]);
                self.link(s, me, true, LinkRole::Source);
                self.link(me, t, true, LinkRole::Target);
            }
            RelationExpr::Match(particular, general) => {
                if let RelationExpr::Joint(members) = particular.as_ref() {
                    for (i, m) in members.iter().enumerate() {
                        let r = self.add_at(m, relation, path, &[0, i]);
                        self.link(r, me, false, LinkRole::Member);
                    }
                } else {
                    let p = self.add_at(particular, relation, path, &[0]);
                    self.link(p, me, true, LinkRole::Particular);
                }
                let g = self.add_at(general, relation, path, &[1]);
                self.link(me, g, true, LinkRole::General);
            }
            RelationExpr::Joint(members) => {
                for (i, m) in members.iter().enumerate() {
                    let r = self.add_at(m, relation, path, &[i]);
                    self.link(r, me, false, LinkRole::Member);
                }
            }
            RelationExpr::Prop(_) | RelationExpr::Identity(_) => unreachable!(),
        }
        me
    }

    fn add_at(&mut self, expr: &RelationExpr, relation: usize, path: &mut Vec<usize>, steps: &[usize]) -> NodeRef {
        path.extend_from_slice(steps);
        let r = self.add(expr, relation, path, false);
        path.truncate(path.len() - steps.len());
        r
    }

    fn link(&mut self, from: NodeRef, to: NodeRef, directed: bool, role: LinkRole) {
        self.edges.push(Edge { from, to, directed, role });
    }
}

/// Builds the logical graph. Fails if the document has error diagnostics
/// in permissive mode.
pub fn build_graph(doc: &AnnotationDocument) -> Result<ArgumentGraph, GraphError> {
    let diagnostics = validate_document(doc, ValidationMode::Permissive);
    if has_errors(&diagnostics) {
        return Err(GraphError::InvalidDocument(diagnostics));
    }
    let prop_nodes: BTreeSet<PropId> = doc.prop_ids();

    let mut sets = DisjointSet::new(prop_nodes.iter().copied());
    for rel in &doc.relations {
        crate::validation::walk(rel, &mut Vec::new(), &mut |node, _| {
            if let RelationExpr::Identity(ids) = node {
                for pair in ids.windows(2) {
                    sets.union(pair[0], pair[1]);
                }
            }
        });
    }

    // A joint listed on its own that is also the particular slot of some
    // match is the same "+" node as that match.
    let mut match_particulars = HashSet::new();
    for rel in &doc.relations {
        crate::validation::walk(rel, &mut Vec::new(), &mut |node, _| {
            if let RelationExpr::Match(p, _) = node {
                if matches!(**p, RelationExpr::Joint(_)) {
                    match_particulars.insert(p.to_string());
                }
            }
        });
    }

    let mut builder = Builder {
        nodes: Vec::new(),
        edges: Vec::new(),
        index: HashMap::new(),
    };
    for (i, rel) in doc.relations.iter().enumerate() {
        match rel {
            RelationExpr::Identity(_) => {}
            RelationExpr::Joint(_) if match_particulars.contains(&rel.to_string()) => {}
            _ => {
                builder.add(rel, i, &mut Vec::new(), true);
            }
        }
    }

    Ok(ArgumentGraph {
        prop_nodes,
        relation_nodes: builder.nodes,
        edges: builder.edges,
        identity_classes: sets.classes(),
        merged: false,
    })
}

impl ArgumentGraph {
    /// Map from every proposition to its class representative.
    pub fn representatives(&self) -> BTreeMap<PropId, PropId> {
        self.identity_classes
            .iter()
            .flat_map(|class| {
                let rep = class[0];
                class.iter().map(move |id| (*id, rep))
            })
            .collect()
    }

    /// The identity class containing `id`.
    pub fn class_of(&self, id: PropId) -> Option<&[PropId]> {
        self.identity_classes.iter().find(|c| c.contains(&id)).map(|c| c.as_slice())
    }

    /// Display label of a proposition node: `p1`, or `p1/p2` for a class.
    pub fn label(&self, id: PropId) -> String {
        match self.class_of(id) {
            Some(class) => class.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("/"),
            None => id.to_string(),
        }
    }

    pub fn nodes(&self) -> Vec<NodeRef> {
        self.prop_nodes
            .iter()
            .map(|p| NodeRef::Prop(*p))
            .chain((0..self.relation_nodes.len()).map(NodeRef::Rel))
            .collect()
    }

    fn edges_from(&self, node: NodeRef, role: LinkRole) -> impl Iterator<Item = NodeRef> + '_ {
        self.edges.iter().filter(move |e| e.from == node && e.role == role).map(|e| e.to)
    }

    fn edges_into(&self, node: NodeRef, role: LinkRole) -> impl Iterator<Item = NodeRef> + '_ {
        self.edges.iter().filter(move |e| e.to == node && e.role == role).map(|e| e.from)
    }

    /// Checks per-kind linkage: support, attack and plain match nodes have
    /// exactly one source-side and one target-side link; joints and
    /// absorbed-joint matches have at least two member links.
    pub fn check_arity(&self) -> Result<(), String> {
        for (i, node) in self.relation_nodes.iter().enumerate() {
            let me = NodeRef::Rel(i);
            let count = |role, incoming: bool| {
                if incoming {
                    self.edges_into(me, role).count()
                } else {
                    self.edges_from(me, role).count()
                }
            };
            let ok = match node.kind {
                RelationKind::Support | RelationKind::Attack => {
                    count(LinkRole::Source, true) == 1 && count(LinkRole::Target, false) == 1
                }
                RelationKind::Match if node.absorbed_joint => {
                    count(LinkRole::Member, true) >= 2 && count(LinkRole::General, false) == 1
                }
                RelationKind::Match => count(LinkRole::Particular, true) == 1 && count(LinkRole::General, false) == 1,
                RelationKind::Joint => count(LinkRole::Member, true) >= 2,
            };
            if !ok {
                return Err(format!("relation node {i} ({}) has wrong linkage", node.key));
            }
        }
        Ok(())
    }
}

/// Rewires every edge touching an identity-class member to the class
/// representative and drops non-representative proposition nodes.
pub fn merge_identities(g: &ArgumentGraph) -> ArgumentGraph {
    let reps = g.representatives();
    let rep = |id: PropId| reps.get(&id).copied().unwrap_or(id);
    let map_node = |n: NodeRef| match n {
        NodeRef::Prop(id) => NodeRef::Prop(rep(id)),
        other => other,
    };
    let relation_nodes = g
        .relation_nodes
        .iter()
        .map(|n| {
            let mut seen = BTreeSet::new();
            let props = n.props.iter().map(|p| rep(*p)).filter(|p| seen.insert(*p)).collect();
            RelationNode { props, ..n.clone() }
        })
        .collect();
    ArgumentGraph {
        prop_nodes: g.prop_nodes.iter().map(|p| rep(*p)).collect(),
        relation_nodes,
        edges: g
            .edges
            .iter()
            .map(|e| Edge {
                from: map_node(e.from),
                to: map_node(e.to),
                ..*e
            })
            .collect(),
        identity_classes: g.identity_classes.clone(),
        merged: true,
    }
}

/// A weakly connected part of the graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub props: Vec<PropId>,
    pub relations: Vec<usize>,
    /// A lone proposition node with no relation.
    pub isolated: bool,
}

/// Weakly connected components, ordered by smallest proposition id.
pub fn components(g: &ArgumentGraph) -> Vec<Component> {
    let nodes = g.nodes();
    let position: HashMap<NodeRef, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for e in &g.edges {
        let (Some(&a), Some(&b)) = (position.get(&e.from), position.get(&e.to)) else {
            continue;
        };
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Component> = BTreeMap::new();
    for (i, node) in nodes.iter().enumerate() {
        let root = find(&mut parent, i);
        let c = groups.entry(root).or_insert_with(|| Component {
            props: Vec::new(),
            relations: Vec::new(),
            isolated: false,
        });
        match node {
            NodeRef::Prop(p) => c.props.push(*p),
            NodeRef::Rel(r) => c.relations.push(*r),
        }
    }
    let mut out: Vec<Component> = groups
        .into_values()
        .map(|mut c| {
            c.isolated = c.relations.is_empty() && c.props.len() == 1;
            c
        })
        .collect();
    out.sort_by_key(|c| (c.props.first().copied(), c.relations.first().copied()));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Premise,
    SubConclusion,
    Conclusion,
    Isolated,
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleAssignment {
    pub roles: BTreeMap<PropId, Role>,
}

impl RoleAssignment {
    pub fn get(&self, id: PropId) -> Option<Role> {
        self.roles.get(&id).copied()
    }
}

/// Derives propositional roles from the relational structure.
///
/// A class *receives* when it is an ultimate target of a top-level support
/// or attack (targets that are relations are followed down to their own
/// targets). It *contributes* when it sits in a source, member, particular
/// or general slot of any relation. Receives only: Conclusion; both:
/// SubConclusion; contributes only: Premise; neither: Isolated. Every
/// member of an identity class gets the class role.
pub fn infer_roles(g: &ArgumentGraph) -> RoleAssignment {
    let reps = g.representatives();
    let rep = |id: PropId| reps.get(&id).copied().unwrap_or(id);

    let mut receives = BTreeSet::new();
    for (i, node) in g.relation_nodes.iter().enumerate() {
        if node.top_level && matches!(node.kind, RelationKind::Support | RelationKind::Attack) {
            for t in g.edges_from(NodeRef::Rel(i), LinkRole::Target) {
                ultimate_targets(g, t, &mut receives, &mut HashSet::new());
            }
        }
    }
    let receives: BTreeSet<PropId> = receives.into_iter().map(rep).collect();

    let mut contributes = BTreeSet::new();
    for e in &g.edges {
        let endpoint = match e.role {
            LinkRole::Source | LinkRole::Member | LinkRole::Particular => e.from,
            LinkRole::General => e.to,
            LinkRole::Target => continue,
        };
        if let NodeRef::Prop(p) = endpoint {
            contributes.insert(rep(p));
        }
    }

    let roles = reps
        .iter()
        .map(|(id, r)| {
            let role = match (receives.contains(r), contributes.contains(r)) {
                (true, false) => Role::Conclusion,
                (true, true) => Role::SubConclusion,
                (false, true) => Role::Premise,
                (false, false) => Role::Isolated,
            };
            (*id, role)
        })
        .collect();
    RoleAssignment { roles }
}

fn ultimate_targets(g: &ArgumentGraph, node: NodeRef, out: &mut BTreeSet<PropId>, seen: &mut HashSet<NodeRef>) {
    if !seen.insert(node) {
        return;
    }
    match node {
        NodeRef::Prop(p) => {
            out.insert(p);
        }
        NodeRef::Rel(i) => {
            let next: Vec<NodeRef> = match g.relation_nodes[i].kind {
                RelationKind::Support | RelationKind::Attack => g.edges_from(node, LinkRole::Target).collect(),
                RelationKind::Joint => g.edges_into(node, LinkRole::Member).collect(),
                RelationKind::Match => g
                    .edges_into(node, LinkRole::Member)
                    .chain(g.edges_into(node, LinkRole::Particular))
                    .chain(g.edges_from(node, LinkRole::General))
                    .collect(),
            };
            for n in next {
                ultimate_targets(g, n, out, seen);
            }
        }
    }
}
