//! Argument diagrams: layered layout per argument component, emitted as
//! SVG (the normative output) or DOT.
//!
//! Shape vocabulary: propositions are rectangles (an identity class shows
//! its members as `p1/p2`), support is a solid circle, attack a hollow
//! circle, joint and match a circle with "+". Joint member links carry no
//! arrow; every other link points from source to target.

mod dot;
mod svg;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use dot::emit_dot;
pub use svg::emit_svg;

use crate::graph::{components, merge_identities, ArgumentGraph, LinkRole, NodeRef, RelationKind};

/// Horizontal and vertical size of one layout cell.
pub const GRID_X: i64 = 120;
pub const GRID_Y: i64 = 80;

const RECT_W: i64 = 96;
const RECT_H: i64 = 40;
const CIRCLE_D: i64 = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShapeKind {
    Rect,
    SolidCircle,
    HollowCircle,
    PlusCircle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub node: NodeRef,
    /// Stable node name: `p4` for propositions, `rel_0` for relations.
    pub name: String,
    pub kind: ShapeKind,
    /// Relation kind behind a circle; `None` for rectangles.
    pub relation: Option<RelationKind>,
    pub label: String,
    pub layer: usize,
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

impl Shape {
    pub fn center(&self) -> (f64, f64) {
        (self.x as f64 + self.w as f64 / 2.0, self.y as f64 + self.h as f64 / 2.0)
    }

    pub fn overlaps(&self, other: &Shape) -> bool {
        self.x < other.x + other.w && other.x < self.x + self.w && self.y < other.y + other.h && other.y < self.y + self.h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    /// Index into the model's shapes.
    pub from: usize,
    pub to: usize,
    pub arrowed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PanelKind {
    Argument,
    /// Trailing panel collecting propositions that take part in no relation.
    Isolated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramModel {
    pub panel: PanelKind,
    pub shapes: Vec<Shape>,
    pub links: Vec<Link>,
    pub width: i64,
    pub height: i64,
}

impl DiagramModel {
    pub fn count(&self, kind: ShapeKind) -> usize {
        self.shapes.iter().filter(|s| s.kind == kind).count()
    }

    pub fn shape(&self, name: &str) -> Option<&Shape> {
        self.shapes.iter().find(|s| s.name == name)
    }
}

pub fn node_name(node: NodeRef) -> String {
    match node {
        NodeRef::Prop(p) => p.to_string(),
        NodeRef::Rel(i) => format!("rel_{i}"),
    }
}

fn shape_kind(kind: RelationKind) -> ShapeKind {
    match kind {
        RelationKind::Support => ShapeKind::SolidCircle,
        RelationKind::Attack => ShapeKind::HollowCircle,
        RelationKind::Joint | RelationKind::Match => ShapeKind::PlusCircle,
    }
}

/// Diagram links of the graph: every edge, except that a support fed by a
/// match starts at the match's general judgment instead of the "+" node.
fn diagram_links(g: &ArgumentGraph) -> Vec<(NodeRef, NodeRef, bool)> {
    let general_of: HashMap<NodeRef, NodeRef> = g
        .edges
        .iter()
        .filter(|e| e.role == LinkRole::General && matches!(e.to, NodeRef::Prop(_)))
        .map(|e| (e.from, e.to))
        .collect();
    g.edges
        .iter()
        .map(|e| {
            let mut from = e.from;
            if e.role == LinkRole::Source {
                if let (NodeRef::Rel(src), NodeRef::Rel(dst)) = (e.from, e.to) {
                    let feeds_support = g.relation_nodes[dst].kind == RelationKind::Support;
                    if feeds_support && g.relation_nodes[src].kind == RelationKind::Match {
                        if let Some(general) = general_of.get(&e.from) {
                            from = *general;
                        }
                    }
                }
            }
            (from, e.to, e.directed)
        })
        .collect()
}

/// Longest-path layering. Links are followed from source to target (joint
/// members point into the joint); back edges of cycles found by a
/// deterministic depth-first search are ignored.
fn assign_layers(nodes: &[NodeRef], links: &[(NodeRef, NodeRef, bool)]) -> BTreeMap<NodeRef, usize> {
    let mut succ: BTreeMap<NodeRef, Vec<NodeRef>> = nodes.iter().map(|n| (*n, Vec::new())).collect();
    for (a, b, _) in links {
        if let Some(list) = succ.get_mut(a) {
            list.push(*b);
        }
    }
    for list in succ.values_mut() {
        list.sort();
        list.dedup();
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }
    let mut mark: BTreeMap<NodeRef, Mark> = nodes.iter().map(|n| (*n, Mark::Fresh)).collect();
    let mut postorder = Vec::new();
    for &start in nodes {
        if mark[&start] != Mark::Fresh {
            continue;
        }
        // Iterative DFS: (node, next successor index).
        let mut stack = vec![(start, 0usize)];
        mark.insert(start, Mark::Active);
        while let Some((node, i)) = stack.pop() {
            let next = succ[&node].get(i).copied();
            match next {
                Some(n) => {
                    stack.push((node, i + 1));
                    if mark.get(&n) == Some(&Mark::Fresh) {
                        mark.insert(n, Mark::Active);
                        stack.push((n, 0));
                    }
                }
                None => {
                    mark.insert(node, Mark::Done);
                    postorder.push(node);
                }
            }
        }
    }
    let order: Vec<NodeRef> = postorder.into_iter().rev().collect();
    let rank: HashMap<NodeRef, usize> = order.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut layer: BTreeMap<NodeRef, usize> = nodes.iter().map(|n| (*n, 0)).collect();
    for node in &order {
        let here = layer[node];
        for next in &succ[node] {
            if rank.get(next).is_some_and(|r| *r > rank[node]) {
                let entry = layer.get_mut(next).expect("successor in component");
                *entry = (*entry).max(here + 1);
            }
        }
    }
    layer
}

fn place(shape: &mut Shape, col: i64, row: i64) {
    let (w, h) = match shape.kind {
        ShapeKind::Rect => (RECT_W, RECT_H),
        _ => (CIRCLE_D, CIRCLE_D),
    };
    shape.w = w;
    shape.h = h;
    shape.x = col * GRID_X + (GRID_X - w) / 2;
    shape.y = row * GRID_Y + (GRID_Y - h) / 2;
}

/// Lays out one diagram per argument component, in component order, plus
/// a trailing panel of isolated propositions when there are any.
///
/// Within a component, leaves sit on layer 0 and every node one layer
/// above its deepest predecessor, so ultimate targets end up on top.
/// Nodes of a layer are ordered left to right by the smallest proposition
/// id they contain.
pub fn layout(g: &ArgumentGraph) -> Vec<DiagramModel> {
    let merged;
    let g = if g.merged {
        g
    } else {
        merged = merge_identities(g);
        &merged
    };
    let all_links = diagram_links(g);
    let mut models = Vec::new();
    let mut isolated = Vec::new();

    for comp in components(g) {
        if comp.isolated {
            isolated.extend(comp.props);
            continue;
        }
        let mut nodes: Vec<NodeRef> = comp.props.iter().map(|p| NodeRef::Prop(*p)).collect();
        nodes.extend(comp.relations.iter().map(|r| NodeRef::Rel(*r)));
        let members: BTreeSet<NodeRef> = nodes.iter().copied().collect();
        let links: Vec<_> = all_links
            .iter()
            .filter(|(a, b, _)| members.contains(a) && members.contains(b))
            .copied()
            .collect();
        let order_key = |n: &NodeRef| match n {
            NodeRef::Prop(p) => (*p, 0usize, p.0 as usize),
            NodeRef::Rel(i) => (g.relation_nodes[*i].min_prop().unwrap_or_default(), 1, *i),
        };
        nodes.sort_by_key(order_key);
        let layers = assign_layers(&nodes, &links);
        let top = layers.values().copied().max().unwrap_or(0);

        let mut shapes: Vec<Shape> = Vec::with_capacity(nodes.len());
        let mut by_layer: BTreeMap<usize, Vec<NodeRef>> = BTreeMap::new();
        for n in &nodes {
            by_layer.entry(layers[n]).or_default().push(*n);
        }
        let mut columns = 0;
        for (layer, row_nodes) in &by_layer {
            columns = columns.max(row_nodes.len() as i64);
            for (col, node) in row_nodes.iter().enumerate() {
                let (kind, relation, label) = match node {
                    NodeRef::Prop(p) => (ShapeKind::Rect, None, g.label(*p)),
                    NodeRef::Rel(i) => {
                        let k = g.relation_nodes[*i].kind;
                        let label = if shape_kind(k) == ShapeKind::PlusCircle { "+" } else { "" };
                        (shape_kind(k), Some(k), label.to_string())
                    }
                };
                let mut shape = Shape {
                    node: *node,
                    name: node_name(*node),
                    kind,
                    relation,
                    label,
                    layer: *layer,
                    x: 0,
                    y: 0,
                    w: 0,
                    h: 0,
                };
                place(&mut shape, col as i64, (top - layer) as i64);
                shapes.push(shape);
            }
        }
        let index: HashMap<NodeRef, usize> = shapes.iter().enumerate().map(|(i, s)| (s.node, i)).collect();
        let mut seen = BTreeSet::new();
        let links = links
            .iter()
            .filter(|l| seen.insert(**l))
            .map(|(a, b, arrowed)| Link {
                from: index[a],
                to: index[b],
                arrowed: *arrowed,
            })
            .collect();
        models.push(DiagramModel {
            panel: PanelKind::Argument,
            shapes,
            links,
            width: columns * GRID_X,
            height: (top as i64 + 1) * GRID_Y,
        });
    }

    if !isolated.is_empty() {
        let shapes = isolated
            .iter()
            .enumerate()
            .map(|(col, p)| {
                let mut shape = Shape {
                    node: NodeRef::Prop(*p),
                    name: p.to_string(),
                    kind: ShapeKind::Rect,
                    relation: None,
                    label: g.label(*p),
                    layer: 0,
                    x: 0,
                    y: 0,
                    w: 0,
                    h: 0,
                };
                place(&mut shape, col as i64, 0);
                shape
            })
            .collect();
        models.push(DiagramModel {
            panel: PanelKind::Isolated,
            shapes,
            links: Vec::new(),
            width: isolated.len() as i64 * GRID_X,
            height: GRID_Y,
        });
    }
    models
}

/// Escapes text for XML attribute and character content.
pub(crate) fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}
