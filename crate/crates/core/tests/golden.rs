mod common;

use std::collections::BTreeMap;

use argnota_core::diagram::{emit_dot, emit_svg, layout, PanelKind, ShapeKind};
use argnota_core::graph::{build_graph, components, infer_roles, merge_identities, RelationKind, Role};
use argnota_core::model::{GmSubtype, PropId, PropositionType, RelationExpr};
use argnota_core::notation::{parse_expr, parse_relation_list};
use argnota_core::stats::CorpusStats;
use argnota_core::storage::{document_to_string, load_document, save_document};
use argnota_core::validation::{validate_document, DiagnosticCode, ValidationMode};

use common::{corpus_path, document_i, GOLDEN_RELATIONS, GOLDEN_CANONICAL};

#[test]
fn golden_file_shape() {
    let doc = document_i();
    assert_eq!(doc.propositions.len(), 11);
    assert_eq!(doc.relations.len(), 7);
    let p4 = doc.resolve_prop(PropId(4)).unwrap();
    assert_eq!(p4.text, "The plaintiff and the defendant are in a labor service contract relationship.");
    assert_eq!(p4.ptype, PropositionType::SM);
    assert_eq!(doc.resolve_prop(PropId(1)).unwrap().ptype, PropositionType::gm(GmSubtype::L));
    assert!(doc.resolve_prop(PropId(99)).is_err());
    assert_eq!(
        doc.relations[2],
        RelationExpr::matching(RelationExpr::joint(vec![RelationExpr::prop(4), RelationExpr::prop(5)]), RelationExpr::prop(2))
    );
}

#[test]
fn golden_file_is_canonical_bytes() {
    let text = std::fs::read_to_string(corpus_path("document_I.json")).unwrap();
    assert_eq!(document_to_string(&document_i()), text);
}

#[test]
fn save_load_round_trip_and_determinism() {
    let doc = document_i();
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    save_document(&doc, &a).unwrap();
    save_document(&doc, &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(load_document(&a).unwrap(), doc);
}

#[test]
fn golden_relations_list_parses() {
    let list = parse_relation_list(&GOLDEN_RELATIONS.join("; ")).unwrap();
    let strings: Vec<String> = list.iter().map(|r| r.to_string()).collect();
    assert_eq!(strings, GOLDEN_CANONICAL);
    assert_eq!(document_i().relations, list);
    for (raw, canon) in GOLDEN_RELATIONS.iter().zip(GOLDEN_CANONICAL) {
        assert_eq!(parse_expr(raw).unwrap().to_string(), canon);
    }
}

#[test]
fn golden_validates_clean_in_both_modes() {
    let doc = document_i();
    assert_eq!(validate_document(&doc, ValidationMode::Strict), vec![]);
    assert_eq!(validate_document(&doc, ValidationMode::Permissive), vec![]);
}

#[test]
fn general_rule_in_particular_slot() {
    let mut doc = document_i();
    doc.relations.push(parse_expr("M(p2, J(p4,p5))").unwrap());
    let diags = validate_document(&doc, ValidationMode::Strict);
    let codes: Vec<DiagnosticCode> = diags.iter().map(|d| d.code).collect();
    assert_eq!(codes.iter().filter(|c| **c == DiagnosticCode::MatchTypeViolation).count(), 1);
    // Permissive mode does not check match typing.
    assert!(validate_document(&doc, ValidationMode::Permissive).is_empty());
}

#[test]
fn injected_short_joint() {
    let mut doc = document_i();
    doc.relations.push(RelationExpr::joint(vec![RelationExpr::prop(1)]));
    for mode in [ValidationMode::Strict, ValidationMode::Permissive] {
        let diags = validate_document(&doc, mode);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(diags[0].code, DiagnosticCode::JointArity);
    }
}

#[test]
fn golden_graph() {
    let g = build_graph(&document_i()).unwrap();
    g.check_arity().unwrap();
    assert_eq!(g.prop_nodes.len(), 11);
    let mut kinds: BTreeMap<RelationKind, usize> = BTreeMap::new();
    for n in &g.relation_nodes {
        *kinds.entry(n.kind).or_default() += 1;
    }
    assert_eq!(kinds.get(&RelationKind::Match), Some(&2));
    assert_eq!(kinds.get(&RelationKind::Support), Some(&3));
    assert_eq!(kinds.get(&RelationKind::Attack), None);
    assert_eq!(kinds.get(&RelationKind::Joint), None);
    assert!(g.relation_nodes.iter().filter(|n| n.kind == RelationKind::Match).all(|n| n.absorbed_joint));
}

fn ids(v: &[u32]) -> Vec<PropId> {
    v.iter().map(|i| PropId(*i)).collect()
}

#[test]
fn golden_components() {
    let g = merge_identities(&build_graph(&document_i()).unwrap());
    let comps = components(&g);
    let argument: Vec<_> = comps.iter().filter(|c| !c.isolated).collect();
    assert_eq!(argument.len(), 2);
    assert_eq!(argument[0].props, ids(&[2, 3, 4, 5, 6, 7, 8]));
    assert_eq!(argument[0].relations.len(), 4);
    assert_eq!(argument[1].props, ids(&[10, 11]));
    assert_eq!(argument[1].relations.len(), 1);
    let isolated: Vec<_> = comps.iter().filter(|c| c.isolated).map(|c| c.props.clone()).collect();
    assert_eq!(isolated, vec![ids(&[1]), ids(&[9])]);
}

#[test]
fn golden_roles() {
    let g = merge_identities(&build_graph(&document_i()).unwrap());
    let roles = infer_roles(&g);
    // Hand-derived: receivers are the targets of the three supports
    // (p6, p8, p11); contributors are everything inside a source, member,
    // particular or general slot (p2..p7, p10).
    let expected: BTreeMap<PropId, Role> = [
        (1, Role::Isolated),
        (2, Role::Premise),
        (3, Role::Premise),
        (4, Role::Premise),
        (5, Role::Premise),
        (6, Role::SubConclusion),
        (7, Role::Premise),
        (8, Role::Conclusion),
        (9, Role::Isolated),
        (10, Role::Premise),
        (11, Role::Conclusion),
    ]
    .into_iter()
    .map(|(i, r)| (PropId(i), r))
    .collect();
    assert_eq!(roles.roles, expected);
}

#[test]
fn golden_layout_layers() {
    let models = layout(&merge_identities(&build_graph(&document_i()).unwrap()));
    assert_eq!(models.len(), 3);
    assert_eq!(models[2].panel, PanelKind::Isolated);
    let first = &models[0];
    let layer = |n: &str| first.shape(n).unwrap().layer;
    for leaf in ["p4", "p5", "p7"] {
        assert_eq!(layer(leaf), 0, "{leaf}");
    }
    // p4,p5 -> + -> p2 -> ● -> p6 -> + -> p3 -> ● -> p8
    assert_eq!(layer("p2"), 2);
    assert_eq!(layer("p6"), 4);
    assert_eq!(layer("p3"), 6);
    assert_eq!(layer("p8"), 8);
    let top = first.shapes.iter().min_by_key(|s| s.y).unwrap();
    assert_eq!(top.name, "p8");
    for (i, a) in first.shapes.iter().enumerate() {
        for b in &first.shapes[i + 1..] {
            assert!(!a.overlaps(b), "{} overlaps {}", a.name, b.name);
        }
    }
}

#[test]
fn golden_shape_counts() {
    let models = layout(&merge_identities(&build_graph(&document_i()).unwrap()));
    let (c1, c2) = (&models[0], &models[1]);
    assert_eq!(c1.count(ShapeKind::Rect), 7);
    assert_eq!(c1.count(ShapeKind::PlusCircle), 2);
    assert_eq!(c1.count(ShapeKind::SolidCircle), 2);
    assert_eq!(c1.count(ShapeKind::HollowCircle), 0);
    assert_eq!(c2.count(ShapeKind::Rect), 2);
    assert_eq!(c2.count(ShapeKind::SolidCircle), 1);

    let svg = emit_svg(&models);
    assert_eq!(svg, emit_svg(&models));
    let panels: Vec<&str> = svg.split("<g class=\"panel ").skip(1).collect();
    assert_eq!(panels.len(), 3);
    assert_eq!(panels[0].matches("<rect ").count(), 7);
    assert_eq!(panels[0].matches("<circle class=\"plus").count(), 2);
    assert_eq!(panels[0].matches("<circle class=\"support\"").count(), 2);
    assert_eq!(panels[1].matches("<rect ").count(), 2);
    assert_eq!(panels[1].matches("<circle class=\"support\"").count(), 1);
    assert!(panels[2].starts_with("isolated"));

    let dot = emit_dot(&models);
    assert_eq!(dot.matches("subgraph cluster_").count(), 3);
    assert!(dot.contains("subgraph cluster_isolated"));
}

#[test]
fn golden_stats() {
    let mut stats = CorpusStats::new();
    stats.add(&document_i()).unwrap();
    assert_eq!(stats.base_types.values().sum::<usize>(), 11);
    assert_eq!(stats.base_types["GM"], 3);
    assert_eq!(stats.base_types["SM"], 4);
    assert_eq!(stats.base_types["SF"], 4);
    assert_eq!(stats.gm_subtypes["GM-L"], 3);
    assert_eq!(stats.relation_node_total(), 5);
    assert_eq!(stats.relation_nodes["Support"], 3);
    assert_eq!(stats.relation_nodes["Match"], 2);
}

