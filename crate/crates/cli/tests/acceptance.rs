//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p argnota-cli --test acceptance -- --nocapture`
//! to see the report.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Method, Request};
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

use argnota_core::agreement::{align_propositions, compare_documents, relation_f1, type_kappa, Granularity};
use argnota_core::diagram::{emit_dot, emit_svg, layout};
use argnota_core::graph::{build_graph, components, infer_roles, merge_identities, Role};
use argnota_core::model::{AnnotationDocument, BaseType, PropId, PropositionType, RelationExpr};
use argnota_core::notation::parse_expr;
use argnota_core::storage::{document_to_string, load_document};
use argnota_core::validation::{nesting_whitelist_check, validate_document, DiagnosticCode, ValidationMode};

/// Runtime budget for each golden check.
const BUDGET: Duration = Duration::from_secs(1);
/// Tolerance for kappa against the brute-force oracle.
const KAPPA_TOL: f64 = 1e-9;
const ROUND_TRIP_TREES: usize = 10_000;
const MAX_TREE_DEPTH: usize = 6;
const FUZZ_INPUTS: usize = 100_000;
const SEED: u64 = 0x5eed_2024;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/document_I.json")
}

fn golden() -> AnnotationDocument {
    load_document(golden_path()).expect("golden document loads")
}

fn timed(start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure!(t < BUDGET, "took {t:?}, budget {BUDGET:?}");
    Ok(t)
}

const GOLDEN_RELATIONS: [(&str, &str); 7] = [
    ("J(p4, p5)", "J(p4,p5)"),
    ("J(p6, p7)", "J(p6,p7)"),
    ("M(J(p4, p5), p2)", "M(J(p4,p5),p2)"),
    ("M(J(p6, p7), p3)", "M(J(p6,p7),p3)"),
    ("S(M(J(p4, p5), p2), p6)", "S(M(J(p4,p5),p2),p6)"),
    ("S(M(J(p6, p7), p3), p8)", "S(M(J(p6,p7),p3),p8)"),
    ("S(p10, p11)", "S(p10,p11)"),
];

fn golden_parse() -> Check {
    let start = Instant::now();
    for (printed, canonical) in GOLDEN_RELATIONS {
        let e = parse_expr(printed).map_err(|d| format!("{printed}: {d}"))?;
        ensure!(e.to_string() == canonical, "{printed} serialized as {e}");
        let again = parse_expr(canonical).map_err(|d| d.to_string())?.to_string();
        ensure!(again == canonical, "{canonical} serialized as {again}");
    }
    let t = timed(start)?;
    Ok(format!("7/7 relation strings round-trip ({t:?})"))
}

/// Swaps the slots of the `n`-th Match in pre-order; `n` counts down.
fn swap_nth_match(e: &RelationExpr, n: &mut usize) -> RelationExpr {
    let hit = matches!(e, RelationExpr::Match(..)) && {
        let here = *n == 0;
        *n = n.wrapping_sub(1);
        here
    };
    let rec = |x: &RelationExpr, n: &mut usize| Box::new(swap_nth_match(x, n));
    match e {
        RelationExpr::Prop(_) | RelationExpr::Identity(_) => e.clone(),
        RelationExpr::Support(s, t) => {
            let s = rec(s, n);
            RelationExpr::Support(s, rec(t, n))
        }
        RelationExpr::Attack(s, t) => {
            let s = rec(s, n);
            RelationExpr::Attack(s, rec(t, n))
        }
        RelationExpr::Match(p, g) => {
            let p = rec(p, n);
            let g = rec(g, n);
            if hit {
                RelationExpr::Match(g, p)
            } else {
                RelationExpr::Match(p, g)
            }
        }
        RelationExpr::Joint(ms) => RelationExpr::Joint(ms.iter().map(|m| swap_nth_match(m, n)).collect()),
    }
}

fn count_matches(e: &RelationExpr) -> usize {
    usize::from(matches!(e, RelationExpr::Match(..))) + e.children().into_iter().map(count_matches).sum::<usize>()
}

fn golden_validation() -> Check {
    let start = Instant::now();
    let doc = golden();
    ensure!(doc.propositions.len() == 11 && doc.relations.len() == 7, "golden document has wrong shape");
    let diags = validate_document(&doc, ValidationMode::Strict);
    ensure!(diags.is_empty(), "strict diagnostics on golden: {diags:?}");
    let mut swaps = 0;
    for (i, rel) in doc.relations.iter().enumerate() {
        for k in 0..count_matches(rel) {
            let mut swapped = doc.clone();
            swapped.relations[i] = swap_nth_match(rel, &mut { k });
            let violations = validate_document(&swapped, ValidationMode::Strict)
                .into_iter()
                .filter(|d| d.code == DiagnosticCode::MatchTypeViolation)
                .count();
            ensure!(violations == 1, "swap {k} in {rel}: {violations} MatchTypeViolation(s)");
            swaps += 1;
        }
    }
    ensure!(swaps == 4, "expected 4 match occurrences, found {swaps}");
    let t = timed(start)?;
    Ok(format!("0 strict diagnostics; {swaps} match swaps each give exactly 1 MatchTypeViolation ({t:?})"))
}

fn golden_structure() -> Check {
    let graph = merge_identities(&build_graph(&golden()).map_err(|e| e.to_string())?);
    let comps = components(&graph);
    let arguments = comps.iter().filter(|c| !c.isolated).count();
    let isolated: Vec<Vec<u32>> = comps
        .iter()
        .filter(|c| c.isolated)
        .map(|c| c.props.iter().map(|p| p.0).collect())
        .collect();
    ensure!(arguments == 2, "{arguments} argument components");
    ensure!(isolated == vec![vec![1], vec![9]], "isolated {isolated:?}");

    use Role::*;
    let oracle: BTreeMap<u32, Role> = [
        (1, Isolated),
        (2, Premise),
        (3, Premise),
        (4, Premise),
        (5, Premise),
        (6, SubConclusion),
        (7, Premise),
        (8, Conclusion),
        (9, Isolated),
        (10, Premise),
        (11, Conclusion),
    ]
    .into_iter()
    .collect();
    let roles: BTreeMap<u32, Role> = infer_roles(&graph).roles.into_iter().map(|(k, v)| (k.0, v)).collect();
    ensure!(roles == oracle, "roles {roles:?}");
    Ok("2 argument components, isolated {p1} {p9}, roles match oracle".into())
}

fn panel_counts(svg: &str) -> Vec<(String, usize, usize, usize, usize)> {
    svg.split("<g class=\"panel ")
        .skip(1)
        .map(|panel| {
            let kind = panel.split('"').next().unwrap().to_string();
            (
                kind,
                panel.matches("class=\"proposition\"").count(),
                panel.matches("class=\"plus ").count(),
                panel.matches("class=\"support\"").count(),
                panel.matches("class=\"attack\"").count(),
            )
        })
        .collect()
}

fn diagram_conformance() -> Check {
    let start = Instant::now();
    let graph = merge_identities(&build_graph(&golden()).map_err(|e| e.to_string())?);
    let svg = emit_svg(&layout(&graph));
    let counts = panel_counts(&svg);
    let expected = vec![
        ("argument".to_string(), 7, 2, 2, 0),
        ("argument".to_string(), 2, 0, 1, 0),
        ("isolated".to_string(), 2, 0, 0, 0),
    ];
    ensure!(counts == expected, "panel counts {counts:?}");
    ensure!(svg == emit_svg(&layout(&graph)), "SVG differs between runs");
    let dot = emit_dot(&layout(&graph));
    ensure!(dot == emit_dot(&layout(&graph)), "DOT differs between runs");

    // Shape vocabulary on a document with an attack and an identity class.
    let mut doc = golden();
    doc.relations = ["S(M(J(p4,p5),p2),p6)", "A(p7,S(p10,p11))", "I(p9,p10)"]
        .iter()
        .map(|s| parse_expr(s).unwrap())
        .collect();
    let vocab = emit_svg(&layout(&merge_identities(&build_graph(&doc).map_err(|e| e.to_string())?)));
    ensure!(vocab.contains(r#"class="support""#) && vocab.contains(r#"fill="black" stroke="black"/>"#), "support circle");
    ensure!(vocab.contains(r#"class="attack""#), "attack circle missing");
    let attack_fill = vocab
        .lines()
        .find(|l| l.contains(r#"<circle class="attack""#))
        .is_some_and(|l| l.contains(r#"fill="white""#));
    ensure!(attack_fill, "attack circle is not hollow");
    ensure!(vocab.contains(">+</text>"), "plus label missing");
    ensure!(vocab.contains(">p9/p10</text>"), "identity label missing");
    let t = timed(start)?;
    Ok(format!("panels 7+2(+)+2(●) / 2+1(●) / isolated 2; byte-identical reruns; vocabulary ok ({t:?})"))
}

fn random_tree(rng: &mut ChaCha8Rng, depth: usize) -> RelationExpr {
    let prop = |rng: &mut ChaCha8Rng| RelationExpr::prop(rng.random_range(1..=60));
    if depth == 0 || rng.random_bool(0.25) {
        return prop(rng);
    }
    match rng.random_range(0..5) {
        0 => RelationExpr::support(random_tree(rng, depth - 1), random_tree(rng, depth - 1)),
        1 => RelationExpr::attack(random_tree(rng, depth - 1), random_tree(rng, depth - 1)),
        2 => RelationExpr::matching(random_tree(rng, depth - 1), random_tree(rng, depth - 1)),
        3 => {
            let n = rng.random_range(2..=5);
            RelationExpr::Joint((0..n).map(|_| random_tree(rng, depth - 1)).collect())
        }
        _ => {
            let n = rng.random_range(2..=5);
            RelationExpr::Identity((0..n).map(|_| PropId(rng.random_range(1..=60))).collect())
        }
    }
}

fn notation_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut deepest = 0;
    for i in 0..ROUND_TRIP_TREES {
        let tree = random_tree(&mut rng, MAX_TREE_DEPTH);
        deepest = deepest.max(tree.depth());
        let text = tree.to_string();
        let back = parse_expr(&text).map_err(|d| format!("tree {i} {text}: {d}"))?;
        ensure!(back == tree, "tree {i} {text} re-parsed differently");
    }
    ensure!(deepest <= MAX_TREE_DEPTH, "generated depth {deepest}");

    const ALPHABET: &[u8] = b"SAMJIp0123456789(), ;";
    let (mut accepted, mut rejected) = (0usize, 0usize);
    for i in 0..FUZZ_INPUTS {
        let len = rng.random_range(0..64);
        let bytes: Vec<u8> = if i % 2 == 0 {
            (0..len).map(|_| rng.random()).collect()
        } else {
            (0..len).map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())]).collect()
        };
        let text = String::from_utf8_lossy(&bytes).into_owned();
        let outcome = catch_unwind(|| parse_expr(&text)).map_err(|_| format!("parser panicked on {bytes:?}"))?;
        match outcome {
            Ok(_) => accepted += 1,
            Err(d) => {
                ensure!(d.position <= text.chars().count(), "diagnostic position past end for {text:?}");
                rejected += 1;
            }
        }
    }
    Ok(format!(
        "{ROUND_TRIP_TREES} trees (depth <= {deepest}) round-trip; {FUZZ_INPUTS} fuzz inputs, 0 panics ({rejected} diagnostics, {accepted} accepted)"
    ))
}

fn nesting_catalogue() -> Check {
    let forms = [
        "M(J(p1, p2), p3)",
        "J(M(p1, p2), M(p3, p4))",
        "S(J(p1, p2, p3), p4)",
        "S(M(p1, p2), p3)",
        "A(p3, S(p1, p2))",
        "S(M(J(p1, p2, p3), p4), p5)",
    ];
    for form in forms {
        let flags = nesting_whitelist_check(&parse_expr(form).map_err(|d| d.to_string())?);
        ensure!(flags.is_empty(), "{form} flagged: {flags:?}");
    }
    let flags = nesting_whitelist_check(&parse_expr("S(A(p1,p2),p3)").unwrap());
    ensure!(flags.len() == 1, "S(A(p1,p2),p3) gave {} flags", flags.len());
    Ok("6/6 catalogued forms pass; S(A(p1,p2),p3) flagged once".into())
}

/// Cohen's kappa from the definition, with chance agreement counted over
/// every cross pair of items.
fn brute_force_kappa(a: &[BaseType], b: &[BaseType]) -> f64 {
    let n = a.len() as f64;
    let p_o = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let p_e = a.iter().flat_map(|x| b.iter().map(move |y| x == y)).filter(|&same| same).count() as f64 / (n * n);
    (p_o - p_e) / (1.0 - p_e)
}

fn agreement_oracle() -> Check {
    let a = golden();
    let own = compare_documents(&a, &a, 0.5).map_err(|e| e.to_string())?;
    ensure!(own.base_type_kappa == Some(1.0), "self kappa {:?}", own.base_type_kappa);
    ensure!(own.subtype_kappa == Some(1.0), "self subtype kappa {:?}", own.subtype_kappa);
    ensure!(own.relation_f1 == 1.0, "self F1 {}", own.relation_f1);

    let mut b = a.clone();
    b.propositions.iter_mut().find(|p| p.id == PropId(4)).unwrap().ptype = PropositionType::SF;
    let al = align_propositions(&a, &b, 0.5).map_err(|e| e.to_string())?;
    let k = type_kappa(&a, &b, &al, Granularity::Base).map_err(|e| e.to_string())?;
    let base = |d: &AnnotationDocument| d.propositions.iter().map(|p| p.ptype.base).collect::<Vec<_>>();
    let oracle = brute_force_kappa(&base(&a), &base(&b));
    ensure!((k - oracle).abs() <= KAPPA_TOL, "kappa {k} vs oracle {oracle}");

    let mut c = a.clone();
    c.relations[6] = parse_expr("S(p11,p10)").unwrap();
    let al = align_propositions(&a, &c, 0.5).map_err(|e| e.to_string())?;
    let s = relation_f1(&a, &c, &al);
    ensure!(s.precision == 6.0 / 7.0 && s.recall == 6.0 / 7.0, "P {} R {}", s.precision, s.recall);
    Ok(format!("self kappa 1, F1 1; relabel kappa {k:.10} (oracle {oracle:.10}, tol {KAPPA_TOL:e}); flip P = R = 6/7"))
}

fn cli(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_argnota")).args(args).output().unwrap();
    (out.status.code(), String::from_utf8(out.stdout).unwrap())
}

async fn http(app: &axum::Router, uri: &str, body: Value) -> Value {
    let req = Request::builder().method(Method::POST).uri(uri).body(Body::from(body.to_string())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    serde_json::from_slice(&resp.into_body().collect().await.unwrap().to_bytes()).unwrap()
}

fn write_variant(dir: &Path, name: &str, doc: &AnnotationDocument) -> (PathBuf, Value) {
    let path = dir.join(name);
    let text = document_to_string(doc);
    std::fs::write(&path, &text).unwrap();
    (path, serde_json::from_str(&text).unwrap())
}

fn cli_service_parity() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = golden();
    let mut swapped = a.clone();
    swapped.relations[2] = parse_expr("M(p2,J(p4,p5))").unwrap();
    let mut flipped = a.clone();
    flipped.annotator_id = "second".into();
    flipped.relations[6] = parse_expr("S(p11,p10)").unwrap();
    flipped.propositions[3].ptype = PropositionType::SF;
    let (pa, va) = write_variant(dir.path(), "a.json", &a);
    let (ps, vs) = write_variant(dir.path(), "swapped.json", &swapped);
    let (pf, vf) = write_variant(dir.path(), "flipped.json", &flipped);
    let s = |p: &PathBuf| p.to_str().unwrap().to_string();

    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let app = argnota_service::app(dir.path());
    let mut compared = 0;
    for (path, value, flag, mode) in [
        (&pa, &va, "--strict", "strict"),
        (&ps, &vs, "--strict", "strict"),
        (&ps, &vs, "--permissive", "permissive"),
    ] {
        let (_, out) = cli(&["validate", &s(path), flag]);
        let v = runtime.block_on(http(&app, "/validate", json!({"document": value, "mode": mode})));
        ensure!(v["result"]["text"] == out.as_str(), "validate {mode} differs for {}", path.display());
        compared += 1;
    }
    for (path, value) in [(&pa, &va), (&pf, &vf)] {
        let (_, out) = cli(&["roles", &s(path)]);
        let v = runtime.block_on(http(&app, "/roles", json!({"document": value})));
        ensure!(v["result"]["text"] == out.as_str(), "roles differ");
        for format in ["svg", "dot"] {
            let (_, out) = cli(&["render", &s(path), "--format", format]);
            let v = runtime.block_on(http(&app, "/render", json!({"document": value, "format": format})));
            ensure!(v["result"]["content"] == out.as_str(), "render {format} differs");
            compared += 1;
        }
        compared += 1;
    }
    let (_, out) = cli(&["compare", &s(&pa), &s(&pf)]);
    let v = runtime.block_on(http(&app, "/compare", json!({"doc_a": va, "doc_b": vf})));
    ensure!(v["result"]["text"] == out.as_str(), "compare text differs");
    let (_, out) = cli(&["compare", &s(&pa), &s(&pf), "--json"]);
    let report: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure!(v["result"]["report"] == report, "compare JSON differs");
    compared += 2;
    Ok(format!("{compared} CLI/HTTP output pairs byte-identical"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("golden parse", golden_parse),
        ("golden validation", golden_validation),
        ("golden structure", golden_structure),
        ("diagram conformance", diagram_conformance),
        ("notation properties", notation_properties),
        ("nesting catalogue", nesting_catalogue),
        ("agreement oracle", agreement_oracle),
        ("CLI/service parity", cli_service_parity),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
