#![allow(dead_code)]

pub mod gen;

use std::path::PathBuf;

use argnota_core::model::AnnotationDocument;
use argnota_core::storage::load_document;

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

pub fn document_i() -> AnnotationDocument {
    load_document(corpus_path("document_I.json")).expect("golden document loads")
}

/// The relation list of the golden document, with spaces after commas.
pub const GOLDEN_RELATIONS: [&str; 7] = [
    "J(p4, p5)",
    "J(p6, p7)",
    "M(J(p4, p5), p2)",
    "M(J(p6, p7), p3)",
    "S(M(J(p4, p5), p2), p6)",
    "S(M(J(p6, p7), p3), p8)",
    "S(p10, p11)",
];

pub const GOLDEN_CANONICAL: [&str; 7] = [
    "J(p4,p5)",
    "J(p6,p7)",
    "M(J(p4,p5),p2)",
    "M(J(p6,p7),p3)",
    "S(M(J(p4,p5),p2),p6)",
    "S(M(J(p6,p7),p3),p8)",
    "S(p10,p11)",
];
