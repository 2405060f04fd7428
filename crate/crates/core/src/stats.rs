//! Corpus counts: proposition types, GM subtype distribution and relation
//! node kinds.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::graph::{build_graph, GraphError, RelationKind};
use crate::model::{AnnotationDocument, BaseType, GmSubtype, PropositionType};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub documents: usize,
    pub propositions: usize,
    /// Count per base type code.
    pub base_types: BTreeMap<String, usize>,
    /// Count per GM subtype code (`GM-L` ...).
    pub gm_subtypes: BTreeMap<String, usize>,
    /// Entries of the relation lists.
    pub relation_entries: usize,
    /// Graph relation nodes per kind, after shared sub-expressions and
    /// joint-in-match collapsing.
    pub relation_nodes: BTreeMap<String, usize>,
}

impl CorpusStats {
    pub fn new() -> Self {
        CorpusStats {
            base_types: BaseType::ALL.iter().map(|b| (b.code().to_string(), 0)).collect(),
            gm_subtypes: GmSubtype::ALL
                .iter()
                .map(|s| (PropositionType::gm(*s).to_string(), 0))
                .collect(),
            relation_nodes: [RelationKind::Support, RelationKind::Attack, RelationKind::Joint, RelationKind::Match]
                .iter()
                .map(|k| (format!("{k:?}"), 0))
                .collect(),
            ..Default::default()
        }
    }

    pub fn add(&mut self, doc: &AnnotationDocument) -> Result<(), GraphError> {
        let graph = build_graph(doc)?;
        self.documents += 1;
        self.propositions += doc.propositions.len();
        for p in &doc.propositions {
            *self.base_types.entry(p.ptype.base.code().to_string()).or_default() += 1;
            if p.ptype.gm_subtype.is_some() {
                *self.gm_subtypes.entry(p.ptype.to_string()).or_default() += 1;
            }
        }
        self.relation_entries += doc.relations.len();
        for node in &graph.relation_nodes {
            *self.relation_nodes.entry(format!("{:?}", node.kind)).or_default() += 1;
        }
        Ok(())
    }

    pub fn relation_node_total(&self) -> usize {
        self.relation_nodes.values().sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "documents\t{}", self.documents);
        let _ = writeln!(out, "propositions\t{}", self.propositions);
        for (code, n) in &self.base_types {
            let _ = writeln!(out, "type {code}\t{n}");
        }
        for (code, n) in &self.gm_subtypes {
            let _ = writeln!(out, "subtype {code}\t{n}");
        }
        let _ = writeln!(out, "relation entries\t{}", self.relation_entries);
        for (kind, n) in &self.relation_nodes {
            let _ = writeln!(out, "relation node {kind}\t{n}");
        }
        let _ = writeln!(out, "relation nodes\t{}", self.relation_node_total());
        out
    }
}
