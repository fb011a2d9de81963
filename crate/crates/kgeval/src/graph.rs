//! Graph model: normalized labels, labeled nodes, directed labeled edges.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A (subject, relation, object) assertion, fields verbatim as emitted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl Triple {
    pub fn new(
        subject: impl Into<String>,
        relation: impl Into<String>,
        object: impl Into<String>,
    ) -> Self {
        Triple {
            subject: subject.into(),
            relation: relation.into(),
            object: object.into(),
        }
    }
}

impl From<[String; 3]> for Triple {
    fn from([subject, relation, object]: [String; 3]) -> Self {
        Triple {
            subject,
            relation,
            object,
        }
    }
}

impl From<Triple> for [String; 3] {
    fn from(t: Triple) -> Self {
        [t.subject, t.relation, t.object]
    }
}

/// A directed edge between two node labels, carrying a relation label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: String,
    pub relation: String,
    pub target: String,
}

impl Edge {
    pub fn new(
        source: impl Into<String>,
        relation: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        Edge {
            source: source.into(),
            relation: relation.into(),
            target: target.into(),
        }
    }

    /// The edge rendered as a plain sentence, fields joined by single spaces.
    pub fn sentence(&self) -> String {
        format!("{} {} {}", self.source, self.relation, self.target)
    }
}

/// Which label transforms run, applied in a fixed order:
/// trim, lowercase, underscores to spaces, whitespace collapse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizationConfig {
    pub trim: bool,
    pub lowercase: bool,
    pub underscores_to_spaces: bool,
    pub collapse_whitespace: bool,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            trim: true,
            lowercase: true,
            underscores_to_spaces: true,
            collapse_whitespace: true,
        }
    }
}

/// Applies the enabled transforms in the fixed pipeline order. Idempotent:
/// a second application never changes the result, so a trailing trim runs
/// when trimming is enabled (underscore replacement can expose new outer
/// whitespace that the first trim could not see).
pub fn normalize_label(label: &str, cfg: &NormalizationConfig) -> String {
    let mut out = if cfg.trim {
        label.trim().to_string()
    } else {
        label.to_string()
    };
    if cfg.lowercase {
        out = out.to_lowercase();
    }
    if cfg.underscores_to_spaces {
        out = out.replace('_', " ");
    }
    if cfg.collapse_whitespace {
        out = out.split_whitespace().collect::<Vec<_>>().join(" ");
    }
    if cfg.trim {
        out = out.trim().to_string();
    }
    out
}

/// A deduplicated labeled graph. Node identity is the label itself; every
/// edge endpoint is guaranteed to be present in `nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KnowledgeGraph {
    nodes: BTreeSet<String>,
    edges: BTreeSet<Edge>,
}

impl KnowledgeGraph {
    /// Builds a graph from raw triples, normalizing every field.
    ///
    /// Triples whose three fields are all empty after normalization are
    /// dropped (the empty-list sentinel). A triple with some but not all
    /// fields empty is rejected, naming its index.
    pub fn from_triples(triples: &[Triple], cfg: &NormalizationConfig) -> Result<Self> {
        let mut graph = KnowledgeGraph::default();
        for (index, t) in triples.iter().enumerate() {
            let subject = normalize_label(&t.subject, cfg);
            let relation = normalize_label(&t.relation, cfg);
            let object = normalize_label(&t.object, cfg);
            let empties = [&subject, &relation, &object]
                .iter()
                .filter(|f| f.is_empty())
                .count();
            match empties {
                0 => graph.insert_edge(Edge {
                    source: subject,
                    relation,
                    target: object,
                }),
                3 => {} // sentinel row, carries no content
                _ => {
                    return Err(Error::MalformedTriple {
                        index,
                        subject,
                        relation,
                        object,
                    })
                }
            }
        }
        Ok(graph)
    }

    /// Builds a graph from already-normalized edges; nodes are induced
    /// from edge endpoints.
    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut graph = KnowledgeGraph::default();
        for e in edges {
            graph.insert_edge(e);
        }
        graph
    }

    fn insert_edge(&mut self, e: Edge) {
        self.nodes.insert(e.source.clone());
        self.nodes.insert(e.target.clone());
        self.edges.insert(e);
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    /// Total element count, nodes plus edges.
    pub fn size(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }
}

/// True when both graphs have exactly the same node set and edge set.
pub fn graphs_identical(g1: &KnowledgeGraph, g2: &KnowledgeGraph) -> bool {
    g1.nodes == g2.nodes && g1.edges == g2.edges
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> NormalizationConfig {
        NormalizationConfig::default()
    }

    #[test]
    fn normalization_pipeline_order() {
        assert_eq!(normalize_label("  Alan_Bean  ", &cfg()), "alan bean");
        assert_eq!(normalize_label("Test\t\tPilot", &cfg()), "test pilot");
        assert_eq!(normalize_label("__a__b__", &cfg()), "a b");
        assert_eq!(normalize_label("", &cfg()), "");
    }

    #[test]
    fn normalization_is_idempotent_without_collapse() {
        let cfg = NormalizationConfig {
            collapse_whitespace: false,
            ..cfg()
        };
        let once = normalize_label("_a", &cfg);
        assert_eq!(normalize_label(&once, &cfg), once);
    }

    #[test]
    fn disabled_steps_leave_input_alone() {
        let cfg = NormalizationConfig {
            trim: false,
            lowercase: false,
            underscores_to_spaces: false,
            collapse_whitespace: false,
        };
        assert_eq!(normalize_label("  A_B  ", &cfg), "  A_B  ");
    }

    #[test]
    fn builds_graph_and_dedups() {
        let triples = vec![
            Triple::new("Alan Bean", "occupation", "Test Pilot"),
            Triple::new("alan bean", "occupation", "test pilot"),
            Triple::new("Alan Bean", "nationality", "United States"),
        ];
        let g = KnowledgeGraph::from_triples(&triples, &cfg()).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.node_count(), 3);
        assert!(g.nodes().contains("alan bean"));
    }

    #[test]
    fn sentinel_triple_is_dropped() {
        let triples = vec![Triple::new("", "", "")];
        let g = KnowledgeGraph::from_triples(&triples, &cfg()).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn partially_empty_triple_is_rejected_with_index() {
        let triples = vec![
            Triple::new("a", "b", "c"),
            Triple::new("a", "", "c"),
        ];
        match KnowledgeGraph::from_triples(&triples, &cfg()) {
            Err(Error::MalformedTriple { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected malformed-triple error, got {other:?}"),
        }
    }

    #[test]
    fn whitespace_only_field_counts_as_empty() {
        let triples = vec![Triple::new(" ", "_", "\t")];
        let g = KnowledgeGraph::from_triples(&triples, &cfg()).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn identical_is_order_insensitive() {
        let a = vec![Triple::new("a", "r", "b"), Triple::new("c", "s", "d")];
        let b = vec![Triple::new("c", "s", "d"), Triple::new("a", "r", "b")];
        let ga = KnowledgeGraph::from_triples(&a, &cfg()).unwrap();
        let gb = KnowledgeGraph::from_triples(&b, &cfg()).unwrap();
        assert!(graphs_identical(&ga, &gb));
    }

    #[test]
    fn different_edges_are_not_identical() {
        let ga =
            KnowledgeGraph::from_triples(&[Triple::new("a", "r", "b")], &cfg()).unwrap();
        let gb =
            KnowledgeGraph::from_triples(&[Triple::new("a", "r", "c")], &cfg()).unwrap();
        assert!(!graphs_identical(&ga, &gb));
    }

    #[test]
    fn parallel_edges_with_distinct_relations_coexist() {
        let triples = vec![Triple::new("a", "r1", "b"), Triple::new("a", "r2", "b")];
        let g = KnowledgeGraph::from_triples(&triples, &cfg()).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.node_count(), 2);
    }
}
