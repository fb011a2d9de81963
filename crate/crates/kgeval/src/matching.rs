//! Exact-overlap metrics: triple-set precision/recall/F1 and the fraction
//! of predictions that reproduce the gold graph exactly.

use crate::error::{Error, Result};
use crate::graph::KnowledgeGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleMatchScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matched: usize,
    pub predicted_total: usize,
    pub gold_total: usize,
}

/// Precision/recall/F1 from overlap counts.
///
/// Conventions: a ratio with denominator 0 is 1.0 when the other side is
/// also empty (nothing to get wrong) and 0.0 otherwise; F1 is 0 when
/// precision + recall is 0.
pub fn score_from_counts(matched: usize, predicted_total: usize, gold_total: usize) -> TripleMatchScore {
    let precision = match (predicted_total, gold_total) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        _ => matched as f64 / predicted_total as f64,
    };
    let recall = match (gold_total, predicted_total) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        _ => matched as f64 / gold_total as f64,
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    TripleMatchScore {
        precision,
        recall,
        f1,
        matched,
        predicted_total,
        gold_total,
    }
}

/// Exact triple overlap between the two graphs' edge sets.
pub fn triple_match(pred: &KnowledgeGraph, gold: &KnowledgeGraph) -> TripleMatchScore {
    let matched = pred.edges().intersection(gold.edges()).count();
    score_from_counts(matched, pred.edge_count(), gold.edge_count())
}

/// Fraction of (pred, gold) pairs that are identical graphs.
pub fn graph_match_fraction(pairs: &[(KnowledgeGraph, KnowledgeGraph)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("graph_match_fraction"));
    }
    let matched = pairs
        .iter()
        .filter(|(pred, gold)| crate::graph::graphs_identical(pred, gold))
        .count();
    Ok(matched as f64 / pairs.len() as f64)
}
