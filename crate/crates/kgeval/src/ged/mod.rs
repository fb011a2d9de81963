//! Graph edit distance with explicit optimal edit paths.
//!
//! An edit path aligns the two graphs element by element: every node and
//! every edge of both graphs appears in exactly one pair. A pair with both
//! sides present is a substitution (free when labels agree), a pair with
//! only the gold side is an insertion (the prediction omitted it), and a
//! pair with only the predicted side is a deletion (the prediction
//! hallucinated it). Unequal-label pairs are only formed when substitution
//! is strictly cheaper than deleting one side and inserting the other;
//! at the default costs this means edges never pair across different
//! relations, which keeps hallucination and omission counts stable.

mod brute;
mod search;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Edge, KnowledgeGraph};

pub use brute::brute_force_ged;

/// Per-operation prices for nodes and edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    pub node_insert: f64,
    pub node_delete: f64,
    pub node_substitute_equal: f64,
    pub node_substitute_unequal: f64,
    pub edge_insert: f64,
    pub edge_delete: f64,
    pub edge_substitute_equal: f64,
    pub edge_substitute_unequal: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            node_insert: 1.0,
            node_delete: 1.0,
            node_substitute_equal: 0.0,
            node_substitute_unequal: 1.0,
            edge_insert: 1.0,
            edge_delete: 1.0,
            edge_substitute_equal: 0.0,
            // equal to insert + delete: an edge pair with differing
            // relations decomposes into one omission and one hallucination
            edge_substitute_unequal: 2.0,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("node_insert", self.node_insert),
            ("node_delete", self.node_delete),
            ("node_substitute_equal", self.node_substitute_equal),
            ("node_substitute_unequal", self.node_substitute_unequal),
            ("edge_insert", self.edge_insert),
            ("edge_delete", self.edge_delete),
            ("edge_substitute_equal", self.edge_substitute_equal),
            ("edge_substitute_unequal", self.edge_substitute_unequal),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidCostModel(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        if self.node_substitute_equal > self.node_substitute_unequal {
            return Err(Error::InvalidCostModel(
                "node_substitute_equal exceeds node_substitute_unequal".to_string(),
            ));
        }
        if self.edge_substitute_equal > self.edge_substitute_unequal {
            return Err(Error::InvalidCostModel(
                "edge_substitute_equal exceeds edge_substitute_unequal".to_string(),
            ));
        }
        Ok(())
    }

    /// Whether an unequal-label node pair is ever worth forming.
    pub(crate) fn pairs_unequal_nodes(&self) -> bool {
        self.node_substitute_unequal < self.node_insert + self.node_delete
    }

    /// Whether an unequal-relation edge pair is ever worth forming.
    pub(crate) fn pairs_unequal_edges(&self) -> bool {
        self.edge_substitute_unequal < self.edge_insert + self.edge_delete
    }
}

/// One aligned element of an edit path. At least one side is present.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EditPair<T> {
    pub gold: Option<T>,
    pub pred: Option<T>,
}

impl<T> EditPair<T> {
    /// The prediction lacks this gold element.
    pub fn is_omission(&self) -> bool {
        self.pred.is_none()
    }

    /// The prediction contains this element with no gold counterpart.
    pub fn is_hallucination(&self) -> bool {
        self.gold.is_none()
    }
}

/// An optimal (or, past the size cap, greedy upper-bound) edit path.
#[derive(Debug, Clone, PartialEq)]
pub struct EditResult {
    pub cost: f64,
    pub node_pairs: Vec<EditPair<String>>,
    pub edge_pairs: Vec<EditPair<Edge>>,
    /// False when the search was capped and the path is only an upper bound.
    pub exact: bool,
}

/// Which element pairs feed the rate denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateMode {
    #[default]
    Edges,
    Nodes,
    NodesAndEdges,
}

/// Hallucination and omission tallies over an edit path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub hallucinated: usize,
    pub omitted: usize,
    pub total: usize,
    pub hall_rate: f64,
    pub omis_rate: f64,
}

impl RateReport {
    pub fn new(hallucinated: usize, omitted: usize, total: usize) -> Self {
        let (hall_rate, omis_rate) = if total == 0 {
            (0.0, 0.0)
        } else {
            (
                hallucinated as f64 / total as f64,
                omitted as f64 / total as f64,
            )
        };
        RateReport {
            hallucinated,
            omitted,
            total,
            hall_rate,
            omis_rate,
        }
    }
}

/// Graph-level indicator fractions: the share of graphs with at least one
/// hallucinated (resp. omitted) element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegacyRates {
    pub hall_fraction: f64,
    pub omis_fraction: f64,
    pub total_graphs: usize,
}

/// Largest node count either graph may have for exhaustive enumeration.
pub const BRUTE_FORCE_NODE_LIMIT: usize = 6;

/// Default cap on exact search; larger inputs get the greedy upper bound.
pub const DEFAULT_NODE_CAP: usize = 12;

/// Edit distance from the predicted graph to the gold graph.
///
/// Exact (branch-and-bound over injective node mappings, admissible
/// unmatched-element bound, ties broken toward the lexicographically
/// smallest mapping) when both graphs fit under `node_cap`; otherwise a
/// deterministic greedy label matching with `exact = false`.
pub fn ged(
    pred: &KnowledgeGraph,
    gold: &KnowledgeGraph,
    costs: &CostModel,
    node_cap: usize,
) -> Result<EditResult> {
    costs.validate()?;
    let exact = pred.node_count().max(gold.node_count()) <= node_cap;
    let mapping = if exact {
        search::optimal_mapping(pred, gold, costs)
    } else {
        search::greedy_mapping(pred, gold, costs)
    };
    Ok(finalize(pred, gold, costs, &mapping, exact))
}

/// Reads hallucination and omission rates off an edit path.
pub fn rates_from_path(result: &EditResult, mode: RateMode) -> RateReport {
    let (mut hallucinated, mut omitted, mut total) = (0, 0, 0);
    if matches!(mode, RateMode::Nodes | RateMode::NodesAndEdges) {
        tally(&result.node_pairs, &mut hallucinated, &mut omitted, &mut total);
    }
    if matches!(mode, RateMode::Edges | RateMode::NodesAndEdges) {
        tally(&result.edge_pairs, &mut hallucinated, &mut omitted, &mut total);
    }
    RateReport::new(hallucinated, omitted, total)
}

fn tally<T>(pairs: &[EditPair<T>], hallucinated: &mut usize, omitted: &mut usize, total: &mut usize) {
    for pair in pairs {
        *total += 1;
        if pair.is_hallucination() {
            *hallucinated += 1;
        }
        if pair.is_omission() {
            *omitted += 1;
        }
    }
}

/// Fraction of graphs carrying at least one hallucination (resp. omission).
pub fn legacy_rates(reports: &[RateReport]) -> Result<LegacyRates> {
    if reports.is_empty() {
        return Err(Error::EmptyInput("legacy_rates"));
    }
    let total = reports.len();
    let hall = reports.iter().filter(|r| r.hallucinated > 0).count();
    let omis = reports.iter().filter(|r| r.omitted > 0).count();
    Ok(LegacyRates {
        hall_fraction: hall as f64 / total as f64,
        omis_fraction: omis as f64 / total as f64,
        total_graphs: total,
    })
}

/// Reprices an edit path under `costs`. For the model that produced the
/// result this equals its `cost` field, which makes paths auditable.
pub fn path_cost(result: &EditResult, costs: &CostModel) -> f64 {
    result
        .node_pairs
        .iter()
        .map(|p| node_pair_price(costs, p))
        .chain(result.edge_pairs.iter().map(|p| edge_pair_price(costs, p)))
        .sum()
}

/// A complete node mapping: for each gold node (in sorted order) either the
/// index of its predicted partner (into the sorted predicted node list) or
/// None.
pub(crate) type NodeMapping = Vec<Option<usize>>;

/// Builds the full edit path implied by a node mapping and prices it.
/// The reported cost is by construction the sum of the pair prices.
pub(crate) fn finalize(
    pred: &KnowledgeGraph,
    gold: &KnowledgeGraph,
    costs: &CostModel,
    mapping: &NodeMapping,
    exact: bool,
) -> EditResult {
    let gold_nodes: Vec<&String> = gold.nodes().iter().collect();
    let pred_nodes: Vec<&String> = pred.nodes().iter().collect();
    debug_assert_eq!(mapping.len(), gold_nodes.len());

    let mut pred_matched = vec![false; pred_nodes.len()];
    let mut node_pairs = Vec::new();
    for (gi, choice) in mapping.iter().enumerate() {
        match choice {
            Some(pi) => {
                pred_matched[*pi] = true;
                node_pairs.push(EditPair {
                    gold: Some(gold_nodes[gi].clone()),
                    pred: Some(pred_nodes[*pi].clone()),
                });
            }
            None => node_pairs.push(EditPair {
                gold: Some(gold_nodes[gi].clone()),
                pred: None,
            }),
        }
    }
    for (pi, matched) in pred_matched.iter().enumerate() {
        if !matched {
            node_pairs.push(EditPair {
                gold: None,
                pred: Some(pred_nodes[pi].clone()),
            });
        }
    }
    node_pairs.sort();

    // pred label -> gold label, for locating an edge's aligned endpoint group
    let mut image: BTreeMap<&String, &String> = BTreeMap::new();
    for (gi, choice) in mapping.iter().enumerate() {
        if let Some(pi) = choice {
            image.insert(gold_nodes[gi], pred_nodes[*pi]);
        }
    }
    let preimage: BTreeMap<&String, &String> = image.iter().map(|(g, p)| (*p, *g)).collect();

    // group edges by aligned endpoint pair, keyed by the gold-side labels
    let mut groups: BTreeMap<(&String, &String), (Vec<&Edge>, Vec<&Edge>)> = BTreeMap::new();
    let mut edge_pairs = Vec::new();
    for e in gold.edges() {
        match (image.get(&e.source), image.get(&e.target)) {
            (Some(_), Some(_)) => {
                groups
                    .entry((&e.source, &e.target))
                    .or_default()
                    .0
                    .push(e);
            }
            // an endpoint the prediction lacks: the edge cannot be matched
            _ => edge_pairs.push(EditPair {
                gold: Some(e.clone()),
                pred: None,
            }),
        }
    }
    for e in pred.edges() {
        match (preimage.get(&e.source), preimage.get(&e.target)) {
            (Some(gs), Some(gt)) => {
                groups.entry((gs, gt)).or_default().1.push(e);
            }
            _ => edge_pairs.push(EditPair {
                gold: None,
                pred: Some(e.clone()),
            }),
        }
    }

    let pair_unequal = costs.pairs_unequal_edges();
    for (_, (gold_edges, pred_edges)) in groups {
        pair_group_edges(&gold_edges, &pred_edges, pair_unequal, &mut edge_pairs);
    }
    edge_pairs.sort();

    let cost = node_pairs
        .iter()
        .map(|p| node_pair_price(costs, p))
        .chain(edge_pairs.iter().map(|p| edge_pair_price(costs, p)))
        .sum();

    EditResult {
        cost,
        node_pairs,
        edge_pairs,
        exact,
    }
}

/// Pairs the edges of one aligned endpoint group: equal relations first,
/// then (only when strictly cheaper than delete + insert) leftover unequal
/// relations in sorted order, then one-sided pairs for the rest.
fn pair_group_edges(
    gold_edges: &[&Edge],
    pred_edges: &[&Edge],
    pair_unequal: bool,
    out: &mut Vec<EditPair<Edge>>,
) {
    // relations are unique within a group because edges are deduplicated
    let mut gold_left: Vec<&Edge> = Vec::new();
    let mut matched_pred = vec![false; pred_edges.len()];
    for ge in gold_edges {
        let hit =
            (0..pred_edges.len()).find(|&i| !matched_pred[i] && pred_edges[i].relation == ge.relation);
        match hit {
            Some(i) => {
                matched_pred[i] = true;
                out.push(EditPair {
                    gold: Some((*ge).clone()),
                    pred: Some(pred_edges[i].clone()),
                });
            }
            None => gold_left.push(ge),
        }
    }
    let mut pred_left: Vec<&Edge> = pred_edges
        .iter()
        .zip(&matched_pred)
        .filter(|(_, m)| !**m)
        .map(|(e, _)| *e)
        .collect();
    gold_left.sort();
    pred_left.sort();
    let mut gi = gold_left.into_iter();
    let mut pi = pred_left.into_iter();
    if pair_unequal {
        loop {
            match (gi.next(), pi.next()) {
                (Some(g), Some(p)) => out.push(EditPair {
                    gold: Some(g.clone()),
                    pred: Some(p.clone()),
                }),
                (Some(g), None) => out.push(EditPair {
                    gold: Some(g.clone()),
                    pred: None,
                }),
                (None, Some(p)) => out.push(EditPair {
                    gold: None,
                    pred: Some(p.clone()),
                }),
                (None, None) => break,
            }
        }
    } else {
        for g in gi {
            out.push(EditPair {
                gold: Some(g.clone()),
                pred: None,
            });
        }
        for p in pi {
            out.push(EditPair {
                gold: None,
                pred: Some(p.clone()),
            });
        }
    }
}

pub(crate) fn node_pair_price(costs: &CostModel, pair: &EditPair<String>) -> f64 {
    match (&pair.gold, &pair.pred) {
        (Some(g), Some(p)) if g == p => costs.node_substitute_equal,
        (Some(_), Some(_)) => costs.node_substitute_unequal,
        (Some(_), None) => costs.node_insert,
        (None, Some(_)) => costs.node_delete,
        (None, None) => unreachable!("edit pair with both sides absent"),
    }
}

pub(crate) fn edge_pair_price(costs: &CostModel, pair: &EditPair<Edge>) -> f64 {
    match (&pair.gold, &pair.pred) {
        (Some(g), Some(p)) if g.relation == p.relation => costs.edge_substitute_equal,
        (Some(_), Some(_)) => costs.edge_substitute_unequal,
        (Some(_), None) => costs.edge_insert,
        (None, Some(_)) => costs.edge_delete,
        (None, None) => unreachable!("edit pair with both sides absent"),
    }
}
