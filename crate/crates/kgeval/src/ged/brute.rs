//! Exhaustive reference implementation, deliberately kept separate from the
//! branch-and-bound engine: it enumerates every injective node mapping and
//! prices each one with its own straightforward evaluator.

use std::collections::{BTreeMap, BTreeSet};

use super::{CostModel, EditPair, EditResult, BRUTE_FORCE_NODE_LIMIT};
use crate::error::{Error, Result};
use crate::graph::{Edge, KnowledgeGraph};

/// Optimal edit path by exhaustive enumeration. Only for small graphs;
/// intended as a test oracle for the search engine.
pub fn brute_force_ged(
    pred: &KnowledgeGraph,
    gold: &KnowledgeGraph,
    costs: &CostModel,
) -> Result<EditResult> {
    costs.validate()?;
    for g in [pred, gold] {
        if g.node_count() > BRUTE_FORCE_NODE_LIMIT {
            return Err(Error::GraphTooLarge {
                nodes: g.node_count(),
                cap: BRUTE_FORCE_NODE_LIMIT,
            });
        }
    }

    let gold_nodes: Vec<&String> = gold.nodes().iter().collect();
    let pred_nodes: Vec<&String> = pred.nodes().iter().collect();
    let mut current: Vec<Option<usize>> = vec![None; gold_nodes.len()];
    let mut used = vec![false; pred_nodes.len()];
    let mut best: Option<(f64, Vec<Option<usize>>)> = None;

    // same visiting order as the engine: gold labels ascending, candidate
    // pred labels ascending, unmatched last; first strict improvement wins,
    // so the kept optimum is the lexicographically smallest one
    enumerate(
        &mut current,
        &mut used,
        0,
        &mut |mapping: &[Option<usize>]| {
            let cost = mapping_cost(pred, gold, costs, &gold_nodes, &pred_nodes, mapping);
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                best = Some((cost, mapping.to_vec()));
            }
        },
    );

    let (cost, mapping) = best.expect("at least the empty mapping is enumerated");
    let (node_pairs, edge_pairs) = build_pairs(pred, gold, costs, &gold_nodes, &pred_nodes, &mapping);
    Ok(EditResult {
        cost,
        node_pairs,
        edge_pairs,
        exact: true,
    })
}

fn enumerate(
    current: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    gi: usize,
    visit: &mut impl FnMut(&[Option<usize>]),
) {
    if gi == current.len() {
        visit(current);
        return;
    }
    for pj in 0..used.len() {
        if !used[pj] {
            current[gi] = Some(pj);
            used[pj] = true;
            enumerate(current, used, gi + 1, visit);
            used[pj] = false;
        }
    }
    current[gi] = None;
    enumerate(current, used, gi + 1, visit);
}

fn mapping_cost(
    pred: &KnowledgeGraph,
    gold: &KnowledgeGraph,
    costs: &CostModel,
    gold_nodes: &[&String],
    pred_nodes: &[&String],
    mapping: &[Option<usize>],
) -> f64 {
    let mut cost = 0.0;
    for (gi, choice) in mapping.iter().enumerate() {
        cost += match choice {
            Some(pj) if gold_nodes[gi] == pred_nodes[*pj] => costs.node_substitute_equal,
            Some(_) => costs.node_substitute_unequal,
            None => costs.node_insert,
        };
    }
    let mapped: BTreeSet<usize> = mapping.iter().flatten().copied().collect();
    cost += (pred_nodes.len() - mapped.len()) as f64 * costs.node_delete;

    let image: BTreeMap<&String, &String> = mapping
        .iter()
        .enumerate()
        .filter_map(|(gi, c)| c.map(|pj| (gold_nodes[gi], pred_nodes[pj])))
        .collect();
    let preimage: BTreeMap<&String, &String> = image.iter().map(|(g, p)| (*p, *g)).collect();

    // relation sets per aligned endpoint pair, keyed by gold labels
    let mut groups: BTreeMap<(&String, &String), (BTreeSet<&String>, BTreeSet<&String>)> =
        BTreeMap::new();
    for e in gold.edges() {
        if image.contains_key(&e.source) && image.contains_key(&e.target) {
            groups
                .entry((&e.source, &e.target))
                .or_default()
                .0
                .insert(&e.relation);
        } else {
            cost += costs.edge_insert;
        }
    }
    for e in pred.edges() {
        match (preimage.get(&e.source), preimage.get(&e.target)) {
            (Some(gs), Some(gt)) => {
                groups.entry((gs, gt)).or_default().1.insert(&e.relation);
            }
            _ => cost += costs.edge_delete,
        }
    }
    for (gold_rels, pred_rels) in groups.values() {
        let common = gold_rels.intersection(pred_rels).count();
        let lg = gold_rels.len() - common;
        let lp = pred_rels.len() - common;
        cost += common as f64 * costs.edge_substitute_equal;
        if costs.pairs_unequal_edges() {
            let m = lg.min(lp);
            cost += m as f64 * costs.edge_substitute_unequal
                + (lg - m) as f64 * costs.edge_insert
                + (lp - m) as f64 * costs.edge_delete;
        } else {
            cost += lg as f64 * costs.edge_insert + lp as f64 * costs.edge_delete;
        }
    }
    cost
}

fn build_pairs(
    pred: &KnowledgeGraph,
    gold: &KnowledgeGraph,
    costs: &CostModel,
    gold_nodes: &[&String],
    pred_nodes: &[&String],
    mapping: &[Option<usize>],
) -> (Vec<EditPair<String>>, Vec<EditPair<Edge>>) {
    let mut node_pairs = Vec::new();
    let mut matched = vec![false; pred_nodes.len()];
    for (gi, choice) in mapping.iter().enumerate() {
        let pred_side = choice.map(|pj| {
            matched[pj] = true;
            pred_nodes[pj].clone()
        });
        node_pairs.push(EditPair {
            gold: Some(gold_nodes[gi].clone()),
            pred: pred_side,
        });
    }
    for (pj, m) in matched.iter().enumerate() {
        if !m {
            node_pairs.push(EditPair {
                gold: None,
                pred: Some(pred_nodes[pj].clone()),
            });
        }
    }
    node_pairs.sort();

    let image: BTreeMap<&String, &String> = mapping
        .iter()
        .enumerate()
        .filter_map(|(gi, c)| c.map(|pj| (gold_nodes[gi], pred_nodes[pj])))
        .collect();
    let preimage: BTreeMap<&String, &String> = image.iter().map(|(g, p)| (*p, *g)).collect();

    let mut edge_pairs: Vec<EditPair<Edge>> = Vec::new();
    let mut groups: BTreeMap<(&String, &String), (Vec<&Edge>, Vec<&Edge>)> = BTreeMap::new();
    for e in gold.edges() {
        if image.contains_key(&e.source) && image.contains_key(&e.target) {
            groups.entry((&e.source, &e.target)).or_default().0.push(e);
        } else {
            edge_pairs.push(EditPair {
                gold: Some(e.clone()),
                pred: None,
            });
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
    for (_, (gold_edges, pred_edges)) in groups {
        let mut pred_taken = vec![false; pred_edges.len()];
        let mut gold_left: Vec<&Edge> = Vec::new();
        for ge in gold_edges {
            match (0..pred_edges.len())
                .find(|&i| !pred_taken[i] && pred_edges[i].relation == ge.relation)
            {
                Some(i) => {
                    pred_taken[i] = true;
                    edge_pairs.push(EditPair {
                        gold: Some(ge.clone()),
                        pred: Some(pred_edges[i].clone()),
                    });
                }
                None => gold_left.push(ge),
            }
        }
        let mut pred_left: Vec<&Edge> = pred_edges
            .iter()
            .zip(&pred_taken)
            .filter(|(_, taken)| !**taken)
            .map(|(e, _)| *e)
            .collect();
        gold_left.sort();
        pred_left.sort();
        if costs.pairs_unequal_edges() {
            let m = gold_left.len().min(pred_left.len());
            for i in 0..m {
                edge_pairs.push(EditPair {
                    gold: Some(gold_left[i].clone()),
                    pred: Some(pred_left[i].clone()),
                });
            }
            gold_left.drain(..m);
            pred_left.drain(..m);
        }
        for ge in gold_left {
            edge_pairs.push(EditPair {
                gold: Some(ge.clone()),
                pred: None,
            });
        }
        for pe in pred_left {
            edge_pairs.push(EditPair {
                gold: None,
                pred: Some(pe.clone()),
            });
        }
    }
    edge_pairs.sort();
    (node_pairs, edge_pairs)
}
