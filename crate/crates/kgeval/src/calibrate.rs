//! Seeded graph perturbation with known ground-truth error counts, used to
//! check that measured hallucination/omission rates recover what was
//! injected.
//!
//! A plan inserts `insertions` brand-new edges (fresh endpoints, fresh
//! relations), deletes `deletions` existing edges, and rewrites the
//! relation of `relabels` surviving edges to a fresh label. Because every
//! introduced label is new, the expected edge-level outcome is exact:
//! `insertions + relabels` hallucinated pairs and `deletions + relabels`
//! omitted pairs out of `edges + insertions + relabels` total.
//!
//! That arithmetic relies on the gold graph having distinct relation
//! labels (duplicates would let rewritten edges pair up elsewhere), so
//! `perturb` rejects golds that reuse a relation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ged::{ged, rates_from_path, CostModel, RateMode, RateReport, DEFAULT_NODE_CAP};
use crate::graph::{Edge, KnowledgeGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerturbationPlan {
    pub seed: u64,
    pub insertions: usize,
    pub deletions: usize,
    pub relabels: usize,
}

/// Applies the plan to `gold`, returning the perturbed graph and the rate
/// report an exact edge-level measurement is expected to produce.
pub fn perturb(gold: &KnowledgeGraph, plan: &PerturbationPlan) -> Result<(KnowledgeGraph, RateReport)> {
    let edges: Vec<Edge> = gold.edges().iter().cloned().collect();
    let relations: BTreeSet<&str> = edges.iter().map(|e| e.relation.as_str()).collect();
    if relations.len() != edges.len() {
        return Err(Error::InvalidPlan(
            "gold graph reuses a relation label; expected counts need distinct relations".into(),
        ));
    }
    if plan.deletions > edges.len() {
        return Err(Error::InvalidPlan(format!(
            "cannot delete {} of {} edges",
            plan.deletions,
            edges.len()
        )));
    }
    let surviving = edges.len() - plan.deletions;
    if plan.relabels > surviving {
        return Err(Error::InvalidPlan(format!(
            "cannot relabel {} of {} surviving edges",
            plan.relabels, surviving
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let deleted: BTreeSet<usize> = rand::seq::index::sample(&mut rng, edges.len(), plan.deletions)
        .into_iter()
        .collect();
    let survivors: Vec<Edge> = edges
        .iter()
        .enumerate()
        .filter(|(i, _)| !deleted.contains(i))
        .map(|(_, e)| e.clone())
        .collect();
    let relabeled: BTreeSet<usize> = rand::seq::index::sample(&mut rng, survivors.len(), plan.relabels)
        .into_iter()
        .collect();

    let mut taken: BTreeSet<String> = gold.nodes().iter().cloned().collect();
    taken.extend(relations.iter().map(|r| r.to_string()));
    let mut counter = 0usize;
    let mut fresh = move |kind: &str| -> String {
        loop {
            let label = format!("{kind} {counter:02}");
            counter += 1;
            if taken.insert(label.clone()) {
                return label;
            }
        }
    };

    let mut pred_edges = Vec::with_capacity(survivors.len() + plan.insertions);
    for (i, e) in survivors.into_iter().enumerate() {
        if relabeled.contains(&i) {
            pred_edges.push(Edge {
                relation: fresh("rewritten relation"),
                ..e
            });
        } else {
            pred_edges.push(e);
        }
    }
    for _ in 0..plan.insertions {
        let source = fresh("added node");
        let target = fresh("added node");
        pred_edges.push(Edge::new(source, fresh("added relation"), target));
    }

    let expected = RateReport::new(
        plan.insertions + plan.relabels,
        plan.deletions + plan.relabels,
        edges.len() + plan.insertions + plan.relabels,
    );
    Ok((KnowledgeGraph::from_edges(pred_edges), expected))
}

/// Perturbs `gold`, measures edge-level rates along an exact optimal edit
/// path, and reports whether they equal the injected counts.
pub fn recovery_check(gold: &KnowledgeGraph, plan: &PerturbationPlan) -> Result<bool> {
    let (pred, expected) = perturb(gold, plan)?;
    // lift the cap so the search stays exact regardless of graph size
    let cap = DEFAULT_NODE_CAP
        .max(gold.node_count())
        .max(pred.node_count());
    let edit = ged(&pred, gold, &CostModel::default(), cap)?;
    debug_assert!(edit.exact);
    let measured = rates_from_path(&edit, RateMode::Edges);
    Ok(measured == expected)
}

/// Deterministic gold graph: a chain over `nodes` entities plus a few
/// seeded extra edges, every label distinct.
pub fn synthetic_gold(nodes: usize, seed: u64) -> KnowledgeGraph {
    use rand::Rng;

    if nodes == 0 {
        return KnowledgeGraph::default();
    }
    let labels: Vec<String> = (0..nodes).map(|i| format!("entity {i:02}")).collect();
    let mut relation = 0usize;
    let mut edges = Vec::new();
    for i in 0..nodes - 1 {
        edges.push(Edge::new(
            labels[i].clone(),
            format!("relation {relation:02}"),
            labels[i + 1].clone(),
        ));
        relation += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..nodes / 3 {
        let u = rng.random_range(0..nodes);
        let v = rng.random_range(0..nodes);
        edges.push(Edge::new(
            labels[u].clone(),
            format!("relation {relation:02}"),
            labels[v].clone(),
        ));
        relation += 1;
    }
    KnowledgeGraph::from_edges(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_graph_shape() {
        let g = synthetic_gold(6, 7);
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 5 + 2);
        let relations: BTreeSet<&str> = g.edges().iter().map(|e| e.relation.as_str()).collect();
        assert_eq!(relations.len(), g.edge_count());
        assert_eq!(synthetic_gold(6, 7), synthetic_gold(6, 7));
        assert!(synthetic_gold(0, 1).is_empty());
    }

    #[test]
    fn perturb_is_deterministic_per_seed() {
        let gold = synthetic_gold(8, 3);
        let plan = PerturbationPlan { seed: 11, insertions: 2, deletions: 2, relabels: 1 };
        let (a, _) = perturb(&gold, &plan).unwrap();
        let (b, _) = perturb(&gold, &plan).unwrap();
        assert_eq!(a, b);
        let (c, _) = perturb(&gold, &PerturbationPlan { seed: 12, ..plan }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn expected_counts() {
        let gold = synthetic_gold(8, 3);
        let e = gold.edge_count();
        let plan = PerturbationPlan { seed: 5, insertions: 3, deletions: 2, relabels: 2 };
        let (pred, expected) = perturb(&gold, &plan).unwrap();
        assert_eq!(expected.hallucinated, 5);
        assert_eq!(expected.omitted, 4);
        assert_eq!(expected.total, e + 5);
        assert_eq!(pred.edge_count(), e - 2 + 3);
    }

    #[test]
    fn identity_plan_changes_nothing() {
        let gold = synthetic_gold(5, 9);
        let plan = PerturbationPlan { seed: 1, insertions: 0, deletions: 0, relabels: 0 };
        let (pred, expected) = perturb(&gold, &plan).unwrap();
        assert_eq!(pred, gold);
        assert_eq!((expected.hallucinated, expected.omitted), (0, 0));
        assert_eq!(expected.total, gold.edge_count());
        assert!(recovery_check(&gold, &plan).unwrap());
    }

    #[test]
    fn recovery_on_mixed_plan() {
        let gold = synthetic_gold(7, 21);
        let plan = PerturbationPlan { seed: 4, insertions: 2, deletions: 1, relabels: 1 };
        assert!(recovery_check(&gold, &plan).unwrap());
    }

    #[test]
    fn oversized_plans_are_rejected() {
        let gold = synthetic_gold(4, 2);
        let e = gold.edge_count();
        let too_many_deletions =
            PerturbationPlan { seed: 0, insertions: 0, deletions: e + 1, relabels: 0 };
        assert!(matches!(perturb(&gold, &too_many_deletions), Err(Error::InvalidPlan(_))));
        let too_many_relabels =
            PerturbationPlan { seed: 0, insertions: 0, deletions: 1, relabels: e };
        assert!(matches!(perturb(&gold, &too_many_relabels), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn duplicate_relations_are_rejected() {
        let gold = KnowledgeGraph::from_edges(vec![
            Edge::new("a", "r", "b"),
            Edge::new("c", "r", "d"),
        ]);
        let plan = PerturbationPlan { seed: 0, insertions: 1, deletions: 0, relabels: 0 };
        assert!(matches!(perturb(&gold, &plan), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn empty_gold_supports_insertions() {
        let gold = KnowledgeGraph::default();
        let plan = PerturbationPlan { seed: 3, insertions: 2, deletions: 0, relabels: 0 };
        let (pred, expected) = perturb(&gold, &plan).unwrap();
        assert_eq!(pred.edge_count(), 2);
        assert_eq!((expected.hallucinated, expected.omitted, expected.total), (2, 0, 2));
        assert!(recovery_check(&gold, &plan).unwrap());
    }
}
