//! Node-mapping search: exhaustively optimal under the node cap via
//! branch-and-bound, greedy label matching beyond it.
//!
//! Gold nodes are assigned in sorted label order; at each step the
//! candidate predicted partners are tried in sorted label order with
//! "unmatched" last. Depth-first exploration in that order visits complete
//! mappings lexicographically, and the bound test keeps the first mapping
//! found at the optimal cost, so ties break toward the lexicographically
//! smallest (gold label, pred label) pairing sequence.

use std::collections::{BTreeMap, BTreeSet};

use super::{CostModel, NodeMapping};
use crate::graph::KnowledgeGraph;

pub(super) fn optimal_mapping(
    pred: &KnowledgeGraph,
    gold: &KnowledgeGraph,
    costs: &CostModel,
) -> NodeMapping {
    let mut search = Search::new(pred, gold, costs);
    search.run();
    search
        .best
        .expect("search visits at least the all-unmatched mapping")
}

/// Deterministic upper bound used past the node cap: pair identical labels,
/// then pair leftover labels in sorted order when substitution is cheaper
/// than delete + insert.
pub(super) fn greedy_mapping(
    pred: &KnowledgeGraph,
    gold: &KnowledgeGraph,
    costs: &CostModel,
) -> NodeMapping {
    let gold_nodes: Vec<&String> = gold.nodes().iter().collect();
    let pred_nodes: Vec<&String> = pred.nodes().iter().collect();
    let mut mapping: NodeMapping = vec![None; gold_nodes.len()];
    let mut used = vec![false; pred_nodes.len()];

    let (mut gi, mut pi) = (0, 0);
    while gi < gold_nodes.len() && pi < pred_nodes.len() {
        match gold_nodes[gi].cmp(pred_nodes[pi]) {
            std::cmp::Ordering::Equal => {
                mapping[gi] = Some(pi);
                used[pi] = true;
                gi += 1;
                pi += 1;
            }
            std::cmp::Ordering::Less => gi += 1,
            std::cmp::Ordering::Greater => pi += 1,
        }
    }

    if costs.pairs_unequal_nodes() {
        let free_gold: Vec<usize> = (0..gold_nodes.len())
            .filter(|&g| mapping[g].is_none())
            .collect();
        let free_pred: Vec<usize> = (0..pred_nodes.len()).filter(|&p| !used[p]).collect();
        for (&g, &p) in free_gold.iter().zip(free_pred.iter()) {
            mapping[g] = Some(p);
        }
    }
    mapping
}

struct Search<'a> {
    costs: &'a CostModel,
    k: usize,
    p: usize,
    gold_node_label: Vec<u32>,
    pred_node_label: Vec<u32>,
    /// adj[u][v] = sorted relation ids of edges u -> v
    gold_adj: Vec<Vec<Vec<u32>>>,
    pred_adj: Vec<Vec<Vec<u32>>>,
    /// undecided gold edges at step i: both endpoints assigned only once
    /// every endpoint index is < i
    gold_suffix_edge_count: Vec<usize>,
    gold_suffix_rel_counts: Vec<Vec<u32>>,
    gold_suffix_node_counts: Vec<Vec<u32>>,

    assignment: NodeMapping,
    used: Vec<bool>,
    used_list: Vec<usize>,
    pred_free_node_counts: Vec<u32>,
    pred_undecided_rel_counts: Vec<u32>,
    pred_undecided_total: usize,
    partial: f64,
    best_cost: f64,
    best: Option<NodeMapping>,
}

impl<'a> Search<'a> {
    fn new(pred: &KnowledgeGraph, gold: &KnowledgeGraph, costs: &'a CostModel) -> Self {
        let gold_nodes: Vec<&String> = gold.nodes().iter().collect();
        let pred_nodes: Vec<&String> = pred.nodes().iter().collect();
        let k = gold_nodes.len();
        let p = pred_nodes.len();

        let mut label_ids: BTreeMap<&String, u32> = BTreeMap::new();
        for label in gold.nodes().iter().chain(pred.nodes().iter()) {
            let next = label_ids.len() as u32;
            label_ids.entry(label).or_insert(next);
        }
        let n_labels = label_ids.len();
        // id order must follow relation label order: the adjacency cells
        // below are consumed by a sorted merge walk
        let relations: BTreeSet<&String> = gold
            .edges()
            .iter()
            .chain(pred.edges().iter())
            .map(|e| &e.relation)
            .collect();
        let rel_ids: BTreeMap<&String, u32> = relations
            .into_iter()
            .enumerate()
            .map(|(i, r)| (r, i as u32))
            .collect();
        let n_rels = rel_ids.len();

        let gold_index: BTreeMap<&String, usize> =
            gold_nodes.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let pred_index: BTreeMap<&String, usize> =
            pred_nodes.iter().enumerate().map(|(i, l)| (*l, i)).collect();

        // BTreeSet edge order sorts by (source, relation, target), so each
        // adjacency cell receives its relation ids already sorted
        let mut gold_adj = vec![vec![Vec::new(); k]; k];
        for e in gold.edges() {
            gold_adj[gold_index[&e.source]][gold_index[&e.target]].push(rel_ids[&e.relation]);
        }
        let mut pred_adj = vec![vec![Vec::new(); p]; p];
        for e in pred.edges() {
            pred_adj[pred_index[&e.source]][pred_index[&e.target]].push(rel_ids[&e.relation]);
        }

        let mut gold_suffix_edge_count = vec![0usize; k + 1];
        let mut gold_suffix_rel_counts = vec![vec![0u32; n_rels]; k + 1];
        for i in (0..k).rev() {
            gold_suffix_edge_count[i] = gold_suffix_edge_count[i + 1];
            gold_suffix_rel_counts[i] = gold_suffix_rel_counts[i + 1].clone();
            // edges whose later endpoint is i become undecided at step i
            for (u, row) in gold_adj.iter().enumerate() {
                for (v, rels) in row.iter().enumerate() {
                    if u.max(v) == i {
                        gold_suffix_edge_count[i] += rels.len();
                        for &r in rels {
                            gold_suffix_rel_counts[i][r as usize] += 1;
                        }
                    }
                }
            }
        }

        let gold_node_label: Vec<u32> = gold_nodes.iter().map(|l| label_ids[*l]).collect();
        let pred_node_label: Vec<u32> = pred_nodes.iter().map(|l| label_ids[*l]).collect();
        let mut gold_suffix_node_counts = vec![vec![0u32; n_labels]; k + 1];
        for i in (0..k).rev() {
            gold_suffix_node_counts[i] = gold_suffix_node_counts[i + 1].clone();
            gold_suffix_node_counts[i][gold_node_label[i] as usize] += 1;
        }
        let mut pred_free_node_counts = vec![0u32; n_labels];
        for &l in &pred_node_label {
            pred_free_node_counts[l as usize] += 1;
        }
        let mut pred_undecided_rel_counts = vec![0u32; n_rels];
        let mut pred_undecided_total = 0usize;
        for row in &pred_adj {
            for rels in row {
                pred_undecided_total += rels.len();
                for &r in rels {
                    pred_undecided_rel_counts[r as usize] += 1;
                }
            }
        }

        Search {
            costs,
            k,
            p,
            gold_node_label,
            pred_node_label,
            gold_adj,
            pred_adj,
            gold_suffix_edge_count,
            gold_suffix_rel_counts,
            gold_suffix_node_counts,
            assignment: vec![None; k],
            used: vec![false; p],
            used_list: Vec::with_capacity(p),
            pred_free_node_counts,
            pred_undecided_rel_counts,
            pred_undecided_total,
            partial: 0.0,
            best_cost: f64::INFINITY,
            best: None,
        }
    }

    fn run(&mut self) {
        self.dfs(0);
    }

    fn dfs(&mut self, i: usize) {
        if i == self.k {
            let total = self.partial + self.closing_cost();
            if total < self.best_cost {
                self.best_cost = total;
                self.best = Some(self.assignment.clone());
            }
            return;
        }
        for pj in 0..self.p {
            if self.used[pj] {
                continue;
            }
            self.descend(i, Some(pj));
        }
        self.descend(i, None);
    }

    fn descend(&mut self, i: usize, choice: Option<usize>) {
        let delta = self.apply(i, choice);
        if self.partial + self.lower_bound(i + 1) < self.best_cost {
            self.dfs(i + 1);
        }
        self.unapply(i, choice, delta);
    }

    /// Commits gold node i to `choice`, returning the exact cost of every
    /// element this decision settles: the node pair itself, all gold edges
    /// whose endpoints are now both assigned, and all predicted edges whose
    /// endpoints are now both matched.
    fn apply(&mut self, i: usize, choice: Option<usize>) -> f64 {
        let mut delta = match choice {
            Some(pj) => {
                if self.gold_node_label[i] == self.pred_node_label[pj] {
                    self.costs.node_substitute_equal
                } else {
                    self.costs.node_substitute_unequal
                }
            }
            None => self.costs.node_insert,
        };
        for a in 0..=i {
            let partner = if a == i { choice } else { self.assignment[a] };
            match (choice, partner) {
                (Some(pj), Some(q)) => {
                    if a == i {
                        delta += self.group_cost(&self.gold_adj[i][i], &self.pred_adj[pj][pj]);
                    } else {
                        delta += self.group_cost(&self.gold_adj[i][a], &self.pred_adj[pj][q]);
                        delta += self.group_cost(&self.gold_adj[a][i], &self.pred_adj[q][pj]);
                    }
                }
                _ => {
                    // an unmatched endpoint: these gold edges must be inserted
                    let stranded = if a == i {
                        self.gold_adj[i][i].len()
                    } else {
                        self.gold_adj[i][a].len() + self.gold_adj[a][i].len()
                    };
                    delta += stranded as f64 * self.costs.edge_insert;
                }
            }
        }
        if let Some(pj) = choice {
            self.used[pj] = true;
            self.pred_free_node_counts[self.pred_node_label[pj] as usize] -= 1;
            for idx in 0..self.used_list.len() {
                let q = self.used_list[idx];
                self.retire_pred_rels(pj, q);
                self.retire_pred_rels(q, pj);
            }
            self.retire_pred_rels(pj, pj);
            self.used_list.push(pj);
        }
        self.assignment[i] = choice;
        self.partial += delta;
        delta
    }

    fn unapply(&mut self, i: usize, choice: Option<usize>, delta: f64) {
        self.partial -= delta;
        self.assignment[i] = None;
        if let Some(pj) = choice {
            self.used_list.pop();
            self.restore_pred_rels(pj, pj);
            for idx in (0..self.used_list.len()).rev() {
                let q = self.used_list[idx];
                self.restore_pred_rels(q, pj);
                self.restore_pred_rels(pj, q);
            }
            self.pred_free_node_counts[self.pred_node_label[pj] as usize] += 1;
            self.used[pj] = false;
        }
    }

    fn retire_pred_rels(&mut self, u: usize, v: usize) {
        for &r in &self.pred_adj[u][v] {
            self.pred_undecided_rel_counts[r as usize] -= 1;
            self.pred_undecided_total -= 1;
        }
    }

    fn restore_pred_rels(&mut self, u: usize, v: usize) {
        for &r in &self.pred_adj[u][v] {
            self.pred_undecided_rel_counts[r as usize] += 1;
            self.pred_undecided_total += 1;
        }
    }

    /// Everything left after the last gold node is assigned: unmatched
    /// predicted nodes and every predicted edge touching one.
    fn closing_cost(&self) -> f64 {
        let unused = self.p - self.used_list.len();
        unused as f64 * self.costs.node_delete
            + self.pred_undecided_total as f64 * self.costs.edge_delete
    }

    /// Admissible bound on completing the state: any completion pays at
    /// least the label-mismatch floor for remaining nodes plus the
    /// relation-mismatch floor for undecided edges.
    fn lower_bound(&self, i: usize) -> f64 {
        let c = self.costs;
        let rg = self.k - i;
        let rp = self.p - self.used_list.len();
        let common_nodes: u32 = self.gold_suffix_node_counts[i]
            .iter()
            .zip(&self.pred_free_node_counts)
            .map(|(g, p)| (*g).min(*p))
            .sum();
        let min_n = rg.min(rp);
        let sub_n = c
            .node_substitute_unequal
            .min(c.node_insert + c.node_delete);
        let lb_nodes = (min_n as f64 - common_nodes as f64) * sub_n
            + (rg - min_n) as f64 * c.node_insert
            + (rp - min_n) as f64 * c.node_delete;

        let ug = self.gold_suffix_edge_count[i];
        let up = self.pred_undecided_total;
        let common_edges: u32 = self.gold_suffix_rel_counts[i]
            .iter()
            .zip(&self.pred_undecided_rel_counts)
            .map(|(g, p)| (*g).min(*p))
            .sum();
        let min_e = ug.min(up);
        let sub_e = c
            .edge_substitute_unequal
            .min(c.edge_insert + c.edge_delete);
        let lb_edges = (min_e as f64 - common_edges as f64) * sub_e
            + (ug - min_e) as f64 * c.edge_insert
            + (up - min_e) as f64 * c.edge_delete;

        lb_nodes + lb_edges
    }

    fn group_cost(&self, gold_rels: &[u32], pred_rels: &[u32]) -> f64 {
        let c = self.costs;
        let common = sorted_intersection_count(gold_rels, pred_rels);
        let lg = gold_rels.len() - common;
        let lp = pred_rels.len() - common;
        let mut cost = common as f64 * c.edge_substitute_equal;
        if c.pairs_unequal_edges() {
            let m = lg.min(lp);
            cost += m as f64 * c.edge_substitute_unequal
                + (lg - m) as f64 * c.edge_insert
                + (lp - m) as f64 * c.edge_delete;
        } else {
            cost += lg as f64 * c.edge_insert + lp as f64 * c.edge_delete;
        }
        cost
    }
}

/// Relations within a group are unique, so this is a set intersection.
/// Both inputs must be strictly increasing.
fn sorted_intersection_count(a: &[u32], b: &[u32]) -> usize {
    debug_assert!(a.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(b.windows(2).all(|w| w[0] < w[1]));
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    n
}
