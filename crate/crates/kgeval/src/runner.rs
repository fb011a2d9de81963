//! Per-example evaluation and corpus-level aggregation.

use std::str::FromStr;

use rayon::prelude::*;

use crate::dataset::{ExampleRecord, Prediction};
use crate::error::{Error, Result};
use crate::ged::{ged, rates_from_path, CostModel, RateMode, RateReport, DEFAULT_NODE_CAP};
use crate::graph::{graphs_identical, KnowledgeGraph, NormalizationConfig, Triple};
use crate::matching::{score_from_counts, triple_match, TripleMatchScore};
use crate::parse::{extract_triples, ParseStatus};
use crate::report::ReportRow;
use crate::similarity::{gbs_score, gm_gbs, GbsScore, SimilarityProvider};

/// How per-example scores combine into a corpus number: macro averages the
/// per-example values, micro pools the underlying counts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pooling {
    #[default]
    Macro,
    Micro,
}

impl FromStr for Pooling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "macro" => Ok(Pooling::Macro),
            "micro" => Ok(Pooling::Micro),
            other => Err(Error::UnknownOption {
                value: other.to_string(),
                expected: "macro, micro",
            }),
        }
    }
}

impl FromStr for RateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edges" => Ok(RateMode::Edges),
            "nodes" => Ok(RateMode::Nodes),
            "both" => Ok(RateMode::NodesAndEdges),
            other => Err(Error::UnknownOption {
                value: other.to_string(),
                expected: "edges, nodes, both",
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub normalization: NormalizationConfig,
    pub cost_model: CostModel,
    /// Above this node count the edit distance falls back to a greedy
    /// upper bound and the result is flagged approximate.
    pub node_cap: usize,
    pub rate_mode: RateMode,
    /// Strict cutoff for the soft-match fraction.
    pub threshold: f64,
    pub pooling: Pooling,
    /// Divide each edit cost by the gold graph size (nodes + edges).
    pub normalize_ged: bool,
    /// Worker threads for dataset evaluation; 0 picks the rayon default.
    pub workers: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            normalization: NormalizationConfig::default(),
            cost_model: CostModel::default(),
            node_cap: DEFAULT_NODE_CAP,
            rate_mode: RateMode::Edges,
            threshold: 0.95,
            pooling: Pooling::Macro,
            normalize_ged: false,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleResult {
    pub id: String,
    /// Present only when the prediction arrived as raw text.
    pub parse_status: Option<ParseStatus>,
    pub parse_diagnostics: Vec<String>,
    pub triple_score: TripleMatchScore,
    pub graph_identical: bool,
    pub ged_cost: f64,
    pub ged_exact: bool,
    pub rates: RateReport,
    pub gbs: GbsScore,
    /// Gold nodes + edges, the divisor for normalized edit cost.
    pub gold_size: usize,
}

/// Scores one example end to end: extract (if raw), build both graphs,
/// then run every metric.
///
/// Predicted triples that are left with a mix of empty and non-empty
/// fields after normalization are dropped with a diagnostic rather than
/// failing the example; gold triples are held to the strict rule.
pub fn evaluate_example(
    record: &ExampleRecord,
    provider: &dyn SimilarityProvider,
    cfg: &EvalConfig,
) -> Result<ExampleResult> {
    let (predicted, parse_status, mut diagnostics) = match &record.prediction {
        Prediction::Raw(raw) => {
            let outcome = extract_triples(raw);
            (outcome.triples, Some(outcome.status), outcome.diagnostics)
        }
        Prediction::Triples(triples) => (triples.clone(), None, Vec::new()),
    };

    let (kept, dropped) = drop_partial_triples(predicted, &cfg.normalization);
    if dropped > 0 {
        diagnostics.push(format!(
            "dropped {dropped} predicted triple(s) with a mix of empty and non-empty fields"
        ));
    }

    let pred = KnowledgeGraph::from_triples(&kept, &cfg.normalization)
        .map_err(|e| e.for_example(&record.id))?;
    let gold = KnowledgeGraph::from_triples(&record.gold_triples, &cfg.normalization)
        .map_err(|e| e.for_example(&record.id))?;

    let edit = ged(&pred, &gold, &cfg.cost_model, cfg.node_cap)
        .map_err(|e| e.for_example(&record.id))?;
    let rates = rates_from_path(&edit, cfg.rate_mode);
    let gbs = gbs_score(&pred, &gold, provider).map_err(|e| e.for_example(&record.id))?;

    Ok(ExampleResult {
        id: record.id.clone(),
        parse_status,
        parse_diagnostics: diagnostics,
        triple_score: triple_match(&pred, &gold),
        graph_identical: graphs_identical(&pred, &gold),
        ged_cost: edit.cost,
        ged_exact: edit.exact,
        rates,
        gbs,
        gold_size: gold.size(),
    })
}

fn drop_partial_triples(triples: Vec<Triple>, cfg: &NormalizationConfig) -> (Vec<Triple>, usize) {
    let mut kept = Vec::with_capacity(triples.len());
    let mut dropped = 0;
    for t in triples {
        let empties = [&t.subject, &t.relation, &t.object]
            .iter()
            .filter(|f| crate::graph::normalize_label(f, cfg).is_empty())
            .count();
        if empties == 0 || empties == 3 {
            kept.push(t);
        } else {
            dropped += 1;
        }
    }
    (kept, dropped)
}

/// Evaluates every record, in parallel, returning results sorted by id.
pub fn evaluate_dataset(
    records: &[ExampleRecord],
    provider: &dyn SimilarityProvider,
    cfg: &EvalConfig,
) -> Result<Vec<ExampleResult>> {
    let mut results = if cfg.workers == 1 {
        records
            .iter()
            .map(|r| evaluate_example(r, provider, cfg))
            .collect::<Result<Vec<_>>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::ScoringBackend(format!("thread pool: {e}")))?;
        pool.install(|| {
            records
                .par_iter()
                .map(|r| evaluate_example(r, provider, cfg))
                .collect::<Result<Vec<_>>>()
        })?
    };
    results.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(results)
}

/// Collapses per-example results into one report row.
///
/// The exact-graph and soft-match columns are fractions of examples and
/// ignore pooling; the overlap F1, soft F1, and rate columns honor it.
/// Percentages are reported on a 0-100 scale, edit cost on its raw scale.
pub fn aggregate(results: &[ExampleResult], label: &str, cfg: &EvalConfig) -> Result<ReportRow> {
    if results.is_empty() {
        return Err(Error::EmptyInput("aggregate"));
    }
    let mut ordered: Vec<&ExampleResult> = results.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    let n = ordered.len() as f64;

    let identical = ordered.iter().filter(|r| r.graph_identical).count();
    // fraction first, then the percent scale: the share-of-examples columns
    // (this and the soft-match fraction) stay bitwise comparable
    let g_f1 = 100.0 * (identical as f64 / n);

    let t_f1 = match cfg.pooling {
        Pooling::Macro => {
            100.0 * ordered.iter().map(|r| r.triple_score.f1).sum::<f64>() / n
        }
        Pooling::Micro => {
            let matched: usize = ordered.iter().map(|r| r.triple_score.matched).sum();
            let pred: usize = ordered.iter().map(|r| r.triple_score.predicted_total).sum();
            let gold: usize = ordered.iter().map(|r| r.triple_score.gold_total).sum();
            100.0 * score_from_counts(matched, pred, gold).f1
        }
    };

    let g_bs = match cfg.pooling {
        Pooling::Macro => 100.0 * ordered.iter().map(|r| r.gbs.f1).sum::<f64>() / n,
        Pooling::Micro => 100.0 * pooled_gbs_f1(&ordered),
    };

    let ged = ordered
        .iter()
        .map(|r| {
            if cfg.normalize_ged {
                r.ged_cost / r.gold_size.max(1) as f64
            } else {
                r.ged_cost
            }
        })
        .sum::<f64>()
        / n;

    let (hall, omis) = match cfg.pooling {
        Pooling::Macro => (
            100.0 * ordered.iter().map(|r| r.rates.hall_rate).sum::<f64>() / n,
            100.0 * ordered.iter().map(|r| r.rates.omis_rate).sum::<f64>() / n,
        ),
        Pooling::Micro => {
            let h: usize = ordered.iter().map(|r| r.rates.hallucinated).sum();
            let o: usize = ordered.iter().map(|r| r.rates.omitted).sum();
            let t: usize = ordered.iter().map(|r| r.rates.total).sum();
            let pooled = RateReport::new(h, o, t);
            (100.0 * pooled.hall_rate, 100.0 * pooled.omis_rate)
        }
    };

    let gbs_scores: Vec<GbsScore> = ordered.iter().map(|r| r.gbs).collect();
    let gm = gm_gbs(&gbs_scores, cfg.threshold)?;

    Ok(ReportRow {
        label: label.to_string(),
        g_f1,
        t_f1,
        g_bs,
        ged,
        hall,
        omis,
        gm_gbs: 100.0 * gm.fraction,
        approx_ged: ordered.iter().any(|r| !r.ged_exact),
    })
}

/// Micro-pooled soft F1: precision weighted by predicted edge counts,
/// recall by gold edge counts.
fn pooled_gbs_f1(ordered: &[&ExampleResult]) -> f64 {
    let pred_total: usize = ordered.iter().map(|r| r.triple_score.predicted_total).sum();
    let gold_total: usize = ordered.iter().map(|r| r.triple_score.gold_total).sum();
    let precision = if pred_total == 0 {
        if gold_total == 0 { 1.0 } else { 0.0 }
    } else {
        ordered
            .iter()
            .map(|r| r.gbs.precision * r.triple_score.predicted_total as f64)
            .sum::<f64>()
            / pred_total as f64
    };
    let recall = if gold_total == 0 {
        if pred_total == 0 { 1.0 } else { 0.0 }
    } else {
        ordered
            .iter()
            .map(|r| r.gbs.recall * r.triple_score.gold_total as f64)
            .sum::<f64>()
            / gold_total as f64
    };
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}
