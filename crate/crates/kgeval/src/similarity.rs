//! Soft-overlap metrics over edge sentences, scored by a pluggable
//! similarity backend.
//!
//! Each edge serializes to the sentence "source relation target". For a
//! prediction/gold pair every cross pair of sentences is scored once, in a
//! single backend call; recall averages the per-gold-sentence maxima,
//! precision the per-predicted-sentence maxima.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, KnowledgeGraph};

/// The sentence form of an edge: its three labels joined by single spaces.
pub fn serialize_edge(edge: &Edge) -> String {
    edge.sentence()
}

/// Scores sentence pairs in [0, 1].
pub trait SimilarityProvider: Send + Sync {
    /// Returns exactly one score per input pair, in input order.
    fn score_pairs(&self, pairs: &[(String, String)]) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbsScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl GbsScore {
    fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        GbsScore { precision, recall, f1 }
    }
}

/// Soft precision/recall/F1 for one prediction against its gold graph.
///
/// Both graphs empty scores (1, 1, 1): an empty prediction of an empty gold
/// is exactly right. One side empty scores (0, 0, 0).
pub fn gbs_score(
    pred: &KnowledgeGraph,
    gold: &KnowledgeGraph,
    provider: &dyn SimilarityProvider,
) -> Result<GbsScore> {
    let gold_sentences: Vec<String> = gold.edges().iter().map(serialize_edge).collect();
    let pred_sentences: Vec<String> = pred.edges().iter().map(serialize_edge).collect();
    match (gold_sentences.is_empty(), pred_sentences.is_empty()) {
        (true, true) => return Ok(GbsScore { precision: 1.0, recall: 1.0, f1: 1.0 }),
        (true, false) | (false, true) => {
            return Ok(GbsScore { precision: 0.0, recall: 0.0, f1: 0.0 })
        }
        (false, false) => {}
    }

    let mut pairs = Vec::with_capacity(gold_sentences.len() * pred_sentences.len());
    for g in &gold_sentences {
        for p in &pred_sentences {
            pairs.push((g.clone(), p.clone()));
        }
    }
    let scores = provider.score_pairs(&pairs)?;
    if scores.len() != pairs.len() {
        return Err(Error::Protocol(format!(
            "similarity backend returned {} scores for {} pairs",
            scores.len(),
            pairs.len()
        )));
    }

    let np = pred_sentences.len();
    let mut recall_sum = 0.0;
    for gi in 0..gold_sentences.len() {
        let row = &scores[gi * np..(gi + 1) * np];
        recall_sum += row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    }
    let recall = recall_sum / gold_sentences.len() as f64;

    let mut precision_sum = 0.0;
    for pi in 0..np {
        let mut best = f64::NEG_INFINITY;
        for gi in 0..gold_sentences.len() {
            best = best.max(scores[gi * np + pi]);
        }
        precision_sum += best;
    }
    let precision = precision_sum / np as f64;

    Ok(GbsScore::from_pr(precision, recall))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmGbsSummary {
    pub matched: usize,
    pub total: usize,
    pub fraction: f64,
}

/// Fraction of examples whose soft F1 strictly exceeds `threshold`.
///
/// The threshold must lie in the open interval (0, 1); the comparison is
/// strict, so an F1 exactly at the threshold does not count.
pub fn gm_gbs(scores: &[GbsScore], threshold: f64) -> Result<GmGbsSummary> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("gm_gbs"));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let matched = scores.iter().filter(|s| s.f1 > threshold).count();
    Ok(GmGbsSummary {
        matched,
        total: scores.len(),
        fraction: matched as f64 / scores.len() as f64,
    })
}

/// Offline backend: cosine similarity over padded character-trigram counts.
///
/// Sentences are lowercased and whitespace-tokenized; each token is padded
/// as `^token$` before trigram extraction. Equal strings short-circuit to
/// exactly 1.0.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalProvider;

impl LexicalProvider {
    pub fn new() -> Self {
        LexicalProvider
    }

    fn trigram_counts(sentence: &str) -> BTreeMap<(char, char, char), u32> {
        let mut counts = BTreeMap::new();
        for token in sentence.to_lowercase().split_whitespace() {
            let mut padded: Vec<char> = Vec::with_capacity(token.chars().count() + 2);
            padded.push('^');
            padded.extend(token.chars());
            padded.push('$');
            for w in padded.windows(3) {
                *counts.entry((w[0], w[1], w[2])).or_insert(0) += 1;
            }
        }
        counts
    }

    fn similarity(a: &str, b: &str) -> f64 {
        if a == b {
            return 1.0;
        }
        let ca = Self::trigram_counts(a);
        let cb = Self::trigram_counts(b);
        if ca.is_empty() || cb.is_empty() {
            // no trigrams on one side, and the strings differ
            return 0.0;
        }
        let mut dot = 0.0;
        for (tri, &na) in &ca {
            if let Some(&nb) = cb.get(tri) {
                dot += na as f64 * nb as f64;
            }
        }
        let norm_a: f64 = ca.values().map(|&n| (n as f64) * (n as f64)).sum();
        let norm_b: f64 = cb.values().map(|&n| (n as f64) * (n as f64)).sum();
        dot / (norm_a * norm_b).sqrt()
    }
}

impl SimilarityProvider for LexicalProvider {
    fn score_pairs(&self, pairs: &[(String, String)]) -> Result<Vec<f64>> {
        Ok(pairs.iter().map(|(a, b)| Self::similarity(a, b)).collect())
    }
}

#[derive(Debug, Deserialize)]
struct ScoreResponse {
    scores: Vec<f64>,
}

/// HTTP backend speaking a fixed JSON contract.
///
/// Request: POST `{"pairs": [["a", "b"], ...]}`. Response:
/// `{"scores": [...]}` with one finite score in [0, 1] per pair. Pairs are
/// sent in batches; transient failures (transport errors, timeouts, 5xx,
/// 408/429) are retried with exponential backoff.
pub struct RemoteProvider {
    endpoint: String,
    batch_size: usize,
    retries: u32,
    agent: ureq::Agent,
}

enum BatchFailure {
    Transient(String),
    Fatal(Error),
}

impl RemoteProvider {
    pub const DEFAULT_BATCH_SIZE: usize = 64;
    pub const DEFAULT_RETRIES: u32 = 2;

    pub fn new(endpoint: impl Into<String>, timeout: Duration, batch_size: usize) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        RemoteProvider {
            endpoint: endpoint.into(),
            batch_size: batch_size.max(1),
            retries: Self::DEFAULT_RETRIES,
            agent,
        }
    }

    pub fn with_retries(mut self, retries: u32) -> Self {
        self.retries = retries;
        self
    }

    fn score_batch(&self, batch: &[(String, String)]) -> Result<Vec<f64>> {
        let mut last_transient = String::new();
        for attempt in 0..=self.retries {
            if attempt > 0 {
                let backoff = Duration::from_millis(100u64 << (attempt - 1).min(5));
                std::thread::sleep(backoff);
            }
            match self.try_batch(batch) {
                Ok(scores) => return Ok(scores),
                Err(BatchFailure::Fatal(e)) => return Err(e),
                Err(BatchFailure::Transient(msg)) => last_transient = msg,
            }
        }
        Err(Error::ScoringBackend(format!(
            "{} failed after {} attempts: {}",
            self.endpoint,
            self.retries + 1,
            last_transient
        )))
    }

    fn try_batch(&self, batch: &[(String, String)]) -> std::result::Result<Vec<f64>, BatchFailure> {
        let payload = serde_json::json!({ "pairs": batch });
        let response = self
            .agent
            .post(&self.endpoint)
            .send_json(&payload)
            .map_err(|e| self.classify_send_error(e))?;
        let text = response
            .into_body()
            .read_to_string()
            .map_err(|e| BatchFailure::Transient(format!("reading response body: {e}")))?;
        let parsed: ScoreResponse = serde_json::from_str(&text).map_err(|e| {
            BatchFailure::Fatal(Error::Protocol(format!(
                "{} returned an unparseable score payload ({e}): {}",
                self.endpoint,
                excerpt(&text)
            )))
        })?;
        if parsed.scores.len() != batch.len() {
            return Err(BatchFailure::Fatal(Error::Protocol(format!(
                "{} returned {} scores for {} pairs: {}",
                self.endpoint,
                parsed.scores.len(),
                batch.len(),
                excerpt(&text)
            ))));
        }
        for &s in &parsed.scores {
            if !s.is_finite() || !(0.0..=1.0).contains(&s) {
                return Err(BatchFailure::Fatal(Error::Protocol(format!(
                    "{} returned a score outside [0, 1]: {s}",
                    self.endpoint
                ))));
            }
        }
        Ok(parsed.scores)
    }

    fn classify_send_error(&self, e: ureq::Error) -> BatchFailure {
        match e {
            ureq::Error::StatusCode(code) if code >= 500 || code == 408 || code == 429 => {
                BatchFailure::Transient(format!("HTTP {code}"))
            }
            ureq::Error::StatusCode(code) => BatchFailure::Fatal(Error::ScoringBackend(format!(
                "{} rejected the request with HTTP {code}",
                self.endpoint
            ))),
            other => BatchFailure::Transient(other.to_string()),
        }
    }
}

impl SimilarityProvider for RemoteProvider {
    fn score_pairs(&self, pairs: &[(String, String)]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(pairs.len());
        for batch in pairs.chunks(self.batch_size) {
            out.extend(self.score_batch(batch)?);
        }
        Ok(out)
    }
}

fn excerpt(text: &str) -> String {
    const LIMIT: usize = 200;
    let trimmed = text.trim();
    if trimmed.len() <= LIMIT {
        trimmed.to_string()
    } else {
        let mut cut = LIMIT;
        while !trimmed.is_char_boundary(cut) {
            cut -= 1;
        }
        format!("{}...", &trimmed[..cut])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{NormalizationConfig, Triple};

    fn graph(edges: &[(&str, &str, &str)]) -> KnowledgeGraph {
        let triples: Vec<Triple> = edges
            .iter()
            .map(|(s, r, o)| Triple::new(*s, *r, *o))
            .collect();
        KnowledgeGraph::from_triples(&triples, &NormalizationConfig::default()).unwrap()
    }

    #[test]
    fn equal_sentences_score_exactly_one() {
        assert_eq!(LexicalProvider::similarity("alan bean test pilot", "alan bean test pilot"), 1.0);
        assert_eq!(LexicalProvider::similarity("", ""), 1.0);
    }

    #[test]
    fn near_paraphrase_scores_high() {
        // pinned: independently computed from the trigram-cosine definition
        let got = LexicalProvider::similarity(
            "alan bean occupation test pilot",
            "alan bean job test pilot",
        );
        assert!((got - 0.752217203341651).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn disjoint_sentences_score_zero() {
        assert_eq!(
            LexicalProvider::similarity("alan bean occupation test pilot", "x y z"),
            0.0
        );
    }

    #[test]
    fn empty_versus_nonempty_scores_zero() {
        assert_eq!(LexicalProvider::similarity("", "alan bean"), 0.0);
        assert_eq!(LexicalProvider::similarity("   ", "alan bean"), 0.0);
    }

    #[test]
    fn scores_are_symmetric_and_bounded() {
        let samples = ["alan bean", "bean alan", "a", "ab", "abc def", ""];
        for a in samples {
            for b in samples {
                let ab = LexicalProvider::similarity(a, b);
                let ba = LexicalProvider::similarity(b, a);
                assert_eq!(ab, ba, "{a:?} vs {b:?}");
                assert!((0.0..=1.0).contains(&ab), "{a:?} vs {b:?} gave {ab}");
            }
        }
    }

    #[test]
    fn gbs_fixture() {
        // pinned: cross-pair maxima computed independently
        let gold = graph(&[
            ("alan bean", "occupation", "test pilot"),
            ("alan bean", "nationality", "united states"),
        ]);
        let pred = graph(&[("alan bean", "occupation", "test pilot")]);
        let s = gbs_score(&pred, &gold, &LexicalProvider::new()).unwrap();
        assert_eq!(s.precision, 1.0);
        assert!((s.recall - 0.7262778643423325).abs() < 1e-12, "recall {}", s.recall);
        assert!((s.f1 - 0.84143796238623).abs() < 1e-12, "f1 {}", s.f1);
    }

    #[test]
    fn gbs_identical_graphs_scores_exact_one() {
        let g = graph(&[("a", "r", "b"), ("c", "r", "d")]);
        let s = gbs_score(&g, &g, &LexicalProvider::new()).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn gbs_empty_sides() {
        let g = graph(&[("a", "r", "b")]);
        let empty = KnowledgeGraph::default();
        let s = gbs_score(&empty, &g, &LexicalProvider::new()).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        let s = gbs_score(&g, &empty, &LexicalProvider::new()).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        let s = gbs_score(&empty, &empty, &LexicalProvider::new()).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn gm_gbs_is_strict() {
        let f1s = [1.0, 0.96, 0.95, 0.80];
        let scores: Vec<GbsScore> = f1s
            .iter()
            .map(|&f1| GbsScore { precision: f1, recall: f1, f1 })
            .collect();
        let summary = gm_gbs(&scores, 0.95).unwrap();
        assert_eq!(summary.matched, 2);
        assert_eq!(summary.total, 4);
        assert_eq!(summary.fraction, 0.5);
    }

    #[test]
    fn gm_gbs_rejects_bad_inputs() {
        let one = [GbsScore { precision: 1.0, recall: 1.0, f1: 1.0 }];
        assert!(matches!(gm_gbs(&[], 0.95), Err(Error::EmptyInput(_))));
        assert!(matches!(gm_gbs(&one, 0.0), Err(Error::InvalidThreshold(_))));
        assert!(matches!(gm_gbs(&one, 1.0), Err(Error::InvalidThreshold(_))));
        assert!(matches!(gm_gbs(&one, -0.5), Err(Error::InvalidThreshold(_))));
        assert!(gm_gbs(&one, 0.5).is_ok());
    }

    #[test]
    fn edge_sentence_form() {
        let e = Edge::new("alan bean", "occupation", "test pilot");
        assert_eq!(serialize_edge(&e), "alan bean occupation test pilot");
    }

    #[test]
    fn excerpt_truncates_on_char_boundary() {
        let long = "é".repeat(300);
        let cut = excerpt(&long);
        assert!(cut.len() <= 203);
        assert!(cut.ends_with("..."));
        assert_eq!(excerpt("short"), "short");
    }
}
