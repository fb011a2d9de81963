//! Line-delimited JSON datasets: one example per line, each carrying gold
//! triples and exactly one form of prediction (raw model output or
//! already-structured triples).

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::Triple;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prediction {
    /// Unparsed model output; the triple extractor runs on it.
    Raw(String),
    /// Pre-structured triples; extraction is skipped.
    Triples(Vec<Triple>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleRecord {
    pub id: String,
    pub text: String,
    pub gold_triples: Vec<Triple>,
    pub prediction: Prediction,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    text: String,
    gold_triples: Vec<[String; 3]>,
    #[serde(default)]
    predicted_raw: Option<String>,
    #[serde(default)]
    predicted_triples: Option<Vec<[String; 3]>>,
}

/// Loads a dataset file, validating every line.
///
/// Blank lines are skipped. Errors name the offending 1-based line:
/// unparseable JSON, unknown or missing fields, both or neither prediction
/// form, a gold triple with a blank field, or a duplicated id.
pub fn load_dataset(path: &Path) -> Result<Vec<ExampleRecord>> {
    let contents = std::fs::read_to_string(path)?;
    parse_dataset(&contents)
}

fn parse_dataset(contents: &str) -> Result<Vec<ExampleRecord>> {
    let mut records = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (idx, raw_line) in contents.lines().enumerate() {
        let line = idx + 1;
        if raw_line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(raw_line).map_err(|e| Error::Schema {
            line,
            message: e.to_string(),
        })?;
        if raw.id.trim().is_empty() {
            return Err(Error::Schema { line, message: "id must be non-empty".into() });
        }
        if let Some(&first_line) = seen.get(&raw.id) {
            return Err(Error::DuplicateId { id: raw.id, first_line, line });
        }
        seen.insert(raw.id.clone(), line);

        for (i, t) in raw.gold_triples.iter().enumerate() {
            if t.iter().any(|f| f.trim().is_empty()) {
                return Err(Error::Schema {
                    line,
                    message: format!("gold_triples[{i}] has a blank field"),
                });
            }
        }

        let prediction = match (raw.predicted_raw, raw.predicted_triples) {
            (Some(_), Some(_)) => {
                return Err(Error::Schema {
                    line,
                    message: "predicted_raw and predicted_triples are mutually exclusive".into(),
                })
            }
            (None, None) => {
                return Err(Error::Schema {
                    line,
                    message: "one of predicted_raw or predicted_triples is required".into(),
                })
            }
            (Some(raw_text), None) => Prediction::Raw(raw_text),
            (None, Some(triples)) => {
                Prediction::Triples(triples.into_iter().map(Triple::from).collect())
            }
        };

        records.push(ExampleRecord {
            id: raw.id,
            text: raw.text,
            gold_triples: raw.gold_triples.into_iter().map(Triple::from).collect(),
            prediction,
        });
    }
    Ok(records)
}
