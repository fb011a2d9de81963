//! Evaluation toolkit for knowledge-graph construction.
//!
//! Takes model-emitted triples (structured, or recovered from noisy raw
//! text), builds normalized labeled graphs, and scores them against gold
//! graphs: exact triple overlap, identical-graph fraction, soft similarity
//! over edge sentences, and graph edit distance with optimal edit paths
//! from which hallucination and omission rates are read off.

pub mod calibrate;
pub mod dataset;
pub mod error;
pub mod ged;
pub mod graph;
pub mod matching;
pub mod parse;
pub mod report;
pub mod runner;
pub mod similarity;

pub use error::{Error, Result};
pub use graph::{
    graphs_identical, normalize_label, Edge, KnowledgeGraph, NormalizationConfig, Triple,
};
