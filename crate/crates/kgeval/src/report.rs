//! Report rendering: one row per evaluated system, in markdown, CSV, or
//! JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// One aggregated line of a report. Percentage columns are on a 0-100
/// scale; `ged` is a raw mean edit cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub label: String,
    pub g_f1: f64,
    pub t_f1: f64,
    pub g_bs: f64,
    pub ged: f64,
    pub hall: f64,
    pub omis: f64,
    pub gm_gbs: f64,
    /// True when at least one edit cost is a greedy upper bound.
    pub approx_ged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Markdown,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::UnknownOption {
                value: other.to_string(),
                expected: "markdown, csv, json",
            }),
        }
    }
}

const COLUMNS: [&str; 8] = ["Model", "G-F1", "T-F1", "G-BS", "GED", "Hall.", "Omis.", "GM-GBS"];

/// Renders rows to the requested format. Numbers are shown with two
/// decimals in every format.
pub fn render_report(rows: &[ReportRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => render_markdown(rows),
        ReportFormat::Csv => render_csv(rows),
        ReportFormat::Json => render_json(rows),
    }
}

fn render_markdown(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    writeln!(out, "| {} |", COLUMNS.join(" | ")).unwrap();
    writeln!(out, "|---|---:|---:|---:|---:|---:|---:|---:|").unwrap();
    for row in rows {
        let marker = if row.approx_ged { "*" } else { "" };
        writeln!(
            out,
            "| {}{} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} |",
            row.label, marker, row.g_f1, row.t_f1, row.g_bs, row.ged, row.hall, row.omis, row.gm_gbs
        )
        .unwrap();
    }
    if rows.iter().any(|r| r.approx_ged) {
        writeln!(
            out,
            "\n\\* edit distance includes greedy upper bounds for graphs over the node cap"
        )
        .unwrap();
    }
    out
}

fn render_csv(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    writeln!(out, "label,G-F1,T-F1,G-BS,GED,Hall.,Omis.,GM-GBS,approx_ged").unwrap();
    for row in rows {
        writeln!(
            out,
            "{},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{}",
            csv_field(&row.label),
            row.g_f1,
            row.t_f1,
            row.g_bs,
            row.ged,
            row.hall,
            row.omis,
            row.gm_gbs,
            row.approx_ged
        )
        .unwrap();
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_json(rows: &[ReportRow]) -> String {
    let rounded: Vec<ReportRow> = rows
        .iter()
        .map(|r| ReportRow {
            label: r.label.clone(),
            g_f1: round2(r.g_f1),
            t_f1: round2(r.t_f1),
            g_bs: round2(r.g_bs),
            ged: round2(r.ged),
            hall: round2(r.hall),
            omis: round2(r.omis),
            gm_gbs: round2(r.gm_gbs),
            approx_ged: r.approx_ged,
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&rounded).expect("row serialization");
    out.push('\n');
    out
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}
