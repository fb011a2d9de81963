//! End-to-end checks of the binary: flag handling, output routing, and
//! exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn kgeval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgeval"))
        .args(args)
        .env_remove("KGEVAL_ENDPOINT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

const TINY_DATASET: &str = concat!(
    r#"{"id": "ex-1", "text": "t", "gold_triples": [["a", "r", "b"]], "predicted_triples": [["a", "r", "b"]]}"#,
    "\n",
    r#"{"id": "ex-2", "text": "t", "gold_triples": [["c", "r", "d"]], "predicted_raw": "no triples here"}"#,
);

#[test]
fn parse_prints_canonical_list_and_status() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "raw.txt",
        "Here you go: [[\"alan bean\", \"occupation\", \"test pilot\"]] hope that helps",
    );
    let out = kgeval(&["parse", "--in", &input]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains(r#"[["alan bean","occupation","test pilot"]]"#), "{text}");
    assert!(text.contains("status: recovered"), "{text}");
}

#[test]
fn parse_marks_refusals_as_empty_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "raw.txt", "I cannot help with that.");
    let out = kgeval(&["parse", "--in", &input]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("[]"), "{text}");
    assert!(text.contains("status: empty_fallback"), "{text}");
}

#[test]
fn evaluate_prints_a_markdown_row() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = write_file(dir.path(), "data.jsonl", TINY_DATASET);
    let out = kgeval(&["evaluate", "--dataset", &dataset, "--label", "demo"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("| Model | G-F1 | T-F1 | G-BS | GED | Hall. | Omis. | GM-GBS |"), "{text}");
    assert!(text.contains("| demo | 50.00 |"), "{text}");
    assert!(stderr(&out).contains("parsed 1 raw prediction(s), 1 unusable"));
}

#[test]
fn evaluate_routes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = write_file(dir.path(), "data.jsonl", TINY_DATASET);
    let report = dir.path().join("report.csv");
    let out = kgeval(&[
        "evaluate",
        "--dataset",
        &dataset,
        "--format",
        "csv",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&report).unwrap();
    assert!(written.starts_with("label,G-F1,T-F1,G-BS,GED,Hall.,Omis.,GM-GBS,approx_ged"), "{written}");
    assert!(written.contains("model,50.00,"), "{written}");
}

#[test]
fn evaluate_renders_json_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = write_file(dir.path(), "data.jsonl", TINY_DATASET);
    let out = kgeval(&["evaluate", "--dataset", &dataset, "--format", "json"]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["label"], "model");
    assert_eq!(rows[0]["g_f1"], 50.0);
}

#[test]
fn unknown_report_format_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = write_file(dir.path(), "data.jsonl", TINY_DATASET);
    let out = kgeval(&["evaluate", "--dataset", &dataset, "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("markdown, csv, json"), "{}", stderr(&out));
}

#[test]
fn schema_errors_name_the_line_and_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = write_file(
        dir.path(),
        "data.jsonl",
        &format!("{TINY_DATASET}\n{{\"id\": \"ex-3\"}}"),
    );
    let out = kgeval(&["evaluate", "--dataset", &dataset]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn missing_dataset_file_exits_2() {
    let out = kgeval(&["evaluate", "--dataset", "/nonexistent/data.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn remote_provider_without_an_endpoint_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = write_file(dir.path(), "data.jsonl", TINY_DATASET);
    let out = kgeval(&["evaluate", "--dataset", &dataset, "--provider", "remote"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("endpoint"), "{}", stderr(&out));
}

#[test]
fn calibrate_confirms_exact_recovery() {
    let out = kgeval(&[
        "calibrate",
        "--nodes",
        "7",
        "--insertions",
        "2",
        "--deletions",
        "1",
        "--relabels",
        "1",
        "--seed",
        "5",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("expected: 3 hallucinated, 2 omitted"), "{text}");
    assert!(text.contains("recovery: exact"), "{text}");
}

#[test]
fn calibrate_rejects_impossible_plans() {
    let out = kgeval(&["calibrate", "--nodes", "3", "--deletions", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot delete"), "{}", stderr(&out));
}
