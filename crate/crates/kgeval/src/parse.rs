//! Recovery of triple lists from raw model text.
//!
//! Total: any input yields an outcome. Accepted forms are tried in a fixed
//! priority order and the first form that yields triples wins: a clean
//! bracketed list spanning the whole input, bracketed lists embedded in
//! surrounding text (fenced code blocks are unwrapped first), parenthesized
//! 3-tuples, then pipe-delimited lines. Disjoint occurrences of the winning
//! form are concatenated in document order.

use crate::error::{Error, Result};
use crate::graph::Triple;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseStatus {
    /// The entire input, modulo surrounding whitespace, was a well-formed
    /// triple list.
    Clean,
    /// Triples were salvaged through one of the recovery rules.
    Recovered,
    /// Nothing recoverable; the prediction is treated as an empty graph.
    EmptyFallback,
}

impl ParseStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParseStatus::Clean => "clean",
            ParseStatus::Recovered => "recovered",
            ParseStatus::EmptyFallback => "empty_fallback",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub triples: Vec<Triple>,
    pub status: ParseStatus,
    /// Human-readable notes about what was recovered or skipped.
    pub diagnostics: Vec<String>,
}

/// The canonical text form of a triple list: double quotes, no trailing
/// comma, no whitespace outside labels.
pub fn canonical_triple_list(triples: &[Triple]) -> String {
    let rows: Vec<[String; 3]> = triples.iter().cloned().map(Into::into).collect();
    serde_json::to_string(&rows).expect("string arrays always serialize")
}

/// True iff the entire input (modulo surrounding whitespace) is a
/// well-formed triple list, i.e. `extract_triples` would report it clean.
pub fn is_well_formed(raw: &str) -> bool {
    parse_strict(raw).is_some()
}

/// Fraction of outcomes that did not fall back to empty.
pub fn parse_rate(outcomes: &[ParseOutcome]) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput("parse_rate"));
    }
    let usable = outcomes
        .iter()
        .filter(|o| o.status != ParseStatus::EmptyFallback)
        .count();
    Ok(usable as f64 / outcomes.len() as f64)
}

/// Extracts whatever triples the text contains. Never fails: text with no
/// recoverable triple structure comes back as an empty-fallback outcome.
pub fn extract_triples(raw: &str) -> ParseOutcome {
    if let Some(triples) = parse_strict(raw) {
        return ParseOutcome {
            triples,
            status: ParseStatus::Clean,
            diagnostics: Vec::new(),
        };
    }

    let mut diagnostics = Vec::new();
    let (text, had_fences) = unwrap_fences(raw);
    if had_fences {
        diagnostics.push("unwrapped fenced code block".to_string());
    }
    let chars: Vec<char> = text.chars().collect();

    let triples = scan_bracket_groups(&chars, &mut diagnostics);
    if !triples.is_empty() {
        diagnostics.insert(
            0,
            format!(
                "recovered {} triple(s) from bracketed list structure(s)",
                triples.len()
            ),
        );
        return recovered(triples, diagnostics);
    }

    let triples = scan_tuples(&chars);
    if !triples.is_empty() {
        diagnostics.insert(
            0,
            format!(
                "recovered {} triple(s) from parenthesized tuple(s)",
                triples.len()
            ),
        );
        return recovered(triples, diagnostics);
    }

    let triples = scan_pipe_lines(&text);
    if !triples.is_empty() {
        diagnostics.insert(
            0,
            format!(
                "recovered {} triple(s) from pipe-delimited line(s)",
                triples.len()
            ),
        );
        return recovered(triples, diagnostics);
    }

    diagnostics.push("no recoverable triple structure; treating as empty prediction".to_string());
    ParseOutcome {
        triples: Vec::new(),
        status: ParseStatus::EmptyFallback,
        diagnostics,
    }
}

fn recovered(triples: Vec<Triple>, diagnostics: Vec<String>) -> ParseOutcome {
    ParseOutcome {
        triples,
        status: ParseStatus::Recovered,
        diagnostics,
    }
}

/// Strict layer: the canonical form is a JSON array of 3-string arrays, so
/// the clean check is exactly a full-input JSON parse.
fn parse_strict(raw: &str) -> Option<Vec<Triple>> {
    let rows: Vec<[String; 3]> = serde_json::from_str(raw.trim()).ok()?;
    Some(rows.into_iter().map(Into::into).collect())
}

/// Replaces fenced code blocks with their contents, dropping the fence
/// markers and any language tag on the opening line.
fn unwrap_fences(raw: &str) -> (String, bool) {
    if !raw.contains("```") {
        return (raw.to_string(), false);
    }
    let mut out = String::with_capacity(raw.len());
    for (i, part) in raw.split("```").enumerate() {
        if i % 2 == 0 {
            out.push_str(part);
        } else {
            // inside a fence; an unterminated final fence still lands here
            match part.split_once('\n') {
                Some((first, rest))
                    if first
                        .trim()
                        .chars()
                        .all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '+') =>
                {
                    out.push_str(rest);
                }
                _ => out.push_str(part),
            }
            out.push(' ');
        }
    }
    (out, true)
}

#[derive(Debug)]
enum Item {
    Scalar { text: String, quoted: bool },
    Group(Vec<Item>),
}

/// Scans for balanced bracket groups anywhere in the text and collects the
/// triples they contain. An unbalanced opening bracket is skipped so that
/// complete groups nested inside it are still found.
fn scan_bracket_groups(chars: &[char], diagnostics: &mut Vec<String>) -> Vec<Triple> {
    let mut triples = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '[' {
            if let Some((items, end)) = parse_group(chars, i) {
                collect_triples(&items, 0, &mut triples, diagnostics);
                i = end + 1;
                continue;
            }
        }
        i += 1;
    }
    triples
}

/// Parses one balanced `[...]` group starting at `open`. Tolerates trailing
/// and repeated commas, single- or double-quoted labels, and bare labels.
fn parse_group(chars: &[char], open: usize) -> Option<(Vec<Item>, usize)> {
    let mut items = Vec::new();
    let mut i = open + 1;
    loop {
        while i < chars.len() && (chars[i].is_whitespace() || chars[i] == ',') {
            i += 1;
        }
        if i >= chars.len() {
            return None;
        }
        match chars[i] {
            ']' => return Some((items, i)),
            '[' => {
                let (sub, end) = parse_group(chars, i)?;
                items.push(Item::Group(sub));
                i = end + 1;
            }
            '"' | '\'' => {
                let (text, end) = parse_quoted(chars, i)?;
                items.push(Item::Scalar { text, quoted: true });
                i = end + 1;
            }
            _ => {
                let start = i;
                while i < chars.len() && !matches!(chars[i], ',' | ']' | '[') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let text = text.trim().to_string();
                if !text.is_empty() {
                    items.push(Item::Scalar {
                        text,
                        quoted: false,
                    });
                }
            }
        }
    }
}

/// Reads a quoted label. Only the container's own quote and the backslash
/// are unescaped; everything else is preserved verbatim.
fn parse_quoted(chars: &[char], open: usize) -> Option<(String, usize)> {
    let quote = chars[open];
    let mut out = String::new();
    let mut i = open + 1;
    while i < chars.len() {
        let c = chars[i];
        if c == '\\' && i + 1 < chars.len() && (chars[i + 1] == quote || chars[i + 1] == '\\') {
            out.push(chars[i + 1]);
            i += 2;
        } else if c == quote {
            return Some((out, i));
        } else {
            out.push(c);
            i += 1;
        }
    }
    None
}

/// Turns parsed bracket items into triples. A group of exactly three
/// scalars is a triple; bare (unquoted) labels are only trusted when the
/// group is nested inside another group, which keeps stray prose brackets
/// like "[see 1, 2, 3]" out of the result.
fn collect_triples(
    items: &[Item],
    depth: usize,
    out: &mut Vec<Triple>,
    diagnostics: &mut Vec<String>,
) {
    let has_groups = items.iter().any(|it| matches!(it, Item::Group(_)));
    if !has_groups {
        let scalars: Vec<(&str, bool)> = items
            .iter()
            .filter_map(|it| match it {
                Item::Scalar { text, quoted } => Some((text.as_str(), *quoted)),
                Item::Group(_) => None,
            })
            .collect();
        if scalars.len() == 3 {
            if depth > 0 || scalars.iter().all(|(_, quoted)| *quoted) {
                out.push(Triple::new(scalars[0].0, scalars[1].0, scalars[2].0));
            } else {
                diagnostics
                    .push("ignored unquoted 3-item bracket group outside a list".to_string());
            }
        } else if depth > 0 || scalars.iter().any(|(_, quoted)| *quoted) {
            diagnostics.push(format!(
                "skipped bracketed group with {} field(s) (expected 3)",
                scalars.len()
            ));
        }
        return;
    }
    for item in items {
        match item {
            Item::Group(sub) => collect_triples(sub, depth + 1, out, diagnostics),
            Item::Scalar { .. } => {
                diagnostics.push("ignored stray text inside a triple list".to_string());
            }
        }
    }
}

/// Parenthesized 3-tuples like (s, r, o), fields quoted or bare.
fn scan_tuples(chars: &[char]) -> Vec<Triple> {
    let mut triples = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '(' {
            if let Some((t, end)) = parse_tuple(chars, i) {
                triples.push(t);
                i = end + 1;
                continue;
            }
        }
        i += 1;
    }
    triples
}

fn parse_tuple(chars: &[char], open: usize) -> Option<(Triple, usize)> {
    let mut fields: Vec<String> = Vec::new();
    let mut i = open + 1;
    loop {
        while i < chars.len() && (chars[i].is_whitespace() || chars[i] == ',') {
            i += 1;
        }
        if i >= chars.len() {
            return None;
        }
        match chars[i] {
            ')' => {
                if fields.len() == 3 {
                    let mut it = fields.into_iter();
                    return Some((
                        Triple::new(it.next()?, it.next()?, it.next()?),
                        i,
                    ));
                }
                return None;
            }
            '(' | '[' | ']' => return None,
            '"' | '\'' => {
                let (text, end) = parse_quoted(chars, i)?;
                fields.push(text);
                i = end + 1;
            }
            _ => {
                let start = i;
                while i < chars.len() && !matches!(chars[i], ',' | ')' | '(' | '[' | ']') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let text = text.trim().to_string();
                if text.is_empty() {
                    return None;
                }
                fields.push(text);
            }
        }
        if fields.len() > 3 {
            return None;
        }
    }
}

/// Lines of the shape "s | r | o": exactly two pipes, three non-empty fields.
fn scan_pipe_lines(text: &str) -> Vec<Triple> {
    text.lines()
        .filter_map(|line| {
            let parts: Vec<&str> = line.split('|').collect();
            if parts.len() != 3 {
                return None;
            }
            let fields: Vec<String> = parts
                .iter()
                .map(|p| strip_matching_quotes(p.trim()).to_string())
                .collect();
            if fields.iter().any(|f| f.is_empty()) {
                return None;
            }
            Some(Triple::new(&fields[0], &fields[1], &fields[2]))
        })
        .collect()
}

fn strip_matching_quotes(s: &str) -> &str {
    for quote in ['"', '\''] {
        if s.len() >= 2 && s.starts_with(quote) && s.ends_with(quote) {
            return &s[1..s.len() - 1];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triples_of(raw: &str) -> Vec<(String, String, String)> {
        extract_triples(raw)
            .triples
            .into_iter()
            .map(|t| (t.subject, t.relation, t.object))
            .collect()
    }

    #[test]
    fn clean_list_parses_clean() {
        let out = extract_triples(r#"[["a","b","c"],["d","e","f"]]"#);
        assert_eq!(out.status, ParseStatus::Clean);
        assert_eq!(out.triples.len(), 2);
        assert!(out.diagnostics.is_empty());
    }

    #[test]
    fn clean_tolerates_surrounding_whitespace_only() {
        assert_eq!(
            extract_triples("  [[\"a\",\"b\",\"c\"]]\n").status,
            ParseStatus::Clean
        );
        assert_eq!(
            extract_triples("x [[\"a\",\"b\",\"c\"]]").status,
            ParseStatus::Recovered
        );
    }

    #[test]
    fn empty_list_is_clean_not_fallback() {
        let out = extract_triples("[]");
        assert_eq!(out.status, ParseStatus::Clean);
        assert!(out.triples.is_empty());
    }

    #[test]
    fn sentinel_list_is_clean() {
        let out = extract_triples(r#"[["","",""]]"#);
        assert_eq!(out.status, ParseStatus::Clean);
        assert_eq!(out.triples.len(), 1);
    }

    #[test]
    fn prose_wrapped_list_is_recovered() {
        let out = extract_triples(r#"Sure! Here it is: [["a","b","c"]] Hope that helps."#);
        assert_eq!(out.status, ParseStatus::Recovered);
        assert_eq!(out.triples.len(), 1);
    }

    #[test]
    fn fenced_block_is_unwrapped() {
        let out = extract_triples("```json\n[[\"a\",\"b\",\"c\"]]\n```");
        assert_eq!(out.status, ParseStatus::Recovered);
        assert_eq!(out.triples.len(), 1);
        assert!(out.diagnostics.iter().any(|d| d.contains("fenced")));
    }

    #[test]
    fn single_quotes_and_trailing_comma_recover() {
        assert_eq!(triples_of("[['a','b','c'],]").len(), 1);
        assert_eq!(triples_of(r#"[["a","b","c"],]"#).len(), 1);
    }

    #[test]
    fn missing_outer_brackets_with_consecutive_items() {
        let out = extract_triples(r#"["a","b","c"], ["d","e","f"]"#);
        assert_eq!(out.status, ParseStatus::Recovered);
        assert_eq!(out.triples.len(), 2);
    }

    #[test]
    fn disjoint_lists_concatenate_in_document_order() {
        let got = triples_of(r#"first [["a","b","c"]] then [["x","y","z"]]"#);
        assert_eq!(got[0].0, "a");
        assert_eq!(got[1].0, "x");
    }

    #[test]
    fn unquoted_fields_allowed_when_nested() {
        let got = triples_of("[[Alan Bean, occupation, Test Pilot]]");
        assert_eq!(
            got,
            vec![(
                "Alan Bean".to_string(),
                "occupation".to_string(),
                "Test Pilot".to_string()
            )]
        );
    }

    #[test]
    fn bare_top_level_group_requires_quotes() {
        // prose brackets must not turn into triples
        assert_eq!(extract_triples("see [1, 2, 3] above").status, ParseStatus::EmptyFallback);
        assert_eq!(triples_of(r#"["a","b","c"]"#).len(), 1);
    }

    #[test]
    fn tuple_lines_recover() {
        let out = extract_triples("(Alan Bean, occupation, Test Pilot)\n(\"a\", 'b', c)");
        assert_eq!(out.status, ParseStatus::Recovered);
        assert_eq!(out.triples.len(), 2);
    }

    #[test]
    fn pipe_lines_recover() {
        let got = triples_of("alan bean | occupation | test pilot\nx | y | z");
        assert_eq!(got.len(), 2);
        assert_eq!(got[1], ("x".into(), "y".into(), "z".into()));
    }

    #[test]
    fn refusal_falls_back_empty() {
        let out = extract_triples("I cannot produce a graph for that.");
        assert_eq!(out.status, ParseStatus::EmptyFallback);
        assert!(out.triples.is_empty());
        assert!(!out.diagnostics.is_empty());
    }

    #[test]
    fn unbalanced_outer_bracket_still_yields_inner_triples() {
        let out = extract_triples(r#"[["a","b","c"]"#);
        assert_eq!(out.status, ParseStatus::Recovered);
        assert_eq!(out.triples.len(), 1);
    }

    #[test]
    fn wrong_arity_items_are_skipped_with_diagnostic() {
        let out = extract_triples(r#"[["a","b","c"],["d","e"]]"#);
        assert_eq!(out.triples.len(), 1);
        assert!(out.diagnostics.iter().any(|d| d.contains("expected 3")));
    }

    #[test]
    fn canonical_form_matches_spec_shape() {
        let triples = vec![Triple::new("s", "r", "o"), Triple::new("s2", "r2", "o2")];
        assert_eq!(
            canonical_triple_list(&triples),
            r#"[["s","r","o"],["s2","r2","o2"]]"#
        );
        assert_eq!(canonical_triple_list(&[]), "[]");
    }

    #[test]
    fn canonical_round_trips_clean() {
        let triples = vec![
            Triple::new("has \"quote\"", "back\\slash", "line\nbreak"),
            Triple::new("", "", ""),
        ];
        let text = canonical_triple_list(&triples);
        let out = extract_triples(&text);
        assert_eq!(out.status, ParseStatus::Clean);
        assert_eq!(out.triples, triples);
    }

    #[test]
    fn is_well_formed_agrees_with_clean_status() {
        for raw in [
            r#"[["a","b","c"]]"#,
            "[]",
            "junk [[\"a\",\"b\",\"c\"]]",
            "not a list",
            "[['a','b','c']]",
        ] {
            assert_eq!(
                is_well_formed(raw),
                extract_triples(raw).status == ParseStatus::Clean,
                "disagreement on {raw:?}"
            );
        }
    }

    #[test]
    fn parse_rate_counts_usable_outcomes() {
        let outcomes = vec![
            extract_triples(r#"[["a","b","c"]]"#),
            extract_triples("nope"),
            extract_triples("(a, b, c)"),
            extract_triples(""),
        ];
        assert_eq!(parse_rate(&outcomes).unwrap(), 0.5);
        assert!(parse_rate(&[]).is_err());
    }
}
