//! Gold-dataset benchmarking of the full pipeline.
//!
//! A gold entry pairs presentation LaTeX with a context snippet, the expected
//! semantic form, and expected per-CAS translations. `evaluate_pipeline` runs
//! parse, context binding (or not, in context-free mode), resolution,
//! translation, and numeric verification over all entries and reports rates.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::ast::{MathExpr, RelOp};
use crate::disambiguate::{resolve, DocumentAnalysis};
use crate::document::Document;
use crate::lexicon::ContentDictionary;
use crate::parser::parse_latex;
use crate::translate::{supported_targets, translate, CasTarget};
use crate::verify::{macro_constraints, numeric_verify, SamplingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Identity,
    Definition,
    Ambiguous,
    Plain,
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(Category::Identity),
            "definition" => Ok(Category::Definition),
            "ambiguous" => Ok(Category::Ambiguous),
            "plain" => Ok(Category::Plain),
            other => Err(format!("unknown category `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldEntry {
    pub id: String,
    pub latex: String,
    pub context: String,
    pub gold_semantic: String,
    pub gold_cas: BTreeMap<String, String>,
    pub category: Category,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema error on line {line}: {message}")]
    Schema { line: usize, message: String },
}

/// Loads a gold TSV file: `id | latex | context | gold_semantic |
/// gold_cas_json | category`, tab-separated, no header.
pub fn load_gold(path: impl AsRef<Path>) -> Result<Vec<GoldEntry>, BenchError> {
    parse_gold(&fs::read_to_string(path)?)
}

pub fn parse_gold(text: &str) -> Result<Vec<GoldEntry>, BenchError> {
    let schema = |line: usize, message: String| BenchError::Schema { line, message };
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 6 {
            return Err(schema(
                line,
                format!("expected 6 tab-separated fields, got {}", fields.len()),
            ));
        }
        let latex = fields[1].to_string();
        parse_latex(&latex)
            .map_err(|e| schema(line, format!("latex does not parse: {e}")))?;
        parse_latex(fields[3])
            .map_err(|e| schema(line, format!("gold semantic form does not parse: {e}")))?;
        let gold_cas: BTreeMap<String, String> = serde_json::from_str(fields[4])
            .map_err(|e| schema(line, format!("gold_cas_json: {e}")))?;
        let known: Vec<String> = supported_targets()
            .iter()
            .map(|t| t.as_str().to_string())
            .collect();
        for target in gold_cas.keys() {
            if !known.contains(target) {
                return Err(schema(line, format!("unknown gold target `{target}`")));
            }
        }
        let category = fields[5]
            .parse::<Category>()
            .map_err(|e| schema(line, e))?;
        entries.push(GoldEntry {
            id: fields[0].to_string(),
            latex,
            context: fields[2].to_string(),
            gold_semantic: fields[3].to_string(),
            gold_cas,
            category,
        });
    }
    Ok(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ContextSensitive,
    ContextFree,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "context_sensitive" => Ok(Mode::ContextSensitive),
            "context_free" => Ok(Mode::ContextFree),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub translation_accuracy: f64,
    pub verified_rate: f64,
    pub failed_rate: f64,
    pub inconclusive_rate: f64,
}

/// Resolves one entry the way the pipeline would see it: the context snippet
/// as a text block followed by the formula.
pub fn resolve_entry(
    entry: &GoldEntry,
    lexicon: &ContentDictionary,
    mode: Mode,
) -> Result<MathExpr, BenchError> {
    let expr = parse_latex(&entry.latex).expect("validated at load");
    match mode {
        Mode::ContextFree => Ok(resolve(&expr, &[])),
        Mode::ContextSensitive => {
            if entry.context.trim().is_empty() {
                return Ok(resolve(&expr, &[]));
            }
            let source = format!("{} ${}$", entry.context, entry.latex);
            let doc = Document::from_latex(&source).map_err(|e| BenchError::Schema {
                line: 0,
                message: format!("entry {}: {e}", entry.id),
            })?;
            let analysis = DocumentAnalysis::analyze(&doc, lexicon);
            let block = doc.blocks.len() - 1;
            Ok(resolve(&expr, &analysis.bindings_at(block)))
        }
    }
}

fn normalize_cas_text(text: &str) -> String {
    text.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Runs translation and verification over all entries and aggregates rates.
/// Translation is correct when the whitespace-normalized output equals the
/// gold string for the target. Non-equations count as inconclusive, so the
/// three verification rates always sum to one.
pub fn evaluate_pipeline(
    entries: &[GoldEntry],
    lexicon: &ContentDictionary,
    mode: Mode,
    target: CasTarget,
    sampling: &SamplingConfig,
) -> Result<Metrics, BenchError> {
    assert!(!entries.is_empty(), "entries must be non-empty");
    let total = entries.len() as f64;
    let mut correct = 0usize;
    let mut verified = 0usize;
    let mut failed = 0usize;
    let mut inconclusive = 0usize;

    for entry in entries {
        let resolved = resolve_entry(entry, lexicon, mode)?;
        let translated = translate(&resolved, target, lexicon);
        let matches = entry
            .gold_cas
            .get(target.as_str())
            .map(|gold| normalize_cas_text(gold) == normalize_cas_text(&translated.text))
            .unwrap_or(false);
        if matches {
            correct += 1;
        }

        let is_equation = matches!(
            resolved.normalize(),
            MathExpr::Relation { rel: RelOp::Eq, .. }
        );
        if is_equation {
            let constraints = macro_constraints(&resolved, lexicon);
            match numeric_verify(&resolved, &constraints, sampling) {
                Ok(report) if report.is_verified() => verified += 1,
                Ok(report) if report.is_failed() => failed += 1,
                _ => inconclusive += 1,
            }
        } else {
            inconclusive += 1;
        }
    }

    Ok(Metrics {
        translation_accuracy: correct as f64 / total,
        verified_rate: verified as f64 / total,
        failed_rate: failed as f64 / total,
        inconclusive_rate: inconclusive as f64 / total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed_gold() -> Vec<GoldEntry> {
        parse_gold(include_str!("../data/gold_seed.tsv")).unwrap()
    }

    #[test]
    fn seed_gold_loads_thirty_entries() {
        let entries = seed_gold();
        assert_eq!(entries.len(), 30);
        let ambiguous = entries
            .iter()
            .filter(|e| e.category == Category::Ambiguous)
            .count();
        assert!(ambiguous >= 8, "only {ambiguous} ambiguous entries");
    }

    #[test]
    fn unparseable_latex_reports_its_line() {
        let text = "x1\tx\tctx\tx\t{}\tplain\nx2\ty\tctx\ty\t{}\tplain\nx3\t\\frac{\tctx\tz\t{}\tplain";
        match parse_gold(text) {
            Err(BenchError::Schema { line: 3, .. }) => {}
            other => panic!("expected schema error on line 3, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_an_empty_list() {
        assert!(parse_gold("").unwrap().is_empty());
    }

    #[test]
    fn trivial_entry_is_correct_in_both_modes() {
        let entries: Vec<GoldEntry> = seed_gold()
            .into_iter()
            .filter(|e| e.id == "p1")
            .collect();
        assert_eq!(entries.len(), 1);
        let lexicon = ContentDictionary::seed();
        let sampling = SamplingConfig::default();
        for mode in [Mode::ContextSensitive, Mode::ContextFree] {
            let metrics =
                evaluate_pipeline(&entries, &lexicon, mode, CasTarget::Mathematica, &sampling)
                    .unwrap();
            assert_eq!(metrics.translation_accuracy, 1.0);
        }
    }

    #[test]
    fn rates_sum_to_one() {
        let entries = seed_gold();
        let lexicon = ContentDictionary::seed();
        let metrics = evaluate_pipeline(
            &entries,
            &lexicon,
            Mode::ContextSensitive,
            CasTarget::Mathematica,
            &SamplingConfig::default(),
        )
        .unwrap();
        let sum = metrics.verified_rate + metrics.failed_rate + metrics.inconclusive_rate;
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_entries_all_verify() {
        let entries: Vec<GoldEntry> = seed_gold()
            .into_iter()
            .filter(|e| e.category == Category::Identity)
            .collect();
        let lexicon = ContentDictionary::seed();
        let metrics = evaluate_pipeline(
            &entries,
            &lexicon,
            Mode::ContextSensitive,
            CasTarget::Mathematica,
            &SamplingConfig::default(),
        )
        .unwrap();
        assert_eq!(metrics.verified_rate, 1.0, "{metrics:?}");
    }

    #[test]
    fn context_beats_no_context_on_ambiguous_entries() {
        let entries: Vec<GoldEntry> = seed_gold()
            .into_iter()
            .filter(|e| e.category == Category::Ambiguous)
            .collect();
        let lexicon = ContentDictionary::seed();
        let sampling = SamplingConfig::default();
        let cs = evaluate_pipeline(
            &entries,
            &lexicon,
            Mode::ContextSensitive,
            CasTarget::Mathematica,
            &sampling,
        )
        .unwrap();
        let cf = evaluate_pipeline(
            &entries,
            &lexicon,
            Mode::ContextFree,
            CasTarget::Mathematica,
            &sampling,
        )
        .unwrap();
        assert!(
            cs.translation_accuracy > cf.translation_accuracy,
            "cs {} vs cf {}",
            cs.translation_accuracy,
            cf.translation_accuracy
        );
    }

    #[test]
    fn gold_semantic_matches_pipeline_semantic_output() {
        let lexicon = ContentDictionary::seed();
        for entry in seed_gold() {
            let resolved = resolve_entry(&entry, &lexicon, Mode::ContextSensitive).unwrap();
            let semantic = crate::disambiguate::to_semantic_latex(&resolved, &lexicon).unwrap();
            assert_eq!(
                semantic, entry.gold_semantic,
                "entry {} semantic mismatch",
                entry.id
            );
        }
    }
}
