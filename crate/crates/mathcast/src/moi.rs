//! Mathematical objects of interest: corpus frequency statistics over
//! canonical subexpressions.
//!
//! Every complete subtree of a formula (bounded by a node budget) counts as a
//! candidate object; the canonical key is its normalized LaTeX rendering.
//! An [`MoiIndex`] aggregates term and document frequencies so subexpressions
//! can be ranked by TF-IDF, fitted against a rank-frequency power law, and
//! filtered for math stop expressions.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::MathExpr;
use crate::render::render_latex;

/// Default node budget for subexpression enumeration.
pub const DEFAULT_MAX_SUBEXPR_NODES: usize = 30;

const INDEX_FORMAT_VERSION: &str = "1";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoiError {
    #[error("duplicate document id `{0}`")]
    DuplicateDocId(String),
    #[error("need at least {need} distinct terms, have {have}")]
    TooFewTerms { have: usize, need: usize },
    #[error("k = {k} exceeds the {have} distinct terms in the index")]
    KTooLarge { k: usize, have: usize },
    #[error("unknown document `{0}`")]
    UnknownDoc(String),
    #[error("unsupported index format: {0}")]
    Format(String),
}

/// Canonical key of an expression: its normalized rendering.
pub fn canonical(expr: &MathExpr) -> String {
    render_latex(&expr.normalize())
}

/// Canonical renderings of every complete subtree with at most `max_nodes`
/// nodes. Ambiguous nodes contribute their shared surface form once plus the
/// subtrees of each interpretation; duplicates deduplicate by set semantics.
pub fn enumerate_subexpressions(expr: &MathExpr, max_nodes: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    walk(&expr.normalize(), max_nodes, &mut out);
    out
}

fn walk(expr: &MathExpr, max_nodes: usize, out: &mut BTreeSet<String>) {
    if let MathExpr::Ambiguous { interpretations } = expr {
        // Both interpretations share one surface string; count the node
        // budget against the function-application reading.
        if let Some(MathExpr::FunctionApply { head, args }) = interpretations
            .iter()
            .find(|i| matches!(i, MathExpr::FunctionApply { .. }))
        {
            let count = 1 + head.node_count() + args.iter().map(|a| a.node_count()).sum::<usize>();
            if count <= max_nodes {
                out.insert(render_latex(expr));
            }
            walk(head, max_nodes, out);
            for arg in args {
                walk(arg, max_nodes, out);
            }
        } else {
            for interp in interpretations {
                walk(interp, max_nodes, out);
            }
        }
        return;
    }

    if expr.node_count() <= max_nodes {
        out.insert(render_latex(expr));
    }
    match expr {
        MathExpr::Number { .. } | MathExpr::Constant { .. } => {}
        MathExpr::Identifier { subscript, .. } => {
            if let Some(sub) = subscript {
                walk(sub, max_nodes, out);
            }
        }
        MathExpr::BinaryOp { left, right, .. } | MathExpr::Relation { left, right, .. } => {
            walk(left, max_nodes, out);
            walk(right, max_nodes, out);
        }
        MathExpr::FunctionApply { head, args } => {
            walk(head, max_nodes, out);
            for arg in args {
                walk(arg, max_nodes, out);
            }
        }
        MathExpr::MacroCall { args, .. } => {
            for arg in args {
                walk(arg, max_nodes, out);
            }
        }
        MathExpr::Group { child } => walk(child, max_nodes, out),
        MathExpr::Sequence { children } => {
            for child in children {
                walk(child, max_nodes, out);
            }
        }
        MathExpr::Ambiguous { .. } => unreachable!("handled above"),
    }
}

/// Aggregate statistics for one canonical subexpression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoiRecord {
    /// Number of documents containing this subexpression.
    pub df: u64,
    /// Corpus-wide count of formulas containing it.
    pub global_count: u64,
}

/// Corpus-level index of canonical subexpressions.
///
/// `tf(term, doc)` counts the formulas inside `doc` whose subexpression set
/// contains the term, so aggregation is commutative and the index is
/// independent of document order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoiIndex {
    version: String,
    doc_count: u64,
    records: BTreeMap<String, MoiRecord>,
    per_doc: BTreeMap<String, BTreeMap<String, u64>>,
}

/// Incremental construction of an [`MoiIndex`].
#[derive(Debug, Default)]
pub struct MoiIndexBuilder {
    max_nodes: usize,
    per_doc: BTreeMap<String, BTreeMap<String, u64>>,
}

impl MoiIndexBuilder {
    pub fn new() -> Self {
        MoiIndexBuilder {
            max_nodes: DEFAULT_MAX_SUBEXPR_NODES,
            per_doc: BTreeMap::new(),
        }
    }

    pub fn with_max_nodes(max_nodes: usize) -> Self {
        MoiIndexBuilder {
            max_nodes,
            per_doc: BTreeMap::new(),
        }
    }

    pub fn add_document(
        &mut self,
        doc_id: impl Into<String>,
        formulas: &[MathExpr],
    ) -> Result<(), MoiError> {
        let doc_id = doc_id.into();
        if self.per_doc.contains_key(&doc_id) {
            return Err(MoiError::DuplicateDocId(doc_id));
        }
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for formula in formulas {
            for term in enumerate_subexpressions(formula, self.max_nodes) {
                *counts.entry(term).or_insert(0) += 1;
            }
        }
        self.per_doc.insert(doc_id, counts);
        Ok(())
    }

    pub fn finish(self) -> MoiIndex {
        let mut records: BTreeMap<String, MoiRecord> = BTreeMap::new();
        for counts in self.per_doc.values() {
            for (term, tf) in counts {
                let record = records.entry(term.clone()).or_insert(MoiRecord {
                    df: 0,
                    global_count: 0,
                });
                record.df += 1;
                record.global_count += tf;
            }
        }
        MoiIndex {
            version: INDEX_FORMAT_VERSION.to_string(),
            doc_count: self.per_doc.len() as u64,
            records,
            per_doc: self.per_doc,
        }
    }
}

/// Builds an index from a corpus of `(document id, formulas)` pairs.
pub fn index_corpus<I, S>(docs: I) -> Result<MoiIndex, MoiError>
where
    I: IntoIterator<Item = (S, Vec<MathExpr>)>,
    S: Into<String>,
{
    let mut builder = MoiIndexBuilder::new();
    for (id, formulas) in docs {
        builder.add_document(id, &formulas)?;
    }
    Ok(builder.finish())
}

/// Result of a log-log rank-frequency fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZipfFit {
    pub slope: f64,
    pub r_squared: f64,
}

impl MoiIndex {
    pub fn doc_count(&self) -> u64 {
        self.doc_count
    }

    pub fn distinct_terms(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> impl Iterator<Item = (&String, &MoiRecord)> {
        self.records.iter()
    }

    pub fn record(&self, canonical: &str) -> Option<&MoiRecord> {
        self.records.get(canonical)
    }

    pub fn tf(&self, canonical: &str, doc_id: &str) -> Result<u64, MoiError> {
        let doc = self
            .per_doc
            .get(doc_id)
            .ok_or_else(|| MoiError::UnknownDoc(doc_id.to_string()))?;
        Ok(doc.get(canonical).copied().unwrap_or(0))
    }

    /// TF-IDF score: `tf(term, doc) * ln(N / df(term))`; 0 when the term is
    /// absent from the document.
    pub fn tfidf(&self, canonical: &str, doc_id: &str) -> Result<f64, MoiError> {
        let tf = self.tf(canonical, doc_id)?;
        if tf == 0 {
            return Ok(0.0);
        }
        let df = self.records[canonical].df;
        Ok(tf as f64 * ((self.doc_count as f64) / (df as f64)).ln())
    }

    /// Least-squares fit of `ln(frequency)` against `ln(rank)` over global
    /// counts; rank 1 is the most frequent term, ties order by canonical key.
    pub fn zipf_fit(&self) -> Result<ZipfFit, MoiError> {
        const MIN_TERMS: usize = 10;
        if self.records.len() < MIN_TERMS {
            return Err(MoiError::TooFewTerms {
                have: self.records.len(),
                need: MIN_TERMS,
            });
        }
        let mut ranked: Vec<(&String, u64)> = self
            .records
            .iter()
            .map(|(term, r)| (term, r.global_count))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

        let points: Vec<(f64, f64)> = ranked
            .iter()
            .enumerate()
            .map(|(i, (_, count))| (((i + 1) as f64).ln(), (*count as f64).ln()))
            .collect();
        let n = points.len() as f64;
        let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        let sxy: f64 = points
            .iter()
            .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
            .sum();
        let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
        let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
        let r_squared = if ss_tot <= f64::EPSILON {
            1.0
        } else {
            let ss_res: f64 = points
                .iter()
                .map(|p| {
                    let predicted = mean_y + slope * (p.0 - mean_x);
                    (p.1 - predicted).powi(2)
                })
                .sum();
            1.0 - ss_res / ss_tot
        };
        Ok(ZipfFit { slope, r_squared })
    }

    /// The `k` terms with the highest document frequency: candidate math stop
    /// expressions. Ties order by canonical key.
    pub fn stop_expressions(&self, k: usize) -> Result<Vec<String>, MoiError> {
        if k > self.records.len() {
            return Err(MoiError::KTooLarge {
                k,
                have: self.records.len(),
            });
        }
        let mut ranked: Vec<(&String, u64)> = self
            .records
            .iter()
            .map(|(term, r)| (term, r.df))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Ok(ranked.into_iter().take(k).map(|(t, _)| t.clone()).collect())
    }

    /// Merges two partial indexes built over disjoint document sets, so
    /// corpora can be indexed in parallel and combined afterwards.
    pub fn merge(self, other: MoiIndex) -> Result<MoiIndex, MoiError> {
        if let Some(id) = self.per_doc.keys().find(|id| other.per_doc.contains_key(*id)) {
            return Err(MoiError::DuplicateDocId(id.clone()));
        }
        let mut per_doc = self.per_doc;
        per_doc.extend(other.per_doc);
        let builder = MoiIndexBuilder {
            max_nodes: DEFAULT_MAX_SUBEXPR_NODES,
            per_doc,
        };
        Ok(builder.finish())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("index serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MoiError> {
        let index: MoiIndex =
            serde_json::from_str(text).map_err(|e| MoiError::Format(e.to_string()))?;
        if index.version != INDEX_FORMAT_VERSION {
            return Err(MoiError::Format(format!(
                "version `{}` (expected `{INDEX_FORMAT_VERSION}`)",
                index.version
            )));
        }
        for (term, record) in &index.records {
            let df = index
                .per_doc
                .values()
                .filter(|doc| doc.contains_key(term))
                .count() as u64;
            if df != record.df {
                return Err(MoiError::Format(format!(
                    "df mismatch for `{term}`: stored {}, derived {df}",
                    record.df
                )));
            }
        }
        Ok(index)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), std::io::Error> {
        fs::write(path, self.to_json())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MoiError> {
        let text = fs::read_to_string(path).map_err(|e| MoiError::Format(e.to_string()))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_latex;

    fn expr(s: &str) -> MathExpr {
        parse_latex(s).unwrap()
    }

    #[test]
    fn enumerates_complete_subtrees() {
        let subs = enumerate_subexpressions(&expr(r"a+b\cdot c"), 10);
        let expected: BTreeSet<String> = [r"a", r"b", r"c", r"b\cdot c", r"a+b\cdot c"]
            .iter()
            .map(|s| canonical(&expr(s)))
            .collect();
        assert_eq!(subs, expected);
        assert_eq!(subs.len(), 5);
    }

    #[test]
    fn single_identifier_enumerates_itself() {
        let subs = enumerate_subexpressions(&expr("x"), 10);
        assert_eq!(subs.into_iter().collect::<Vec<_>>(), vec!["x"]);
    }

    #[test]
    fn equal_subtrees_deduplicate() {
        let subs = enumerate_subexpressions(&expr(r"\frac{x}{x}"), 10);
        assert_eq!(subs.len(), 2);
        assert!(subs.contains("x"));
        assert!(subs.contains(r"\frac{x}{x}"));
    }

    #[test]
    fn max_nodes_bounds_the_subtrees() {
        let subs = enumerate_subexpressions(&expr(r"a+b\cdot c"), 2);
        assert_eq!(subs.len(), 3, "only the leaves fit: {subs:?}");
    }

    #[test]
    fn ambiguous_contributes_shared_surface_and_parts() {
        let subs = enumerate_subexpressions(&expr(r"\pi(x+y)"), 10);
        assert!(subs.contains(r"\pi(x+y)"));
        assert!(subs.contains(r"\pi"));
        assert!(subs.contains("x+y"));
        assert!(subs.contains("x"));
        assert!(subs.contains("y"));
        assert_eq!(subs.len(), 5);
    }

    #[test]
    fn df_counts_documents() {
        let index = index_corpus(vec![
            ("a", vec![expr("x")]),
            ("b", vec![expr("x")]),
        ])
        .unwrap();
        assert_eq!(index.record("x").unwrap().df, 2);
    }

    #[test]
    fn shared_identifier_has_df_two() {
        let index = index_corpus(vec![
            ("a", vec![expr(r"\sin x")]),
            ("b", vec![expr(r"\cos x")]),
        ])
        .unwrap();
        assert_eq!(index.record("x").unwrap().df, 2);
        assert_eq!(index.record(&canonical(&expr(r"\sin x"))).unwrap().df, 1);
    }

    #[test]
    fn empty_corpus_is_an_empty_index() {
        let index = index_corpus(Vec::<(String, Vec<MathExpr>)>::new()).unwrap();
        assert_eq!(index.doc_count(), 0);
        assert_eq!(index.distinct_terms(), 0);
    }

    #[test]
    fn duplicate_doc_id_is_rejected() {
        let mut builder = MoiIndexBuilder::new();
        builder.add_document("a", &[expr("x")]).unwrap();
        assert_eq!(
            builder.add_document("a", &[expr("y")]),
            Err(MoiError::DuplicateDocId("a".into()))
        );
    }

    #[test]
    fn tfidf_is_zero_for_ubiquitous_terms() {
        let index = index_corpus(vec![
            ("a", vec![expr("x")]),
            ("b", vec![expr("x")]),
        ])
        .unwrap();
        assert_eq!(index.tfidf("x", "a").unwrap(), 0.0);
    }

    #[test]
    fn tfidf_matches_hand_computation() {
        // tf=3, df=1, N=10: score 3·ln(10).
        let mut docs: Vec<(String, Vec<MathExpr>)> = vec![(
            "target".to_string(),
            vec![expr("q"), expr("q"), expr("q")],
        )];
        for i in 0..9 {
            docs.push((format!("filler{i}"), vec![expr("z")]));
        }
        let index = index_corpus(docs).unwrap();
        let score = index.tfidf("q", "target").unwrap();
        assert!((score - 3.0 * 10f64.ln()).abs() < 1e-12);
        assert!((score - 6.9078).abs() < 1e-4);
    }

    #[test]
    fn tfidf_is_zero_when_absent_from_doc() {
        let index = index_corpus(vec![
            ("a", vec![expr("x")]),
            ("b", vec![expr("y")]),
        ])
        .unwrap();
        assert_eq!(index.tfidf("y", "a").unwrap(), 0.0);
    }

    #[test]
    fn tfidf_unknown_doc_errors() {
        let index = index_corpus(vec![("a", vec![expr("x")])]).unwrap();
        assert_eq!(
            index.tfidf("x", "nope"),
            Err(MoiError::UnknownDoc("nope".into()))
        );
    }

    #[test]
    fn zipf_fit_needs_ten_terms() {
        let docs: Vec<(String, Vec<MathExpr>)> = "abcdefghi"
            .chars()
            .map(|c| (c.to_string(), vec![expr(&c.to_string())]))
            .collect();
        let index = index_corpus(docs).unwrap();
        assert_eq!(index.distinct_terms(), 9);
        assert!(matches!(
            index.zipf_fit(),
            Err(MoiError::TooFewTerms { have: 9, need: 10 })
        ));
    }

    #[test]
    fn flat_distribution_fits_slope_zero() {
        let docs: Vec<(String, Vec<MathExpr>)> = "abcdefghij"
            .chars()
            .map(|c| (c.to_string(), vec![expr(&c.to_string())]))
            .collect();
        let index = index_corpus(docs).unwrap();
        let fit = index.zipf_fit().unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn stop_expressions_rank_by_document_frequency() {
        let index = index_corpus(vec![
            ("a", vec![expr("x"), expr("u")]),
            ("b", vec![expr("x"), expr("v")]),
            ("c", vec![expr("x")]),
        ])
        .unwrap();
        assert_eq!(index.stop_expressions(1).unwrap(), vec!["x".to_string()]);
        let all = index.stop_expressions(3).unwrap();
        assert_eq!(all, vec!["x".to_string(), "u".to_string(), "v".to_string()]);
    }

    #[test]
    fn stop_expressions_rejects_oversized_k() {
        let index = index_corpus(vec![("a", vec![expr("x")])]).unwrap();
        assert_eq!(
            index.stop_expressions(5),
            Err(MoiError::KTooLarge { k: 5, have: 1 })
        );
    }

    #[test]
    fn index_is_order_independent() {
        let forward = index_corpus(vec![
            ("a", vec![expr(r"\sin x")]),
            ("b", vec![expr("x+y")]),
        ])
        .unwrap();
        let backward = index_corpus(vec![
            ("b", vec![expr("x+y")]),
            ("a", vec![expr(r"\sin x")]),
        ])
        .unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn merging_partial_indexes_equals_indexing_the_whole_corpus() {
        let part_a = index_corpus(vec![("a", vec![expr(r"\sin x")])]).unwrap();
        let part_b = index_corpus(vec![("b", vec![expr("x+y")])]).unwrap();
        let merged = part_a.merge(part_b).unwrap();
        let whole = index_corpus(vec![
            ("a", vec![expr(r"\sin x")]),
            ("b", vec![expr("x+y")]),
        ])
        .unwrap();
        assert_eq!(merged, whole);
    }

    #[test]
    fn merge_rejects_overlapping_document_ids() {
        let part_a = index_corpus(vec![("a", vec![expr("x")])]).unwrap();
        let part_b = index_corpus(vec![("a", vec![expr("y")])]).unwrap();
        assert_eq!(
            part_a.merge(part_b),
            Err(MoiError::DuplicateDocId("a".into()))
        );
    }

    #[test]
    fn json_round_trip_preserves_index() {
        let index = index_corpus(vec![
            ("a", vec![expr(r"\sin x")]),
            ("b", vec![expr("x+y")]),
        ])
        .unwrap();
        let reloaded = MoiIndex::from_json(&index.to_json()).unwrap();
        assert_eq!(index, reloaded);
    }
}
