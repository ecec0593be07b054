//! Grounding of formulas in document context.
//!
//! The pipeline here mirrors how a reader disambiguates notation: build a
//! dependency graph linking formulas that share notation, attach nearby
//! textual descriptions to each formula, bind symbols to semantic macros with
//! document-position scoping (a binding holds from its defining block until
//! the next redefinition), and finally rewrite expressions so every ambiguous
//! juxtaposition is either a semantic macro call or a plain multiplication.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::ast::{BinOp, MathExpr};
use crate::document::{words, Block, Document};
use crate::lexicon::ContentDictionary;
use crate::moi::{enumerate_subexpressions, DEFAULT_MAX_SUBEXPR_NODES};
use crate::parser::parse_latex;
use crate::render::BUILTIN_FUNCTIONS;

/// Subscripted single letters that fall back to a standard notation when the
/// context binds nothing else: `E_n` reads as an Euler number, `B_n` as a
/// Bernoulli number.
const DEFAULT_NOTATION: &[(&str, &str)] = &[("E", "EulerNumber"), ("B", "BernoulliNumber")];

/// Words ignored at phrase edges during annotation extraction.
const STOPWORDS: &[&str] = &[
    "the", "a", "an", "is", "are", "be", "of", "in", "on", "as", "we", "let", "denotes",
    "denote", "called", "where", "and", "or", "to", "by", "for", "with", "its", "it", "this",
    "that", "then", "thus", "here", "now", "so",
];

const ANNOTATION_WINDOW: usize = 10;
const MAX_PHRASE_WORDS: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DisambiguationError {
    #[error("unknown formula `{0}`")]
    UnknownFormula(String),
    #[error("macro `{name}` takes {expected} arguments, got {got}")]
    ArityMismatch {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("expression still contains ambiguous nodes; resolve it first")]
    Unresolved,
}

/// A candidate textual description of a formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Annotation {
    pub phrase: String,
    /// Word tokens between the phrase and the formula boundary.
    pub distance: usize,
}

/// A formula with its context annotations and forward notation links.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaNode {
    pub formula_id: String,
    pub block_index: usize,
    pub expr: MathExpr,
    pub annotations: Vec<Annotation>,
    pub out_edges: Vec<String>,
}

/// A scoped symbol-to-macro assignment. Scopes of distinct bindings for one
/// symbol never overlap; `[start, end)` are block indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemanticBinding {
    pub symbol: String,
    #[serde(rename = "macro")]
    pub macro_name: String,
    pub scope: (usize, usize),
    pub confidence: f64,
    pub origin: String,
    #[serde(skip)]
    pub macro_arity: usize,
}

impl SemanticBinding {
    pub fn contains(&self, block: usize) -> bool {
        self.scope.0 <= block && block < self.scope.1
    }
}

/// Extracts candidate definition phrases for one formula from the adjacent
/// text blocks, ordered by ascending distance.
pub fn extract_annotations(
    doc: &Document,
    formula_id: &str,
) -> Result<Vec<Annotation>, DisambiguationError> {
    let block = doc
        .formula_block(formula_id)
        .ok_or_else(|| DisambiguationError::UnknownFormula(formula_id.to_string()))?;
    let mut best: BTreeMap<String, usize> = BTreeMap::new();

    if block > 0 {
        if let Block::Text(text) = &doc.blocks[block - 1] {
            collect_phrases(&words(text), Side::Before, &mut best);
        }
    }
    if let Some(Block::Text(text)) = doc.blocks.get(block + 1) {
        collect_phrases(&words(text), Side::After, &mut best);
    }

    let mut annotations: Vec<Annotation> = best
        .into_iter()
        .map(|(phrase, distance)| Annotation { phrase, distance })
        .collect();
    annotations.sort_by(|a, b| a.distance.cmp(&b.distance).then_with(|| a.phrase.cmp(&b.phrase)));
    Ok(annotations)
}

enum Side {
    Before,
    After,
}

fn collect_phrases(tokens: &[String], side: Side, best: &mut BTreeMap<String, usize>) {
    let window: Vec<(usize, &String)> = match side {
        // The last tokens of the preceding block are closest to the formula.
        Side::Before => {
            let skip = tokens.len().saturating_sub(ANNOTATION_WINDOW);
            tokens.iter().enumerate().skip(skip).collect()
        }
        Side::After => tokens.iter().take(ANNOTATION_WINDOW).enumerate().collect(),
    };
    for start in 0..window.len() {
        for len in 1..=MAX_PHRASE_WORDS.min(window.len() - start) {
            let slice = &window[start..start + len];
            let kept: Vec<(usize, &String)> = trim_stopwords(slice);
            if kept.is_empty() {
                continue;
            }
            let phrase = kept
                .iter()
                .map(|(_, w)| w.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let distance = match side {
                Side::Before => tokens.len() - 1 - kept.last().unwrap().0,
                Side::After => kept.first().unwrap().0,
            };
            best.entry(phrase)
                .and_modify(|d| *d = (*d).min(distance))
                .or_insert(distance);
        }
    }
}

fn trim_stopwords<'a>(slice: &[(usize, &'a String)]) -> Vec<(usize, &'a String)> {
    let mut start = 0;
    let mut end = slice.len();
    while start < end && STOPWORDS.contains(&slice[start].1.as_str()) {
        start += 1;
    }
    while end > start && STOPWORDS.contains(&slice[end - 1].1.as_str()) {
        end -= 1;
    }
    slice[start..end].to_vec()
}

/// Builds the document dependency graph: formula `a` links forward to `b`
/// when both contain a common canonical subexpression that carries a symbol.
pub fn build_dependency_graph(doc: &Document) -> Vec<FormulaNode> {
    let mut nodes: Vec<FormulaNode> = Vec::new();
    let mut symbol_subexprs: Vec<BTreeSet<String>> = Vec::new();

    for (block_index, id, expr) in doc.formulas() {
        let subs: BTreeSet<String> = enumerate_subexpressions(expr, DEFAULT_MAX_SUBEXPR_NODES)
            .into_iter()
            .filter(|canonical| contains_symbol(canonical))
            .collect();
        let annotations = extract_annotations(doc, id).expect("formula exists");
        nodes.push(FormulaNode {
            formula_id: id.to_string(),
            block_index,
            expr: expr.clone(),
            annotations,
            out_edges: Vec::new(),
        });
        symbol_subexprs.push(subs);
    }

    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            if !symbol_subexprs[i].is_disjoint(&symbol_subexprs[j]) {
                let target = nodes[j].formula_id.clone();
                nodes[i].out_edges.push(target);
            }
        }
    }
    nodes
}

fn contains_symbol(canonical: &str) -> bool {
    match parse_latex(canonical) {
        Ok(expr) => expr_contains_symbol(&expr),
        Err(_) => false,
    }
}

fn expr_contains_symbol(expr: &MathExpr) -> bool {
    match expr {
        MathExpr::Identifier { .. } | MathExpr::Constant { .. } => true,
        MathExpr::Number { .. } => false,
        MathExpr::BinaryOp { left, right, .. } | MathExpr::Relation { left, right, .. } => {
            expr_contains_symbol(left) || expr_contains_symbol(right)
        }
        MathExpr::FunctionApply { head, args } => {
            // A built-in head is an operation, not a symbol occurrence.
            let head_counts = !matches!(
                head.as_ref(),
                MathExpr::Identifier { name, subscript: None }
                    if BUILTIN_FUNCTIONS.contains(&name.as_str())
            );
            (head_counts && expr_contains_symbol(head)) || args.iter().any(expr_contains_symbol)
        }
        MathExpr::MacroCall { args, .. } => args.iter().any(expr_contains_symbol),
        MathExpr::Group { child } => expr_contains_symbol(child),
        MathExpr::Sequence { children } => children.iter().any(expr_contains_symbol),
        MathExpr::Ambiguous { interpretations } => {
            interpretations.iter().any(expr_contains_symbol)
        }
    }
}

/// The symbol a formula's annotations describe: the head of the first
/// ambiguous juxtaposition if any, else the first bare identifier or constant.
pub fn subject_symbol(expr: &MathExpr) -> Option<String> {
    fn first_ambiguous_head(expr: &MathExpr) -> Option<String> {
        match expr {
            MathExpr::Ambiguous { interpretations } => interpretations.iter().find_map(|i| {
                if let MathExpr::FunctionApply { head, .. } = i {
                    head.base_symbol()
                } else {
                    None
                }
            }),
            MathExpr::Identifier { subscript, .. } => {
                subscript.as_ref().and_then(|s| first_ambiguous_head(s))
            }
            MathExpr::Number { .. } | MathExpr::Constant { .. } => None,
            MathExpr::BinaryOp { left, right, .. } | MathExpr::Relation { left, right, .. } => {
                first_ambiguous_head(left).or_else(|| first_ambiguous_head(right))
            }
            MathExpr::FunctionApply { head, args } => first_ambiguous_head(head)
                .or_else(|| args.iter().find_map(first_ambiguous_head)),
            MathExpr::MacroCall { args, .. } => args.iter().find_map(first_ambiguous_head),
            MathExpr::Group { child } => first_ambiguous_head(child),
            MathExpr::Sequence { children } => children.iter().find_map(first_ambiguous_head),
        }
    }
    fn first_symbol(expr: &MathExpr) -> Option<String> {
        match expr {
            MathExpr::Identifier { .. } | MathExpr::Constant { .. } => expr.base_symbol(),
            MathExpr::Number { .. } => None,
            MathExpr::BinaryOp { left, right, .. } | MathExpr::Relation { left, right, .. } => {
                first_symbol(left).or_else(|| first_symbol(right))
            }
            MathExpr::FunctionApply { args, .. } => args.iter().find_map(first_symbol),
            MathExpr::MacroCall { args, .. } => args.iter().find_map(first_symbol),
            MathExpr::Group { child } => first_symbol(child),
            MathExpr::Sequence { children } => children.iter().find_map(first_symbol),
            MathExpr::Ambiguous { interpretations } => {
                interpretations.first().and_then(first_symbol)
            }
        }
    }
    first_ambiguous_head(expr).or_else(|| first_symbol(expr))
}

/// Derives scoped bindings from annotated formulas. For each formula with
/// annotations, the best keyword match becomes a binding for the formula's
/// subject symbol, scoped from the defining block until the next redefinition
/// or the end of the document. Confidence is `score / (1 + distance)`.
pub fn bind_semantics(
    graph: &[FormulaNode],
    doc: &Document,
    lexicon: &ContentDictionary,
) -> Vec<SemanticBinding> {
    struct Event {
        block: usize,
        symbol: String,
        macro_name: String,
        macro_arity: usize,
        confidence: f64,
        origin: String,
    }

    let mut events: Vec<Event> = Vec::new();
    for node in graph {
        let Some(symbol) = subject_symbol(&node.expr) else {
            continue;
        };
        let mut best: Option<Event> = None;
        for annotation in &node.annotations {
            for (macro_def, score) in lexicon.lookup_by_keywords(&[annotation.phrase.as_str()]) {
                let confidence = score / (1.0 + annotation.distance as f64);
                let candidate = Event {
                    block: node.block_index,
                    symbol: symbol.clone(),
                    macro_name: macro_def.name.clone(),
                    macro_arity: macro_def.arity,
                    confidence,
                    origin: annotation.phrase.clone(),
                };
                let better = match &best {
                    None => true,
                    Some(b) => {
                        confidence > b.confidence
                            || (confidence == b.confidence && candidate.macro_name < b.macro_name)
                    }
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
        if let Some(event) = best {
            events.push(event);
        }
    }

    // Scope each binding to the next redefinition of the same symbol.
    let mut by_symbol: BTreeMap<String, Vec<Event>> = BTreeMap::new();
    for event in events {
        by_symbol.entry(event.symbol.clone()).or_default().push(event);
    }
    let mut bindings = Vec::new();
    for (_, mut events) in by_symbol {
        events.sort_by_key(|e| e.block);
        events.dedup_by(|later, earlier| later.block == earlier.block);
        for i in 0..events.len() {
            let end = events
                .get(i + 1)
                .map(|next| next.block)
                .unwrap_or(doc.blocks.len());
            let e = &events[i];
            bindings.push(SemanticBinding {
                symbol: e.symbol.clone(),
                macro_name: e.macro_name.clone(),
                scope: (e.block, end),
                confidence: e.confidence,
                origin: e.origin.clone(),
                macro_arity: e.macro_arity,
            });
        }
    }
    bindings.sort_by(|a, b| a.symbol.cmp(&b.symbol).then(a.scope.0.cmp(&b.scope.0)));
    bindings
}

/// Collapses every ambiguous node using the bindings in scope.
///
/// A juxtaposition whose head symbol is bound to a macro of arity >= 1
/// becomes that macro's call (a subscript on the head is absorbed as the
/// first argument); anything else falls back to implicit multiplication.
/// Bare subscripted identifiers resolve through their context binding or the
/// standard-notation table. The result contains no `Ambiguous` node and
/// `resolve` is idempotent.
pub fn resolve(expr: &MathExpr, bindings: &[&SemanticBinding]) -> MathExpr {
    match expr {
        MathExpr::Ambiguous { interpretations } => {
            let apply = interpretations
                .iter()
                .find_map(|i| match i {
                    MathExpr::FunctionApply { head, args } => Some((head, args)),
                    _ => None,
                });
            if let Some((head, args)) = apply {
                let bound = head
                    .base_symbol()
                    .and_then(|s| bindings.iter().find(|b| b.symbol == s));
                if let Some(binding) = bound.filter(|b| b.macro_arity >= 1) {
                    let mut call_args = Vec::new();
                    if let MathExpr::Identifier {
                        subscript: Some(sub),
                        ..
                    } = head.as_ref()
                    {
                        call_args.push(resolve(sub, bindings));
                    }
                    call_args.extend(args.iter().map(|a| resolve(a, bindings)));
                    return MathExpr::call(binding.macro_name.clone(), call_args);
                }
                // Multiplication fallback; constants keep their default
                // reading (pi stays the circle constant).
                let inner = if args.len() == 1 {
                    args[0].clone()
                } else {
                    MathExpr::Sequence {
                        children: args.clone(),
                    }
                };
                return MathExpr::bin(
                    BinOp::Mul,
                    resolve(head, bindings),
                    MathExpr::group(resolve(&inner, bindings)),
                );
            }
            resolve(&interpretations[0], bindings)
        }
        MathExpr::Identifier {
            name,
            subscript: Some(sub),
        } => {
            let base = expr.base_symbol().unwrap();
            let context = bindings
                .iter()
                .find(|b| b.symbol == base && b.macro_arity == 1);
            if let Some(binding) = context {
                return MathExpr::call(
                    binding.macro_name.clone(),
                    vec![resolve(sub, bindings)],
                );
            }
            if let Some((_, macro_name)) = DEFAULT_NOTATION
                .iter()
                .find(|(letter, _)| letter == name)
            {
                return MathExpr::call(macro_name.to_string(), vec![resolve(sub, bindings)]);
            }
            MathExpr::ident_sub(name.clone(), resolve(sub, bindings))
        }
        MathExpr::Number { .. } | MathExpr::Constant { .. } | MathExpr::Identifier { .. } => {
            expr.clone()
        }
        MathExpr::BinaryOp { op, left, right } => MathExpr::bin(
            *op,
            resolve(left, bindings),
            resolve(right, bindings),
        ),
        MathExpr::Relation { rel, left, right } => MathExpr::rel(
            *rel,
            resolve(left, bindings),
            resolve(right, bindings),
        ),
        MathExpr::FunctionApply { head, args } => MathExpr::apply(
            resolve(head, bindings),
            args.iter().map(|a| resolve(a, bindings)).collect(),
        ),
        MathExpr::MacroCall { name, args } => MathExpr::call(
            name.clone(),
            args.iter().map(|a| resolve(a, bindings)).collect(),
        ),
        MathExpr::Group { child } => MathExpr::group(resolve(child, bindings)),
        MathExpr::Sequence { children } => MathExpr::Sequence {
            children: children.iter().map(|c| resolve(c, bindings)).collect(),
        },
    }
}

/// Renders a resolved expression as semantic LaTeX: macro calls and built-in
/// functions use the `\name@{arg}` form, everything else stays plain LaTeX.
/// The output parses back through `parse_latex`.
pub fn to_semantic_latex(
    expr: &MathExpr,
    lexicon: &ContentDictionary,
) -> Result<String, DisambiguationError> {
    if !expr.is_resolved() {
        return Err(DisambiguationError::Unresolved);
    }
    let semantic = semanticize(expr, lexicon)?;
    Ok(crate::render::render_latex(&semantic))
}

fn semanticize(
    expr: &MathExpr,
    lexicon: &ContentDictionary,
) -> Result<MathExpr, DisambiguationError> {
    Ok(match expr {
        MathExpr::FunctionApply { head, args } => {
            let args = args
                .iter()
                .map(|a| semanticize(a, lexicon))
                .collect::<Result<Vec<_>, _>>()?;
            match head.as_ref() {
                MathExpr::Identifier {
                    name,
                    subscript: None,
                } if BUILTIN_FUNCTIONS.contains(&name.as_str()) => {
                    check_arity(name, args.len(), lexicon)?;
                    MathExpr::call(name.clone(), args)
                }
                other => MathExpr::apply(semanticize(other, lexicon)?, args),
            }
        }
        MathExpr::MacroCall { name, args } => {
            let args = args
                .iter()
                .map(|a| semanticize(a, lexicon))
                .collect::<Result<Vec<_>, _>>()?;
            if !matches!(name.as_str(), "sum" | "prod" | "int" | "sqrt") {
                check_arity(name, args.len(), lexicon)?;
            }
            MathExpr::call(name.clone(), args)
        }
        MathExpr::BinaryOp { op, left, right } => MathExpr::bin(
            *op,
            semanticize(left, lexicon)?,
            semanticize(right, lexicon)?,
        ),
        MathExpr::Relation { rel, left, right } => MathExpr::rel(
            *rel,
            semanticize(left, lexicon)?,
            semanticize(right, lexicon)?,
        ),
        MathExpr::Identifier {
            name,
            subscript: Some(sub),
        } => MathExpr::ident_sub(name.clone(), semanticize(sub, lexicon)?),
        MathExpr::Group { child } => MathExpr::group(semanticize(child, lexicon)?),
        MathExpr::Sequence { children } => MathExpr::Sequence {
            children: children
                .iter()
                .map(|c| semanticize(c, lexicon))
                .collect::<Result<Vec<_>, _>>()?,
        },
        other => other.clone(),
    })
}

fn check_arity(
    name: &str,
    got: usize,
    lexicon: &ContentDictionary,
) -> Result<(), DisambiguationError> {
    if let Some(entry) = lexicon.get(name) {
        if entry.arity != got {
            return Err(DisambiguationError::ArityMismatch {
                name: name.to_string(),
                got,
                expected: entry.arity,
            });
        }
    }
    Ok(())
}

/// Whole-document analysis: dependency graph plus scoped bindings.
#[derive(Debug, Clone)]
pub struct DocumentAnalysis {
    pub nodes: Vec<FormulaNode>,
    pub bindings: Vec<SemanticBinding>,
}

impl DocumentAnalysis {
    pub fn analyze(doc: &Document, lexicon: &ContentDictionary) -> Self {
        let nodes = build_dependency_graph(doc);
        let bindings = bind_semantics(&nodes, doc, lexicon);
        DocumentAnalysis { nodes, bindings }
    }

    /// Bindings whose scope contains the given block.
    pub fn bindings_at(&self, block: usize) -> Vec<&SemanticBinding> {
        self.bindings.iter().filter(|b| b.contains(block)).collect()
    }

    /// Resolves one formula using the bindings in scope at its block.
    pub fn resolve_formula(&self, formula_id: &str) -> Result<MathExpr, DisambiguationError> {
        let node = self
            .nodes
            .iter()
            .find(|n| n.formula_id == formula_id)
            .ok_or_else(|| DisambiguationError::UnknownFormula(formula_id.to_string()))?;
        Ok(resolve(&node.expr, &self.bindings_at(node.block_index)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed() -> ContentDictionary {
        ContentDictionary::seed()
    }

    #[test]
    fn annotation_found_before_formula() {
        let doc =
            Document::from_latex("the prime counting function $\\pi(n)$").unwrap();
        let annotations = extract_annotations(&doc, "f0").unwrap();
        let hit = annotations
            .iter()
            .find(|a| a.phrase == "prime counting function")
            .expect("phrase extracted");
        assert_eq!(hit.distance, 0);
    }

    #[test]
    fn formula_without_text_has_no_annotations() {
        let doc = Document::from_latex("$x+y$").unwrap();
        assert!(extract_annotations(&doc, "f0").unwrap().is_empty());
    }

    #[test]
    fn unknown_formula_errors() {
        let doc = Document::from_latex("$x$").unwrap();
        assert_eq!(
            extract_annotations(&doc, "zzz"),
            Err(DisambiguationError::UnknownFormula("zzz".into()))
        );
    }

    #[test]
    fn annotations_attach_to_their_nearest_formula() {
        let doc = Document::from_latex(
            "let $\\theta$ be the polar angle and later $\\theta$ denotes the temperature",
        )
        .unwrap();
        let first = extract_annotations(&doc, "f0").unwrap();
        let second = extract_annotations(&doc, "f1").unwrap();
        assert!(first.iter().any(|a| a.phrase == "polar angle"));
        assert!(second.iter().any(|a| a.phrase == "temperature"));
        // "temperature" is two blocks away from the first formula.
        assert!(!first.iter().any(|a| a.phrase == "temperature"));
    }

    #[test]
    fn shared_constant_creates_forward_edge() {
        let doc = Document::from_latex("$\\pi(n)$ and then $\\pi(x+y)$").unwrap();
        let graph = build_dependency_graph(&doc);
        assert_eq!(graph[0].out_edges, vec!["f1".to_string()]);
        assert!(graph[1].out_edges.is_empty());
    }

    #[test]
    fn disjoint_formulas_have_no_edges() {
        let doc = Document::from_latex("$a+b$ then $x^{2}$").unwrap();
        let graph = build_dependency_graph(&doc);
        assert!(graph.iter().all(|n| n.out_edges.is_empty()));
    }

    #[test]
    fn three_formulas_sharing_x_have_three_forward_edges() {
        let doc = Document::from_latex("$x$ then $x+1$ then $x^{2}$").unwrap();
        let graph = build_dependency_graph(&doc);
        let edge_count: usize = graph.iter().map(|n| n.out_edges.len()).sum();
        assert_eq!(edge_count, 3);
        assert_eq!(graph[0].out_edges, vec!["f1", "f2"]);
        assert_eq!(graph[1].out_edges, vec!["f2"]);
    }

    #[test]
    fn prime_counting_context_binds_pi() {
        let doc =
            Document::from_latex("the prime counting function $\\pi(n)$").unwrap();
        let graph = build_dependency_graph(&doc);
        let bindings = bind_semantics(&graph, &doc, &seed());
        assert_eq!(bindings.len(), 1);
        assert_eq!(bindings[0].symbol, "\\pi");
        assert_eq!(bindings[0].macro_name, "nprimes");
        assert!(bindings[0].confidence > 0.0);
        assert_eq!(bindings[0].scope.1, doc.blocks.len());
    }

    #[test]
    fn no_annotations_means_no_bindings() {
        let doc = Document::from_latex("$\\pi(x+y)$").unwrap();
        let graph = build_dependency_graph(&doc);
        assert!(bind_semantics(&graph, &doc, &seed()).is_empty());
    }

    #[test]
    fn redefinition_splits_scopes() {
        let doc = Document::from_latex(
            "the heaviside step function $\\theta(x)$ text \
             the jacobi theta function $\\theta(z)$ more",
        )
        .unwrap();
        let graph = build_dependency_graph(&doc);
        let bindings = bind_semantics(&graph, &doc, &seed());
        assert_eq!(bindings.len(), 2);
        assert_eq!(bindings[0].macro_name, "HeavisideTheta");
        assert_eq!(bindings[1].macro_name, "JacobiTheta");
        assert_eq!(bindings[0].scope.1, bindings[1].scope.0);
        assert!(bindings[0].scope.0 < bindings[0].scope.1);
    }

    #[test]
    fn resolve_collapses_bound_head_to_macro_call() {
        let doc =
            Document::from_latex("the prime counting function $\\pi(x+y)$").unwrap();
        let analysis = DocumentAnalysis::analyze(&doc, &seed());
        let resolved = analysis.resolve_formula("f0").unwrap();
        assert_eq!(
            resolved,
            MathExpr::call(
                "nprimes",
                vec![MathExpr::bin(
                    BinOp::Add,
                    MathExpr::ident("x"),
                    MathExpr::ident("y")
                )]
            )
        );
    }

    #[test]
    fn resolve_without_binding_falls_back_to_multiplication() {
        let expr = crate::parser::parse_latex(r"\pi(x+y)").unwrap();
        let resolved = resolve(&expr, &[]);
        assert_eq!(
            resolved,
            MathExpr::bin(
                BinOp::Mul,
                MathExpr::constant("pi"),
                MathExpr::group(MathExpr::bin(
                    BinOp::Add,
                    MathExpr::ident("x"),
                    MathExpr::ident("y")
                )),
            )
        );
    }

    #[test]
    fn resolve_is_identity_on_unambiguous_trees() {
        let expr = crate::parser::parse_latex(r"\sin(x)+1").unwrap();
        assert_eq!(resolve(&expr, &[]), expr);
    }

    #[test]
    fn resolve_is_idempotent() {
        let expr = crate::parser::parse_latex(r"E_{n}=2^{n}E_{n}(\frac{1}{2})").unwrap();
        let doc = Document::from_latex("the euler polynomial $E_{n}(x)$").unwrap();
        let analysis = DocumentAnalysis::analyze(&doc, &seed());
        let in_scope = analysis.bindings_at(doc.blocks.len() - 1);
        let once = resolve(&expr, &in_scope);
        let twice = resolve(&once, &in_scope);
        assert_eq!(once, twice);
        assert!(once.is_resolved());
    }

    #[test]
    fn subscript_absorbs_into_bound_macro_argument() {
        let doc = Document::from_latex(
            "the euler polynomial $E_{n}(x)$",
        )
        .unwrap();
        let analysis = DocumentAnalysis::analyze(&doc, &seed());
        let resolved = analysis.resolve_formula("f0").unwrap();
        assert_eq!(
            resolved,
            MathExpr::call(
                "EulerE",
                vec![MathExpr::ident("n"), MathExpr::ident("x")]
            )
        );
    }

    #[test]
    fn bare_subscripted_euler_number_uses_standard_notation() {
        let expr = crate::parser::parse_latex("E_{n}").unwrap();
        let resolved = resolve(&expr, &[]);
        assert_eq!(
            resolved,
            MathExpr::call("EulerNumber", vec![MathExpr::ident("n")])
        );
    }

    #[test]
    fn semantic_latex_uses_at_syntax() {
        let lexicon = seed();
        let expr = MathExpr::call("nprimes", vec![MathExpr::ident("n")]);
        assert_eq!(to_semantic_latex(&expr, &lexicon).unwrap(), r"\nprimes@{n}");
    }

    #[test]
    fn plain_content_renders_plain() {
        let lexicon = seed();
        let expr = crate::parser::parse_latex("a+b").unwrap();
        assert_eq!(to_semantic_latex(&expr, &lexicon).unwrap(), "a+b");
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let lexicon = seed();
        let expr = MathExpr::call(
            "nprimes",
            vec![MathExpr::ident("x"), MathExpr::ident("y")],
        );
        assert_eq!(
            to_semantic_latex(&expr, &lexicon),
            Err(DisambiguationError::ArityMismatch {
                name: "nprimes".into(),
                got: 2,
                expected: 1
            })
        );
    }

    #[test]
    fn semantic_latex_round_trips_through_the_parser() {
        let lexicon = seed();
        let expr = MathExpr::call(
            "EulerE",
            vec![
                MathExpr::ident("n"),
                MathExpr::bin(BinOp::Frac, MathExpr::number("1"), MathExpr::number("2")),
            ],
        );
        let text = to_semantic_latex(&expr, &lexicon).unwrap();
        assert_eq!(text, r"\EulerE@{n}@{\frac{1}{2}}");
        assert_eq!(crate::parser::parse_latex(&text).unwrap(), expr);
    }

    #[test]
    fn redefinition_does_not_change_earlier_resolution() {
        let with_redefinition = Document::from_latex(
            "the heaviside step function $\\theta(x)$ mid \
             the jacobi theta function $\\theta(z)$",
        )
        .unwrap();
        let without = Document::from_latex(
            "the heaviside step function $\\theta(x)$ mid",
        )
        .unwrap();
        let a = DocumentAnalysis::analyze(&with_redefinition, &seed());
        let b = DocumentAnalysis::analyze(&without, &seed());
        assert_eq!(
            a.resolve_formula("f0").unwrap(),
            b.resolve_formula("f0").unwrap()
        );
    }
}
