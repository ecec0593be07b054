//! Content dictionary of semantic macros.
//!
//! A [`SemanticMacro`] names a mathematical concept (e.g. `nprimes` for the
//! prime counting function) and carries the keywords used
//! to find it from document context, per-CAS translation patterns with `$0`,
//! `$1`, ... argument slots, and constraints that cannot be expressed in a
//! bare expression string.
//!
//! The on-disk form is JSON lines: the first line is a header object with
//! mandatory `version` and `source` keys, each following line is one macro.
//! The exact schema is documented in the repository README.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Domain restriction for one variable or argument slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSpec {
    Real { min: f64, max: f64 },
    Integers { min: i64, max: i64 },
}

impl DomainSpec {
    pub fn is_empty(&self) -> bool {
        match self {
            DomainSpec::Real { min, max } => min > max,
            DomainSpec::Integers { min, max } => min > max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// The variable must lie in the given set for evaluation to be valid.
    Domain(DomainSpec),
    /// Real points the sampler must keep `pole_epsilon` away from.
    AvoidPoles(Vec<f64>),
    /// Free-text constraint no sampler can enforce.
    Custom(String),
}

/// A constraint attached to a semantic macro. `applies_to` names either an
/// argument slot (`$0`) or a concrete variable once bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub applies_to: String,
    #[serde(flatten)]
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn describe(&self) -> String {
        match &self.kind {
            ConstraintKind::Domain(DomainSpec::Real { min, max }) => {
                format!("{} in [{min}, {max}]", self.applies_to)
            }
            ConstraintKind::Domain(DomainSpec::Integers { min, max }) => {
                format!("{} integer in [{min}, {max}]", self.applies_to)
            }
            ConstraintKind::AvoidPoles(points) => {
                format!("{} away from poles at {points:?}", self.applies_to)
            }
            ConstraintKind::Custom(text) => text.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticMacro {
    pub name: String,
    pub arity: usize,
    pub description: String,
    pub keywords: Vec<String>,
    pub cas_patterns: BTreeMap<String, String>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    #[serde(default)]
    pub branch_cut_note: Option<String>,
}

impl SemanticMacro {
    /// Instantiates the pattern for `target`, substituting `$k` slots.
    /// Returns `None` when the macro has no pattern for the target.
    pub fn instantiate(&self, target: &str, args: &[String]) -> Option<String> {
        let pattern = self.cas_patterns.get(target)?;
        Some(instantiate_pattern(pattern, args))
    }

    /// Best Jaccard overlap between the query tokens and any single keyword
    /// phrase, so an exact keyword match scores 1.0.
    fn keyword_score(&self, query: &BTreeSet<String>) -> f64 {
        self.keywords
            .iter()
            .map(|keyword| {
                let tokens: BTreeSet<String> = keyword
                    .split_whitespace()
                    .map(|t| t.to_lowercase())
                    .collect();
                let intersection = query.intersection(&tokens).count();
                if intersection == 0 {
                    0.0
                } else {
                    intersection as f64 / query.union(&tokens).count() as f64
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Replaces `$0..$k` slots in a pattern. Slots are substituted verbatim;
/// patterns carry their own delimiters.
pub fn instantiate_pattern(pattern: &str, args: &[String]) -> String {
    let mut out = String::with_capacity(pattern.len());
    let mut chars = pattern.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '$' && chars.peek().is_some_and(|d| d.is_ascii_digit()) {
            let mut index = 0usize;
            while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                index = index * 10 + d as usize;
                chars.next();
            }
            match args.get(index) {
                Some(arg) => out.push_str(arg),
                None => out.push_str(&format!("${index}")),
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// Highest slot index referenced by a pattern, if any.
fn max_slot(pattern: &str) -> Option<usize> {
    let mut max = None;
    let mut chars = pattern.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '$' && chars.peek().is_some_and(|d| d.is_ascii_digit()) {
            let mut index = 0usize;
            while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                index = index * 10 + d as usize;
                chars.next();
            }
            max = Some(max.map_or(index, |m: usize| m.max(index)));
        }
    }
    max
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaViolation {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl fmt::Display for SchemaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, field `{}`: {}", self.line, self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid lexicon: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<SchemaViolation>),
    #[error("macro `{0}` not found")]
    NotFound(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Header {
    version: String,
    source: String,
}

/// An immutable, validated collection of semantic macros.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentDictionary {
    macros: Vec<SemanticMacro>,
    by_name: BTreeMap<String, usize>,
    pub version: String,
    pub source: String,
}

impl ContentDictionary {
    pub fn empty() -> Self {
        ContentDictionary {
            macros: Vec::new(),
            by_name: BTreeMap::new(),
            version: String::new(),
            source: String::new(),
        }
    }

    /// The lexicon bundled with the crate.
    pub fn seed() -> Self {
        Self::from_jsonl(include_str!("../data/lexicon.jsonl"))
            .expect("bundled lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path)?;
        Self::from_jsonl(&text)
    }

    /// Parses JSON-lines text. All schema violations are collected and
    /// reported together; an empty file is a valid empty dictionary.
    pub fn from_jsonl(text: &str) -> Result<Self, LexiconError> {
        let mut violations = Vec::new();
        let mut macros: Vec<SemanticMacro> = Vec::new();
        let mut by_name = BTreeMap::new();
        let mut header: Option<Header> = None;

        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if header.is_none() {
                match serde_json::from_str::<Header>(line) {
                    Ok(h) => header = Some(h),
                    Err(e) => violations.push(SchemaViolation {
                        line: line_no,
                        field: "version".into(),
                        message: format!("header with `version` and `source` required: {e}"),
                    }),
                }
                continue;
            }
            let entry: SemanticMacro = match serde_json::from_str(line) {
                Ok(m) => m,
                Err(e) => {
                    violations.push(SchemaViolation {
                        line: line_no,
                        field: "<record>".into(),
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            validate_macro(&entry, line_no, &mut violations);
            if by_name.contains_key(&entry.name) {
                violations.push(SchemaViolation {
                    line: line_no,
                    field: "name".into(),
                    message: format!("duplicate macro `{}`", entry.name),
                });
                continue;
            }
            by_name.insert(entry.name.clone(), macros.len());
            macros.push(entry);
        }

        if !violations.is_empty() {
            return Err(LexiconError::Invalid(violations));
        }
        let header = header.unwrap_or(Header {
            version: String::new(),
            source: String::new(),
        });
        Ok(ContentDictionary {
            macros,
            by_name,
            version: header.version,
            source: header.source,
        })
    }

    /// Serializes back to the JSON-lines form accepted by [`Self::from_jsonl`].
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let header = Header {
            version: self.version.clone(),
            source: self.source.clone(),
        };
        out.push_str(&serde_json::to_string(&header).expect("header serializes"));
        out.push('\n');
        for m in &self.macros {
            out.push_str(&serde_json::to_string(m).expect("macro serializes"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LexiconError> {
        fs::write(path, self.to_jsonl())?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.macros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.macros.is_empty()
    }

    pub fn macros(&self) -> impl Iterator<Item = &SemanticMacro> {
        self.macros.iter()
    }

    /// Exact-name lookup.
    pub fn lookup(&self, name: &str) -> Result<&SemanticMacro, LexiconError> {
        self.by_name
            .get(name)
            .map(|&i| &self.macros[i])
            .ok_or_else(|| LexiconError::NotFound(name.to_string()))
    }

    pub fn get(&self, name: &str) -> Option<&SemanticMacro> {
        self.by_name.get(name).map(|&i| &self.macros[i])
    }

    /// Ranks macros by Jaccard overlap between the query's whitespace tokens
    /// and the macro's keyword phrases (best phrase counts). Zero scores are
    /// omitted; ties break by macro name.
    pub fn lookup_by_keywords(&self, phrases: &[&str]) -> Vec<(&SemanticMacro, f64)> {
        let query: BTreeSet<String> = phrases
            .iter()
            .flat_map(|p| p.split_whitespace())
            .map(|t| t.to_lowercase())
            .collect();
        if query.is_empty() {
            return Vec::new();
        }
        let mut scored: Vec<(&SemanticMacro, f64)> = self
            .macros
            .iter()
            .filter_map(|m| {
                let score = m.keyword_score(&query);
                (score > 0.0).then_some((m, score))
            })
            .collect();
        scored.sort_by(|a, b| {
            b.1.total_cmp(&a.1).then_with(|| a.0.name.cmp(&b.0.name))
        });
        scored
    }
}

fn validate_macro(m: &SemanticMacro, line: usize, violations: &mut Vec<SchemaViolation>) {
    if m.name.is_empty() {
        violations.push(SchemaViolation {
            line,
            field: "name".into(),
            message: "empty name".into(),
        });
    }
    if m.keywords.is_empty() {
        violations.push(SchemaViolation {
            line,
            field: "keywords".into(),
            message: "at least one keyword required".into(),
        });
    }
    if m.cas_patterns.is_empty() {
        violations.push(SchemaViolation {
            line,
            field: "cas_patterns".into(),
            message: "at least one pattern required".into(),
        });
    }
    for (target, pattern) in &m.cas_patterns {
        let implied = max_slot(pattern).map_or(0, |s| s + 1);
        if implied != m.arity {
            violations.push(SchemaViolation {
                line,
                field: format!("cas_patterns.{target}"),
                message: format!(
                    "pattern `{pattern}` implies arity {implied}, declared {}",
                    m.arity
                ),
            });
        }
    }
    for c in &m.constraints {
        if let ConstraintKind::Domain(d) = &c.kind {
            if d.is_empty() {
                violations.push(SchemaViolation {
                    line,
                    field: "constraints".into(),
                    message: format!("empty domain for `{}`", c.applies_to),
                });
            }
        }
    }
}
