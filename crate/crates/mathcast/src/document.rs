//! Plain LaTeX documents as alternating text and formula blocks.
//!
//! Formulas are delimited by `$...$`, `$$...$$`, or
//! `\begin{equation}...\end{equation}`; `\section` and `\subsection` record
//! section boundaries. Everything else is kept as text so the disambiguator
//! can mine it for definition phrases.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::ast::MathExpr;
use crate::parser::{parse_latex, LatexError};

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Text(String),
    Formula {
        id: String,
        expr: MathExpr,
        /// Character span of the formula source in the input, delimiters excluded.
        span: (usize, usize),
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub blocks: Vec<Block>,
    /// Block indices at which a new section starts.
    pub section_boundaries: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unterminated formula starting at offset {0}")]
    Unterminated(usize),
    #[error("formula at offset {offset} does not parse: {source}")]
    Formula {
        offset: usize,
        #[source]
        source: LatexError,
    },
}

impl Document {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, DocumentError> {
        let text = fs::read_to_string(path)?;
        Self::from_latex(&text)
    }

    /// Splits LaTeX source into blocks. Formula ids are `f0`, `f1`, ... in
    /// document order; `%` comments are stripped.
    pub fn from_latex(source: &str) -> Result<Self, DocumentError> {
        let chars: Vec<char> = strip_comments(source).chars().collect();
        let mut doc = Document::default();
        let mut text_buf = String::new();
        let mut formula_count = 0usize;
        let mut i = 0;

        while i < chars.len() {
            if chars[i] == '$' {
                let display = i + 1 < chars.len() && chars[i + 1] == '$';
                let delim_len = if display { 2 } else { 1 };
                let content_start = i + delim_len;
                let close = find_dollar_close(&chars, content_start, display)
                    .ok_or(DocumentError::Unterminated(i))?;
                let content: String = chars[content_start..close].iter().collect();
                flush_text(&mut doc, &mut text_buf);
                push_formula(
                    &mut doc,
                    &content,
                    (content_start, close),
                    &mut formula_count,
                )?;
                i = close + delim_len;
                continue;
            }
            if starts_with(&chars, i, "\\begin{equation}") {
                let content_start = i + "\\begin{equation}".len();
                let end = find_substring(&chars, content_start, "\\end{equation}")
                    .ok_or(DocumentError::Unterminated(i))?;
                let content: String = chars[content_start..end].iter().collect();
                flush_text(&mut doc, &mut text_buf);
                push_formula(&mut doc, &content, (content_start, end), &mut formula_count)?;
                i = end + "\\end{equation}".len();
                continue;
            }
            if starts_with(&chars, i, "\\section{") || starts_with(&chars, i, "\\subsection{") {
                let brace = chars[i..].iter().position(|&c| c == '{').unwrap() + i;
                flush_text(&mut doc, &mut text_buf);
                doc.section_boundaries.push(doc.blocks.len());
                // Keep the title words available to annotation extraction.
                let close = find_char(&chars, brace + 1, '}')
                    .ok_or(DocumentError::Unterminated(i))?;
                let title: String = chars[brace + 1..close].iter().collect();
                text_buf.push_str(&title);
                text_buf.push(' ');
                i = close + 1;
                continue;
            }
            text_buf.push(chars[i]);
            i += 1;
        }
        flush_text(&mut doc, &mut text_buf);
        Ok(doc)
    }

    pub fn formulas(&self) -> impl Iterator<Item = (usize, &str, &MathExpr)> {
        self.blocks.iter().enumerate().filter_map(|(i, b)| match b {
            Block::Formula { id, expr, .. } => Some((i, id.as_str(), expr)),
            Block::Text(_) => None,
        })
    }

    pub fn formula_block(&self, formula_id: &str) -> Option<usize> {
        self.blocks.iter().position(
            |b| matches!(b, Block::Formula { id, .. } if id == formula_id),
        )
    }
}

fn strip_comments(source: &str) -> String {
    let mut out = String::with_capacity(source.len());
    for line in source.lines() {
        let mut kept = line;
        let mut search_from = 0;
        while let Some(pos) = kept[search_from..].find('%') {
            let abs = search_from + pos;
            if abs == 0 || kept.as_bytes()[abs - 1] != b'\\' {
                kept = &kept[..abs];
                break;
            }
            search_from = abs + 1;
        }
        out.push_str(kept);
        out.push('\n');
    }
    out
}

fn flush_text(doc: &mut Document, buf: &mut String) {
    let trimmed = buf.trim();
    if !trimmed.is_empty() {
        doc.blocks.push(Block::Text(trimmed.to_string()));
    }
    buf.clear();
}

fn push_formula(
    doc: &mut Document,
    content: &str,
    span: (usize, usize),
    count: &mut usize,
) -> Result<(), DocumentError> {
    let trimmed = content.trim();
    if trimmed.is_empty() {
        return Ok(());
    }
    let expr = parse_latex(trimmed).map_err(|source| DocumentError::Formula {
        offset: span.0,
        source,
    })?;
    doc.blocks.push(Block::Formula {
        id: format!("f{}", *count),
        expr,
        span,
    });
    *count += 1;
    Ok(())
}

fn starts_with(chars: &[char], at: usize, needle: &str) -> bool {
    let needle: Vec<char> = needle.chars().collect();
    chars.len() >= at + needle.len() && chars[at..at + needle.len()] == needle[..]
}

fn find_dollar_close(chars: &[char], from: usize, display: bool) -> Option<usize> {
    let mut i = from;
    while i < chars.len() {
        if chars[i] == '$' && (i == 0 || chars[i - 1] != '\\') {
            if !display {
                return Some(i);
            }
            if i + 1 < chars.len() && chars[i + 1] == '$' {
                return Some(i);
            }
        }
        i += 1;
    }
    None
}

fn find_substring(chars: &[char], from: usize, needle: &str) -> Option<usize> {
    (from..chars.len()).find(|&i| starts_with(chars, i, needle))
}

fn find_char(chars: &[char], from: usize, needle: char) -> Option<usize> {
    (from..chars.len()).find(|&i| chars[i] == needle)
}

/// Lowercased word tokens of a text fragment.
pub fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}
