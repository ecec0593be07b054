//! Rewriting resolved expressions into computer-algebra-system syntax.
//!
//! Semantic macro calls instantiate the lexicon's per-CAS patterns; structural
//! nodes map through fixed tables. Every composite operand is parenthesized,
//! so output is unambiguous in all targets regardless of their precedence
//! rules. Constraints attached to used macros cannot travel inside a bare
//! expression string, so they surface as warnings instead of being dropped.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::ast::{BinOp, MathExpr, RelOp};
use crate::lexicon::ContentDictionary;
use crate::render::BUILTIN_FUNCTIONS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CasTarget {
    Mathematica,
    Maple,
    SymPyText,
}

impl CasTarget {
    pub fn as_str(&self) -> &'static str {
        match self {
            CasTarget::Mathematica => "Mathematica",
            CasTarget::Maple => "Maple",
            CasTarget::SymPyText => "SymPyText",
        }
    }
}

impl fmt::Display for CasTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("unsupported target `{0}`")]
    UnsupportedTarget(String),
}

impl FromStr for CasTarget {
    type Err = TranslateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "mathematica" => Ok(CasTarget::Mathematica),
            "maple" => Ok(CasTarget::Maple),
            "sympytext" | "sympy" => Ok(CasTarget::SymPyText),
            other => Err(TranslateError::UnsupportedTarget(other.to_string())),
        }
    }
}

/// Supported targets in stable order.
pub fn supported_targets() -> Vec<CasTarget> {
    vec![CasTarget::Mathematica, CasTarget::Maple, CasTarget::SymPyText]
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TranslationWarning {
    /// A constraint of a used macro that the output string cannot express.
    LossyConstraint { text: String },
    /// A macro with no translation; a placeholder symbol was emitted.
    UnknownMacroFallback { name: String },
    /// An ambiguous node reached translation; its multiplication reading was
    /// used. `position` is the node's preorder index.
    AmbiguityForced { position: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationResult {
    pub target: CasTarget,
    pub text: String,
    pub warnings: Vec<TranslationWarning>,
    /// True when no macro fell back to a placeholder.
    pub complete: bool,
}

/// Translates a resolved expression into the target syntax. Deterministic:
/// identical inputs produce identical text and warnings.
pub fn translate(
    expr: &MathExpr,
    target: CasTarget,
    lexicon: &ContentDictionary,
) -> TranslationResult {
    let mut ctx = Context {
        target,
        lexicon,
        warnings: Vec::new(),
        seen: BTreeSet::new(),
        preorder: 0,
    };
    let piece = ctx.tr(&expr.normalize());
    let complete = !ctx
        .warnings
        .iter()
        .any(|w| matches!(w, TranslationWarning::UnknownMacroFallback { .. }));
    TranslationResult {
        target,
        text: piece.text,
        warnings: ctx.warnings,
        complete,
    }
}

struct Piece {
    text: String,
    atom: bool,
}

impl Piece {
    fn atom(text: String) -> Self {
        Piece { text, atom: true }
    }
    fn composite(text: String) -> Self {
        Piece { text, atom: false }
    }
}

struct Context<'a> {
    target: CasTarget,
    lexicon: &'a ContentDictionary,
    warnings: Vec<TranslationWarning>,
    seen: BTreeSet<TranslationWarning>,
    preorder: usize,
}

impl<'a> Context<'a> {
    fn warn(&mut self, warning: TranslationWarning) {
        if self.seen.insert(warning.clone()) {
            self.warnings.push(warning);
        }
    }

    fn operand(&mut self, expr: &MathExpr) -> String {
        let piece = self.tr(expr);
        if piece.atom {
            piece.text
        } else {
            format!("({})", piece.text)
        }
    }

    fn tr(&mut self, expr: &MathExpr) -> Piece {
        self.preorder += 1;
        let position = self.preorder;
        match expr {
            MathExpr::Number { literal } => Piece::atom(literal.clone()),
            MathExpr::Identifier { name, subscript } => self.tr_identifier(name, subscript),
            MathExpr::Constant { name } => Piece::atom(
                match (name.as_str(), self.target) {
                    ("pi", CasTarget::SymPyText) => "pi",
                    ("pi", _) => "Pi",
                    (other, _) => other,
                }
                .to_string(),
            ),
            MathExpr::BinaryOp { op, left, right } => self.tr_binary(*op, left, right),
            MathExpr::Relation { rel, left, right } => {
                let l = self.tr(left).text;
                let r = self.tr(right).text;
                let symbol = match (rel, self.target) {
                    (RelOp::Eq, CasTarget::Maple) => "=",
                    (RelOp::Eq, _) => "==",
                    (RelOp::Lt, _) => "<",
                    (RelOp::Gt, _) => ">",
                };
                Piece::composite(format!("{l} {symbol} {r}"))
            }
            MathExpr::FunctionApply { head, args } => match head.as_ref() {
                MathExpr::Identifier {
                    name,
                    subscript: None,
                } if BUILTIN_FUNCTIONS.contains(&name.as_str()) => self.tr_macro(name, args),
                other => {
                    let head_text = self.operand(other);
                    let args = self.tr_args(args);
                    Piece::atom(match self.target {
                        CasTarget::Mathematica => format!("{head_text}[{args}]"),
                        _ => format!("{head_text}({args})"),
                    })
                }
            },
            MathExpr::MacroCall { name, args } => self.tr_macro(name, args),
            MathExpr::Group { child } => self.tr(child),
            MathExpr::Sequence { children } => {
                let parts: Vec<String> = children.iter().map(|c| self.tr(c).text).collect();
                Piece::composite(parts.join(", "))
            }
            MathExpr::Ambiguous { interpretations } => {
                self.warn(TranslationWarning::AmbiguityForced { position });
                self.tr(&interpretations[0])
            }
        }
    }

    fn tr_identifier(&mut self, name: &str, subscript: &Option<Box<MathExpr>>) -> Piece {
        match subscript {
            None => Piece::atom(name.to_string()),
            Some(sub) => {
                let sub_text = self.tr(sub).text;
                Piece::atom(match self.target {
                    CasTarget::Mathematica => format!("Subscript[{name}, {sub_text}]"),
                    CasTarget::Maple => format!("{name}[{sub_text}]"),
                    CasTarget::SymPyText => {
                        let clean: String =
                            sub_text.chars().filter(|c| c.is_alphanumeric()).collect();
                        format!("{name}_{clean}")
                    }
                })
            }
        }
    }

    fn tr_binary(&mut self, op: BinOp, left: &MathExpr, right: &MathExpr) -> Piece {
        match op {
            BinOp::Add => {
                let l = self.tr(left).text;
                let r = self.operand_additive(right);
                Piece::composite(format!("{l} + {r}"))
            }
            BinOp::Sub => {
                if matches!(left, MathExpr::Number { literal } if literal == "0") {
                    let r = self.operand(right);
                    return Piece::composite(format!("-{r}"));
                }
                let l = self.tr(left).text;
                let r = self.operand_additive(right);
                Piece::composite(format!("{l} - {r}"))
            }
            BinOp::Mul => {
                let l = self.operand(left);
                let r = self.operand(right);
                Piece::composite(format!("{l}*{r}"))
            }
            BinOp::Div | BinOp::Frac => {
                let l = self.tr(left).text;
                let r = self.tr(right).text;
                Piece::composite(format!("({l})/({r})"))
            }
            BinOp::Pow => {
                let l = self.operand(left);
                let r = self.operand(right);
                let op = match self.target {
                    CasTarget::SymPyText => "**",
                    _ => "^",
                };
                Piece::composite(format!("{l}{op}{r}"))
            }
        }
    }

    // Additive right operands keep their sign readable: `a + (b + c)` is not
    // required, but `a - (b - c)` is.
    fn operand_additive(&mut self, expr: &MathExpr) -> String {
        let piece = self.tr(expr);
        if piece.atom
            || !matches!(
                expr,
                MathExpr::BinaryOp {
                    op: BinOp::Add | BinOp::Sub,
                    ..
                } | MathExpr::Relation { .. }
                    | MathExpr::Sequence { .. }
            )
        {
            piece.text
        } else {
            format!("({})", piece.text)
        }
    }

    fn tr_args(&mut self, args: &[MathExpr]) -> String {
        args.iter()
            .map(|a| self.tr(a).text)
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn tr_macro(&mut self, name: &str, args: &[MathExpr]) -> Piece {
        match name {
            "sum" | "prod" => {
                if let Some(piece) = self.tr_big_operator(name, args) {
                    return piece;
                }
                return self.placeholder(name, args);
            }
            "int" => return self.placeholder(name, args),
            _ => {}
        }
        let Some(entry) = self.lexicon.get(name) else {
            return self.placeholder(name, args);
        };
        let translated: Vec<String> = args.iter().map(|a| self.tr(a).text).collect();
        match entry.instantiate(self.target.as_str(), &translated) {
            Some(text) if entry.arity == args.len() => {
                for constraint in &entry.constraints {
                    self.warn(TranslationWarning::LossyConstraint {
                        text: format!("{}: {}", entry.name, constraint.describe()),
                    });
                }
                Piece::atom(text)
            }
            _ => self.placeholder(name, args),
        }
    }

    // `\sum_{i=1}^{n} body` with well-formed bounds maps structurally;
    // anything else falls back to a placeholder.
    fn tr_big_operator(&mut self, name: &str, args: &[MathExpr]) -> Option<Piece> {
        let [lower, upper, body] = args else {
            return None;
        };
        let MathExpr::Relation {
            rel: RelOp::Eq,
            left,
            right,
        } = lower
        else {
            return None;
        };
        let MathExpr::Identifier {
            name: var,
            subscript: None,
        } = left.as_ref()
        else {
            return None;
        };
        let var = var.clone();
        let start = self.tr(right).text;
        let end = self.tr(upper).text;
        let body = self.tr(body).text;
        let text = match (name, self.target) {
            ("sum", CasTarget::Mathematica) => format!("Sum[{body}, {{{var}, {start}, {end}}}]"),
            ("prod", CasTarget::Mathematica) => {
                format!("Product[{body}, {{{var}, {start}, {end}}}]")
            }
            ("sum", CasTarget::Maple) => format!("add({body}, {var} = {start} .. {end})"),
            ("prod", CasTarget::Maple) => format!("mul({body}, {var} = {start} .. {end})"),
            ("sum", CasTarget::SymPyText) => format!("Sum({body}, ({var}, {start}, {end}))"),
            ("prod", CasTarget::SymPyText) => format!("Product({body}, ({var}, {start}, {end}))"),
            _ => return None,
        };
        Some(Piece::atom(text))
    }

    fn placeholder(&mut self, name: &str, args: &[MathExpr]) -> Piece {
        self.warn(TranslationWarning::UnknownMacroFallback {
            name: name.to_string(),
        });
        let mut mangled: String = name.chars().filter(|c| c.is_alphanumeric()).collect();
        if let Some(first) = mangled.get_mut(0..1) {
            first.make_ascii_uppercase();
        }
        let head = format!("unknown{mangled}");
        let text = if args.is_empty() {
            head
        } else {
            let args = self.tr_args(args);
            match self.target {
                CasTarget::Mathematica => format!("{head}[{args}]"),
                _ => format!("{head}({args})"),
            }
        };
        // Inline comments are whitespace in Mathematica and Maple.
        match self.target {
            CasTarget::Mathematica | CasTarget::Maple => {
                Piece::composite(format!("{text} (* \\{name} *)"))
            }
            CasTarget::SymPyText => Piece::atom(text),
        }
    }
}
