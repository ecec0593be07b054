//! Recursive-descent parser for a documented subset of presentation LaTeX.
//!
//! Supported syntax: single-letter identifiers with sub/superscripts, decimal
//! numbers, `+ - \cdot / ^ _ = < >`, parens (plain or `\left`/`\right`), brace
//! groups, `\frac \tfrac \sqrt \sum \prod \int`, the function macros
//! `\sin \cos \tan \exp \ln \log \Gamma`, the symbols `\pi \theta`, and
//! semantic macro calls of the form `\name@{arg}@{arg}`.
//!
//! Precedence, tightest first: scripts, implicit multiplication, explicit
//! `\cdot` and `/`, additive `+ -`, relations.
//!
//! Juxtaposing an identifier or constant with a parenthesized group produces
//! an [`MathExpr::Ambiguous`] node holding both the multiplication and the
//! function-application reading; resolution is the disambiguation stage's job,
//! not the parser's.

use thiserror::Error;

use crate::ast::{BinOp, MathExpr, RelOp};
use crate::render::BUILTIN_FUNCTIONS;
use crate::token::{tokenize, MathToken, TokenKind, TokenizeError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatexError {
    #[error(transparent)]
    Tokenize(#[from] TokenizeError),
    #[error("parse error at position {position}: expected {expected}")]
    Parse { position: usize, expected: String },
    #[error("unknown macro \\{name}")]
    UnknownMacro { name: String },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// When set, macros outside the grammar subset are an error instead of
    /// being kept as raw `MacroCall` nodes.
    pub strict: bool,
}

/// Parses a math-mode LaTeX string into a normalized [`MathExpr`].
pub fn parse_latex(input: &str) -> Result<MathExpr, LatexError> {
    parse_latex_with(input, ParseOptions::default())
}

/// Like [`parse_latex`] but rejecting unknown macros.
pub fn parse_latex_strict(input: &str) -> Result<MathExpr, LatexError> {
    parse_latex_with(input, ParseOptions { strict: true })
}

pub fn parse_latex_with(input: &str, options: ParseOptions) -> Result<MathExpr, LatexError> {
    let tokens = tokenize(input)?;
    parse_tokens(&tokens, options)
}

/// Parses a pre-tokenized stream. Exposed so callers holding tokens (editors,
/// corpus scanners) can skip re-lexing.
pub fn parse_tokens(tokens: &[MathToken], options: ParseOptions) -> Result<MathExpr, LatexError> {
    let mut parser = Parser {
        tokens,
        pos: 0,
        strict: options.strict,
    };
    let expr = parser.parse_expression()?;
    if let Some(tok) = parser.peek() {
        return Err(parser.error_at(tok.position, "end of input"));
    }
    Ok(expr.normalize())
}

struct Atom {
    expr: MathExpr,
    /// True when this atom was a bare `(...)` (or `\left(...\right)`) with no
    /// scripts attached; only such atoms can fuse into an ambiguity.
    bare_paren: bool,
}

struct Parser<'a> {
    tokens: &'a [MathToken],
    pos: usize,
    strict: bool,
}

const NON_ATOM_CONTROL: &[&str] = &["\\cdot", "\\right", "\\}"];

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&MathToken> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<&MathToken> {
        let tok = self.tokens.get(self.pos);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn current_position(&self) -> usize {
        self.peek()
            .map(|t| t.position)
            .or_else(|| self.tokens.last().map(|t| t.position + t.text.chars().count()))
            .unwrap_or(0)
    }

    fn error(&self, expected: &str) -> LatexError {
        self.error_at(self.current_position(), expected)
    }

    fn error_at(&self, position: usize, expected: &str) -> LatexError {
        LatexError::Parse {
            position,
            expected: expected.to_string(),
        }
    }

    fn eat_operator(&mut self, text: &str) -> bool {
        if matches!(self.peek(), Some(t) if t.kind == TokenKind::Operator && t.text == text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_operator(&mut self, text: &str) -> Result<(), LatexError> {
        if self.eat_operator(text) {
            Ok(())
        } else {
            Err(self.error(&format!("`{text}`")))
        }
    }

    // expression := additive (relation additive)?
    fn parse_expression(&mut self) -> Result<MathExpr, LatexError> {
        let left = self.parse_additive()?;
        if matches!(self.peek(), Some(t) if t.kind == TokenKind::Relation) {
            let rel = match self.advance().unwrap().text.as_str() {
                "=" => RelOp::Eq,
                "<" => RelOp::Lt,
                ">" => RelOp::Gt,
                _ => unreachable!(),
            };
            let right = self.parse_additive()?;
            if matches!(self.peek(), Some(t) if t.kind == TokenKind::Relation) {
                return Err(self.error("a single relation per expression"));
            }
            return Ok(MathExpr::rel(rel, left, right));
        }
        Ok(left)
    }

    // additive := [+|-] multiplicative ((+|-) multiplicative)*
    fn parse_additive(&mut self) -> Result<MathExpr, LatexError> {
        let mut acc = if self.eat_operator("-") {
            MathExpr::bin(
                BinOp::Sub,
                MathExpr::number("0"),
                self.parse_multiplicative()?,
            )
        } else {
            self.eat_operator("+");
            self.parse_multiplicative()?
        };
        loop {
            if self.eat_operator("+") {
                acc = MathExpr::bin(BinOp::Add, acc, self.parse_multiplicative()?);
            } else if self.eat_operator("-") {
                acc = MathExpr::bin(BinOp::Sub, acc, self.parse_multiplicative()?);
            } else {
                return Ok(acc);
            }
        }
    }

    // multiplicative := juxtaposition ((\cdot|*|/) juxtaposition)*
    fn parse_multiplicative(&mut self) -> Result<MathExpr, LatexError> {
        let mut acc = self.parse_juxtaposition()?;
        loop {
            let explicit_mul = matches!(
                self.peek(),
                Some(t) if (t.kind == TokenKind::ControlSequence && t.text == "\\cdot")
                    || (t.kind == TokenKind::Operator && t.text == "*")
            );
            if explicit_mul {
                self.pos += 1;
                acc = MathExpr::bin(BinOp::Mul, acc, self.parse_juxtaposition()?);
            } else if self.eat_operator("/") {
                acc = MathExpr::bin(BinOp::Div, acc, self.parse_juxtaposition()?);
            } else {
                return Ok(acc);
            }
        }
    }

    // juxtaposition := postfix_atom+ with the symbol-parenthesis ambiguity rule
    fn parse_juxtaposition(&mut self) -> Result<MathExpr, LatexError> {
        let mut atoms: Vec<Atom> = Vec::new();
        while self.at_atom_start() {
            atoms.push(self.parse_postfix_atom()?);
        }
        if atoms.is_empty() {
            return Err(self.error("an expression"));
        }

        // Fuse `symbol (group)` pairs into ambiguity nodes before folding.
        let mut combined: Vec<Atom> = Vec::new();
        for atom in atoms {
            let fuse = atom.bare_paren
                && matches!(
                    combined.last().map(|a| &a.expr),
                    Some(MathExpr::Identifier { .. }) | Some(MathExpr::Constant { .. })
                );
            if fuse {
                let head = combined.pop().unwrap().expr;
                let args = match atom.expr {
                    MathExpr::Group { child } => match *child {
                        MathExpr::Sequence { children } => children,
                        other => vec![other],
                    },
                    other => vec![other],
                };
                combined.push(Atom {
                    expr: MathExpr::juxtaposition_ambiguity(head, args),
                    bare_paren: false,
                });
            } else {
                combined.push(atom);
            }
        }

        let mut iter = combined.into_iter();
        let mut acc = iter.next().unwrap().expr;
        for atom in iter {
            acc = MathExpr::bin(BinOp::Mul, acc, atom.expr);
        }
        Ok(acc)
    }

    fn at_atom_start(&self) -> bool {
        match self.peek() {
            Some(t) => match t.kind {
                TokenKind::Letter | TokenKind::Digit | TokenKind::OpenGroup => true,
                TokenKind::Operator => t.text == "(",
                TokenKind::ControlSequence => !NON_ATOM_CONTROL.contains(&t.text.as_str()),
                _ => false,
            },
            None => false,
        }
    }

    // postfix_atom := atom_core with at most one subscript then one superscript
    fn parse_postfix_atom(&mut self) -> Result<Atom, LatexError> {
        let mut atom = self.parse_atom_core()?;
        let mut saw_superscript = false;
        loop {
            match self.peek().map(|t| t.kind) {
                Some(TokenKind::Subscript) => {
                    let position = self.peek().unwrap().position;
                    if saw_superscript {
                        return Err(self.error_at(position, "subscript before superscript"));
                    }
                    self.pos += 1;
                    let sub = self.parse_script_operand()?;
                    atom.expr = match atom.expr {
                        MathExpr::Identifier {
                            name,
                            subscript: None,
                        } => MathExpr::ident_sub(name, sub),
                        _ => {
                            return Err(
                                self.error_at(position, "an unsubscripted identifier before `_`")
                            )
                        }
                    };
                    atom.bare_paren = false;
                }
                Some(TokenKind::Superscript) => {
                    let position = self.peek().unwrap().position;
                    if saw_superscript {
                        return Err(self.error_at(position, "at most one superscript"));
                    }
                    self.pos += 1;
                    let exp = self.parse_script_operand()?;
                    atom.expr = MathExpr::bin(BinOp::Pow, atom.expr, exp);
                    atom.bare_paren = false;
                    saw_superscript = true;
                }
                _ => return Ok(atom),
            }
        }
    }

    fn parse_script_operand(&mut self) -> Result<MathExpr, LatexError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::OpenGroup => {
                self.pos += 1;
                let expr = self.parse_group_body(TokenKind::CloseGroup, "}")?;
                Ok(expr)
            }
            Some(t) if t.kind == TokenKind::Letter => {
                let name = t.text.clone();
                self.pos += 1;
                Ok(MathExpr::ident(name))
            }
            Some(t) if t.kind == TokenKind::Digit => {
                let digit = t.text.clone();
                self.pos += 1;
                Ok(MathExpr::number(digit))
            }
            Some(t) if t.kind == TokenKind::ControlSequence => Ok(self.parse_atom_core()?.expr),
            _ => Err(self.error("a script argument")),
        }
    }

    /// Parses everything up to (not including) a group closer, allowing
    /// comma-separated sequences.
    fn parse_group_body(
        &mut self,
        closer_kind: TokenKind,
        closer_text: &str,
    ) -> Result<MathExpr, LatexError> {
        let first = self.parse_expression()?;
        let mut children = vec![first];
        while matches!(self.peek(), Some(t) if t.kind == TokenKind::Operator && t.text == ",") {
            self.pos += 1;
            children.push(self.parse_expression()?);
        }
        match self.peek() {
            Some(t) if t.kind == closer_kind && t.text == closer_text => {
                self.pos += 1;
            }
            _ => return Err(self.error(&format!("`{closer_text}`"))),
        }
        if children.len() == 1 {
            Ok(children.pop().unwrap())
        } else {
            Ok(MathExpr::Sequence { children })
        }
    }

    fn parse_atom_core(&mut self) -> Result<Atom, LatexError> {
        let token = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.error("an expression")),
        };
        match token.kind {
            TokenKind::Digit => {
                // Digits merge into one literal only while the character
                // positions are contiguous: `12` is twelve, `1 2` is not.
                let mut literal = String::new();
                let mut next_pos = token.position;
                while matches!(
                    self.peek(),
                    Some(t) if t.kind == TokenKind::Digit && t.position == next_pos
                ) {
                    literal.push_str(&self.advance().unwrap().text);
                    next_pos += 1;
                }
                let decimal_point = matches!(
                    (self.peek(), self.tokens.get(self.pos + 1)),
                    (Some(dot), Some(digit))
                        if dot.kind == TokenKind::Other && dot.text == "."
                            && dot.position == next_pos
                            && digit.kind == TokenKind::Digit
                            && digit.position == next_pos + 1
                );
                if decimal_point {
                    self.pos += 1;
                    literal.push('.');
                    next_pos += 1;
                    while matches!(
                        self.peek(),
                        Some(t) if t.kind == TokenKind::Digit && t.position == next_pos
                    ) {
                        literal.push_str(&self.advance().unwrap().text);
                        next_pos += 1;
                    }
                }
                Ok(Atom {
                    expr: MathExpr::number(literal),
                    bare_paren: false,
                })
            }
            TokenKind::Letter => {
                self.pos += 1;
                Ok(Atom {
                    expr: MathExpr::ident(token.text),
                    bare_paren: false,
                })
            }
            TokenKind::OpenGroup => {
                self.pos += 1;
                let body = self.parse_group_body(TokenKind::CloseGroup, "}")?;
                Ok(Atom {
                    expr: MathExpr::group(body),
                    bare_paren: false,
                })
            }
            TokenKind::Operator if token.text == "(" => {
                self.pos += 1;
                let body = self.parse_group_body(TokenKind::Operator, ")")?;
                Ok(Atom {
                    expr: MathExpr::group(body),
                    bare_paren: true,
                })
            }
            TokenKind::ControlSequence => self.parse_control_sequence(&token),
            _ => Err(self.error_at(token.position, "an expression")),
        }
    }

    fn parse_control_sequence(&mut self, token: &MathToken) -> Result<Atom, LatexError> {
        let name = token.text.trim_start_matches('\\').to_string();
        self.pos += 1;

        // Semantic macro syntax `\name@{arg}@{arg}` is recognized for any
        // macro name; it is the inverse of `to_semantic_latex`.
        if self.at_semantic_args() {
            let mut args = Vec::new();
            while self.at_semantic_args() {
                self.pos += 1; // `@`
                self.pos += 1; // `{`
                args.push(self.parse_group_body(TokenKind::CloseGroup, "}")?);
            }
            return Ok(Atom {
                expr: MathExpr::call(name, args),
                bare_paren: false,
            });
        }

        match token.text.as_str() {
            "\\pi" => Ok(Atom {
                expr: MathExpr::constant("pi"),
                bare_paren: false,
            }),
            "\\theta" => Ok(Atom {
                expr: MathExpr::ident("theta"),
                bare_paren: false,
            }),
            "\\frac" | "\\tfrac" => {
                let numerator = self.parse_braced_argument()?;
                let denominator = self.parse_braced_argument()?;
                Ok(Atom {
                    expr: MathExpr::bin(BinOp::Frac, numerator, denominator),
                    bare_paren: false,
                })
            }
            "\\sqrt" => {
                let radicand = self.parse_braced_argument()?;
                Ok(Atom {
                    expr: MathExpr::call("sqrt", vec![radicand]),
                    bare_paren: false,
                })
            }
            "\\sum" | "\\prod" | "\\int" => self.parse_big_operator(&name),
            "\\left" => {
                self.expect_operator("(")?;
                let body = self.parse_group_body_until_right()?;
                Ok(Atom {
                    expr: MathExpr::group(body),
                    bare_paren: true,
                })
            }
            "\\{" => {
                let body = self.parse_group_body(TokenKind::ControlSequence, "\\}")?;
                Ok(Atom {
                    expr: MathExpr::group(body),
                    bare_paren: false,
                })
            }
            _ if BUILTIN_FUNCTIONS.contains(&name.as_str()) => self.parse_builtin_function(&name),
            _ => {
                if self.strict {
                    return Err(LatexError::UnknownMacro { name });
                }
                // Lenient mode: keep the macro with any braced arguments.
                let mut args = Vec::new();
                while matches!(self.peek(), Some(t) if t.kind == TokenKind::OpenGroup) {
                    self.pos += 1;
                    args.push(self.parse_group_body(TokenKind::CloseGroup, "}")?);
                }
                Ok(Atom {
                    expr: MathExpr::call(name, args),
                    bare_paren: false,
                })
            }
        }
    }

    fn at_semantic_args(&self) -> bool {
        matches!(
            (self.peek(), self.tokens.get(self.pos + 1)),
            (Some(at), Some(open))
                if at.kind == TokenKind::Other && at.text == "@"
                    && open.kind == TokenKind::OpenGroup
        )
    }

    fn parse_braced_argument(&mut self) -> Result<MathExpr, LatexError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::OpenGroup => {
                self.pos += 1;
                self.parse_group_body(TokenKind::CloseGroup, "}")
            }
            _ => Err(self.error("`{`")),
        }
    }

    // Function macros take an optional power and exactly one argument atom:
    // `\sin x`, `\sin(x)`, `\sin^{2}x`.
    fn parse_builtin_function(&mut self, name: &str) -> Result<Atom, LatexError> {
        let power = if matches!(self.peek(), Some(t) if t.kind == TokenKind::Superscript) {
            self.pos += 1;
            Some(self.parse_script_operand()?)
        } else {
            None
        };
        if !self.at_atom_start() {
            return Err(self.error(&format!("an argument for \\{name}")));
        }
        let arg_atom = self.parse_postfix_atom()?;
        let args = match arg_atom.expr {
            MathExpr::Group { child } => match *child {
                MathExpr::Sequence { children } => children,
                other => vec![other],
            },
            other => vec![other],
        };
        let apply = MathExpr::apply(MathExpr::ident(name), args);
        let expr = match power {
            Some(exp) => MathExpr::bin(BinOp::Pow, apply, exp),
            None => apply,
        };
        Ok(Atom {
            expr,
            bare_paren: false,
        })
    }

    // Big operators take optional `_{lower}` then `^{upper}` bounds and a
    // body consisting of the following implicit-multiplication unit.
    fn parse_big_operator(&mut self, name: &str) -> Result<Atom, LatexError> {
        let lower = if matches!(self.peek(), Some(t) if t.kind == TokenKind::Subscript) {
            self.pos += 1;
            Some(self.parse_script_operand()?)
        } else {
            None
        };
        let upper = if matches!(self.peek(), Some(t) if t.kind == TokenKind::Superscript) {
            self.pos += 1;
            if lower.is_none() {
                return Err(self.error("a lower bound before the upper bound"));
            }
            Some(self.parse_script_operand()?)
        } else {
            None
        };
        if !self.at_atom_start() {
            return Err(self.error(&format!("a body for \\{name}")));
        }
        let body = self.parse_juxtaposition()?;
        let args = match (lower, upper) {
            (None, None) => vec![body],
            (Some(lo), None) => vec![lo, body],
            (Some(lo), Some(hi)) => vec![lo, hi, body],
            (None, Some(_)) => unreachable!(),
        };
        Ok(Atom {
            expr: MathExpr::call(name, args),
            bare_paren: false,
        })
    }

    fn parse_group_body_until_right(&mut self) -> Result<MathExpr, LatexError> {
        let first = self.parse_expression()?;
        let mut children = vec![first];
        while matches!(self.peek(), Some(t) if t.kind == TokenKind::Operator && t.text == ",") {
            self.pos += 1;
            children.push(self.parse_expression()?);
        }
        match self.peek() {
            Some(t) if t.kind == TokenKind::ControlSequence && t.text == "\\right" => {
                self.pos += 1;
                self.expect_operator(")")?;
            }
            _ => return Err(self.error("`\\right)`")),
        }
        if children.len() == 1 {
            Ok(children.pop().unwrap())
        } else {
            Ok(MathExpr::Sequence { children })
        }
    }
}
