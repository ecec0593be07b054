//! Reader for the `SymPyText` translation target.
//!
//! This is the inverse that lets the toolkit check its own translations
//! without an external CAS: a translated string parses back into a
//! [`MathExpr`] that the numeric evaluator understands, so translation and
//! direct evaluation can be compared pointwise.

use thiserror::Error;

use crate::ast::{BinOp, MathExpr, RelOp};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("sympy text parse error at byte {position}: expected {expected}")]
pub struct SymPyTextError {
    pub position: usize,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(String),
    Name(String),
    Plus,
    Minus,
    Star,
    DoubleStar,
    Slash,
    LParen,
    RParen,
    Comma,
    EqEq,
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, SymPyTextError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '0'..='9' => {
                let mut text = String::new();
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    text.push(bytes[i] as char);
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    text.push('.');
                    i += 1;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        text.push(bytes[i] as char);
                        i += 1;
                    }
                }
                Tok::Number(text)
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut text = String::new();
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    text.push(bytes[i] as char);
                    i += 1;
                }
                Tok::Name(text)
            }
            '+' => {
                i += 1;
                Tok::Plus
            }
            '-' => {
                i += 1;
                Tok::Minus
            }
            '*' => {
                if bytes.get(i + 1) == Some(&b'*') {
                    i += 2;
                    Tok::DoubleStar
                } else {
                    i += 1;
                    Tok::Star
                }
            }
            '/' => {
                i += 1;
                Tok::Slash
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            '=' if bytes.get(i + 1) == Some(&b'=') => {
                i += 2;
                Tok::EqEq
            }
            _ => {
                return Err(SymPyTextError {
                    position: i,
                    expected: "a sympy-text token".into(),
                })
            }
        };
        tokens.push((start, tok));
    }
    Ok(tokens)
}

/// Parses a SymPyText expression produced by the translator.
pub fn parse_sympy_text(input: &str) -> Result<MathExpr, SymPyTextError> {
    let tokens = lex(input)?;
    let mut p = P {
        tokens,
        pos: 0,
        len: input.len(),
    };
    let expr = p.relation()?;
    if p.pos < p.tokens.len() {
        return Err(SymPyTextError {
            position: p.tokens[p.pos].0,
            expected: "end of input".into(),
        });
    }
    Ok(expr.normalize())
}

struct P {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn err(&self, expected: &str) -> SymPyTextError {
        SymPyTextError {
            position: self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(self.len),
            expected: expected.to_string(),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn relation(&mut self) -> Result<MathExpr, SymPyTextError> {
        let left = self.additive()?;
        if self.eat(&Tok::EqEq) {
            let right = self.additive()?;
            return Ok(MathExpr::rel(RelOp::Eq, left, right));
        }
        Ok(left)
    }

    fn additive(&mut self) -> Result<MathExpr, SymPyTextError> {
        let mut acc = self.multiplicative()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = MathExpr::bin(BinOp::Add, acc, self.multiplicative()?);
            } else if self.eat(&Tok::Minus) {
                acc = MathExpr::bin(BinOp::Sub, acc, self.multiplicative()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn multiplicative(&mut self) -> Result<MathExpr, SymPyTextError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = MathExpr::bin(BinOp::Mul, acc, self.unary()?);
            } else if self.eat(&Tok::Slash) {
                acc = MathExpr::bin(BinOp::Div, acc, self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MathExpr, SymPyTextError> {
        if self.eat(&Tok::Minus) {
            return Ok(MathExpr::bin(
                BinOp::Sub,
                MathExpr::number("0"),
                self.unary()?,
            ));
        }
        self.power()
    }

    fn power(&mut self) -> Result<MathExpr, SymPyTextError> {
        let base = self.atom()?;
        if self.eat(&Tok::DoubleStar) {
            let exp = self.unary()?;
            return Ok(MathExpr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MathExpr, SymPyTextError> {
        match self.peek().cloned() {
            Some(Tok::Number(text)) => {
                self.pos += 1;
                Ok(MathExpr::number(text))
            }
            Some(Tok::Name(name)) => {
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    let mut args = vec![self.relation()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.relation()?);
                    }
                    if !self.eat(&Tok::RParen) {
                        return Err(self.err("`)`"));
                    }
                    Ok(map_call(&name, args))
                } else if name == "pi" {
                    Ok(MathExpr::constant("pi"))
                } else {
                    Ok(MathExpr::ident(name))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.relation()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.err("`)`"));
                }
                Ok(MathExpr::group(inner))
            }
            _ => Err(self.err("an expression")),
        }
    }
}

/// Maps SymPy function spellings back to canonical macro names.
fn map_call(name: &str, args: Vec<MathExpr>) -> MathExpr {
    let canonical = match (name, args.len()) {
        ("asin", 1) => "arcsin",
        ("acos", 1) => "arccos",
        ("atan", 1) => "arctan",
        ("log", 1) => "ln",
        ("Abs", 1) => "abs",
        ("gamma", 1) => "Gamma",
        ("primepi", 1) => "nprimes",
        ("euler", 1) => "EulerNumber",
        ("euler", 2) => "EulerE",
        ("bernoulli", 1) => "BernoulliNumber",
        ("bernoulli", 2) => "BernoulliB",
        ("Heaviside", 1) => "HeavisideTheta",
        ("jtheta3", 2) => "JacobiTheta",
        ("jacobi", 4) => {
            // sympy order (n, a, b, x) -> lexicon order (a, b, n, x)
            let mut args = args;
            args.swap(0, 1);
            args.swap(1, 2);
            return MathExpr::call("JacobiP", args);
        }
        _ => name,
    };
    MathExpr::call(canonical, args)
}
