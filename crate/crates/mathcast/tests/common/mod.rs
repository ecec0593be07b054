//! Shared scaffolding for the integration suites: a grammar-driven LaTeX
//! fuzzer, random tree generators, independent oracles, and the constant
//! perturbation used by the known-wrong detector checks.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mathcast::ast::{BinOp, MathExpr, RelOp};
use mathcast::render::render_latex;

/// Generates random strings from the documented grammar subset. Everything
/// produced must parse.
pub struct LatexGen {
    rng: ChaCha8Rng,
}

impl LatexGen {
    pub fn new(seed: u64) -> Self {
        LatexGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn pick(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    fn letter(&mut self) -> char {
        let letters = ['a', 'b', 'c', 'n', 'x', 'y', 'z', 'E', 'B'];
        letters[self.pick(letters.len())]
    }

    pub fn expression(&mut self) -> String {
        let depth = 3;
        if self.pick(10) < 3 {
            format!("{}={}", self.additive(depth), self.additive(depth))
        } else {
            self.additive(depth)
        }
    }

    fn additive(&mut self, depth: usize) -> String {
        let mut out = String::new();
        if self.pick(10) == 0 {
            out.push('-');
        }
        out.push_str(&self.multiplicative(depth));
        for _ in 0..self.pick(3) {
            out.push(if self.pick(2) == 0 { '+' } else { '-' });
            out.push_str(&self.multiplicative(depth));
        }
        out
    }

    fn multiplicative(&mut self, depth: usize) -> String {
        let mut out = self.juxtaposition(depth);
        for _ in 0..self.pick(2) {
            out.push_str(if self.pick(2) == 0 { "\\cdot " } else { "/" });
            out.push_str(&self.juxtaposition(depth));
        }
        out
    }

    fn juxtaposition(&mut self, depth: usize) -> String {
        let count = 1 + self.pick(2);
        let mut parts = Vec::new();
        for _ in 0..count {
            parts.push(self.postfix(depth));
        }
        parts.join(" ")
    }

    fn postfix(&mut self, depth: usize) -> String {
        // Subscripts only attach to plain letters.
        if depth > 0 && self.pick(6) == 0 {
            let mut out = self.letter().to_string();
            out.push('_');
            out.push_str(&self.script(depth - 1));
            if self.pick(3) == 0 {
                out.push('^');
                out.push_str(&self.script(depth - 1));
            }
            return out;
        }
        let (mut out, can_script) = self.atom(depth);
        if can_script && self.pick(5) == 0 {
            out.push('^');
            out.push_str(&self.script(depth.saturating_sub(1)));
        }
        out
    }

    fn script(&mut self, depth: usize) -> String {
        match self.pick(3) {
            0 => self.letter().to_string(),
            1 => char::from(b'0' + self.pick(10) as u8).to_string(),
            _ => format!("{{{}}}", self.additive(depth)),
        }
    }

    /// Returns the atom text and whether a postfix script may follow it.
    /// Big operators swallow the following unit, so a trailing script would
    /// land on their body's last atom instead.
    fn atom(&mut self, depth: usize) -> (String, bool) {
        if depth == 0 {
            let text = match self.pick(4) {
                0 => format!("{}", 1 + self.pick(99)),
                1 | 2 => self.letter().to_string(),
                _ => "\\pi ".to_string(),
            };
            return (text, true);
        }
        match self.pick(12) {
            0 => (format!("{}", 1 + self.pick(999)), true),
            1 => (format!("{}.{}", self.pick(10), 1 + self.pick(9)), true),
            2 => (self.letter().to_string(), true),
            3 => ("\\pi ".to_string(), true),
            4 => ("\\theta ".to_string(), true),
            5 => (format!("({})", self.additive(depth - 1)), true),
            6 => (format!("{{{}}}", self.additive(depth - 1)), true),
            7 => (
                format!(
                    "\\frac{{{}}}{{{}}}",
                    self.additive(depth - 1),
                    self.additive(depth - 1)
                ),
                true,
            ),
            8 => (format!("\\sqrt{{{}}}", self.additive(depth - 1)), true),
            9 => {
                let name = ["\\sin", "\\cos", "\\tan", "\\exp", "\\ln", "\\Gamma"]
                    [self.pick(6)];
                let power = if self.pick(4) == 0 {
                    format!("^{}", self.script(depth - 1))
                } else {
                    String::new()
                };
                // A function with its own power already used the only script.
                let text = format!("{name}{power}({})", self.additive(depth - 1));
                (text, power.is_empty())
            }
            10 => {
                let name = ["\\sum", "\\prod", "\\int"][self.pick(3)];
                let body = self.postfix(depth - 1);
                let text = match self.pick(3) {
                    0 => format!("{name} {body}"),
                    1 => format!("{name}_{{{}}} {body}", self.letter()),
                    _ => format!(
                        "{name}_{{{}={}}}^{{{}}} {body}",
                        self.letter(),
                        1 + self.pick(5),
                        self.letter()
                    ),
                };
                (text, false)
            }
            _ => {
                let name = ["\\nprimes", "\\EulerE", "\\BernoulliB", "\\zeta"][self.pick(4)];
                let text = match name {
                    "\\EulerE" | "\\BernoulliB" => format!(
                        "{name}@{{{}}}@{{{}}}",
                        self.additive(depth - 1),
                        self.additive(depth - 1)
                    ),
                    _ => format!("{name}@{{{}}}", self.additive(depth - 1)),
                };
                (text, true)
            }
        }
    }
}

/// Random expression trees exercising every node kind, for the subexpression
/// oracle comparison.
pub fn random_tree(rng: &mut ChaCha8Rng, depth: usize) -> MathExpr {
    if depth == 0 {
        return match rng.random_range(0..4) {
            0 => MathExpr::number(format!("{}", rng.random_range(1..100))),
            1 | 2 => MathExpr::ident(random_letter(rng)),
            _ => MathExpr::constant("pi"),
        };
    }
    match rng.random_range(0..10) {
        0 => MathExpr::number(format!("{}", rng.random_range(1..100))),
        1 => MathExpr::ident(random_letter(rng)),
        2 => MathExpr::ident_sub(random_letter(rng), random_tree(rng, depth - 1)),
        3 | 4 => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Frac, BinOp::Pow]
                [rng.random_range(0..6)];
            MathExpr::bin(op, random_tree(rng, depth - 1), random_tree(rng, depth - 1))
        }
        5 => MathExpr::apply(
            MathExpr::ident(["sin", "cos", "exp", "ln", "Gamma"][rng.random_range(0..5)]),
            vec![random_tree(rng, depth - 1)],
        ),
        6 => MathExpr::call("sqrt", vec![random_tree(rng, depth - 1)]),
        7 => MathExpr::call("nprimes", vec![random_tree(rng, depth - 1)]),
        8 => MathExpr::juxtaposition_ambiguity(
            if rng.random_range(0..2) == 0 {
                MathExpr::constant("pi")
            } else {
                MathExpr::ident(random_letter(rng))
            },
            vec![random_tree(rng, depth - 1)],
        ),
        _ => MathExpr::rel(
            RelOp::Eq,
            random_tree(rng, depth - 1),
            random_tree(rng, depth - 1),
        ),
    }
}

fn random_letter(rng: &mut ChaCha8Rng) -> String {
    let letters = ["a", "b", "n", "x", "y", "z"];
    letters[rng.random_range(0..letters.len())].to_string()
}

/// Random trees guaranteed evaluable at positive sample points, for the
/// translation parenthesization check. No subscripted identifiers (the
/// SymPyText spelling of subscripts is a different variable key).
pub fn random_arithmetic_tree(rng: &mut ChaCha8Rng, depth: usize) -> MathExpr {
    if depth == 0 {
        return match rng.random_range(0..4) {
            0 => MathExpr::number(format!("{}", rng.random_range(1..10))),
            1 | 2 => MathExpr::ident(["x", "y", "z"][rng.random_range(0..3)]),
            _ => MathExpr::constant("pi"),
        };
    }
    match rng.random_range(0..9) {
        0 | 1 => MathExpr::bin(
            [BinOp::Add, BinOp::Sub, BinOp::Mul][rng.random_range(0..3)],
            random_arithmetic_tree(rng, depth - 1),
            random_arithmetic_tree(rng, depth - 1),
        ),
        2 => MathExpr::bin(
            if rng.random_range(0..2) == 0 {
                BinOp::Div
            } else {
                BinOp::Frac
            },
            random_arithmetic_tree(rng, depth - 1),
            random_arithmetic_tree(rng, depth - 1),
        ),
        3 => MathExpr::bin(
            BinOp::Pow,
            random_arithmetic_tree(rng, depth - 1),
            MathExpr::number(format!("{}", rng.random_range(0..4))),
        ),
        4 => MathExpr::apply(
            MathExpr::ident(["sin", "cos", "exp"][rng.random_range(0..3)]),
            vec![random_arithmetic_tree(rng, depth - 1)],
        ),
        5 => MathExpr::call("abs", vec![random_arithmetic_tree(rng, depth - 1)]),
        _ => random_arithmetic_tree(rng, 0),
    }
}

/// Brute-force subexpression oracle: an iterative walk with its own node
/// counting, independent of `moi::enumerate_subexpressions`.
pub fn oracle_subexpressions(expr: &MathExpr, max_nodes: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<MathExpr> = vec![expr.normalize()];
    while let Some(node) = stack.pop() {
        if let MathExpr::Ambiguous { interpretations } = &node {
            let apply = interpretations
                .iter()
                .find(|i| matches!(i, MathExpr::FunctionApply { .. }))
                .cloned();
            if let Some(MathExpr::FunctionApply { head, args }) = apply {
                if oracle_count(&MathExpr::FunctionApply {
                    head: head.clone(),
                    args: args.clone(),
                }) <= max_nodes
                {
                    out.insert(render_latex(&node));
                }
                stack.push(*head);
                stack.extend(args);
            } else {
                stack.extend(interpretations.iter().cloned());
            }
            continue;
        }
        if oracle_count(&node) <= max_nodes {
            out.insert(render_latex(&node));
        }
        match node {
            MathExpr::Number { .. } | MathExpr::Constant { .. } => {}
            MathExpr::Identifier { subscript, .. } => {
                if let Some(sub) = subscript {
                    stack.push(*sub);
                }
            }
            MathExpr::BinaryOp { left, right, .. } | MathExpr::Relation { left, right, .. } => {
                stack.push(*left);
                stack.push(*right);
            }
            MathExpr::FunctionApply { head, args } => {
                stack.push(*head);
                stack.extend(args);
            }
            MathExpr::MacroCall { args, .. } => stack.extend(args),
            MathExpr::Group { child } => stack.push(*child),
            MathExpr::Sequence { children } => stack.extend(children),
            MathExpr::Ambiguous { .. } => unreachable!("handled above"),
        }
    }
    out
}

/// Node counting for the oracle, written iteratively.
fn oracle_count(expr: &MathExpr) -> usize {
    let mut count = 0;
    let mut stack = vec![expr];
    while let Some(node) = stack.pop() {
        count += 1;
        match node {
            MathExpr::Number { .. } | MathExpr::Constant { .. } => {}
            MathExpr::Identifier { subscript, .. } => {
                if let Some(sub) = subscript {
                    stack.push(sub);
                }
            }
            MathExpr::BinaryOp { left, right, .. } | MathExpr::Relation { left, right, .. } => {
                stack.push(left);
                stack.push(right);
            }
            MathExpr::FunctionApply { head, args } => {
                stack.push(head);
                stack.extend(args.iter());
            }
            MathExpr::MacroCall { args, .. } => stack.extend(args.iter()),
            MathExpr::Group { child } => stack.push(child),
            MathExpr::Sequence { children } => stack.extend(children.iter()),
            MathExpr::Ambiguous { interpretations } => stack.extend(interpretations.iter()),
        }
    }
    count
}

/// Adds one to the first numeric literal (preorder); when the equation has no
/// literal, adds `+1` to its right side instead.
pub fn perturb_equation(equation: &MathExpr) -> MathExpr {
    fn bump(expr: &MathExpr, done: &mut bool) -> MathExpr {
        if *done {
            return expr.clone();
        }
        match expr {
            MathExpr::Number { literal } => {
                if let Ok(value) = literal.parse::<f64>() {
                    *done = true;
                    let bumped = value + 1.0;
                    let literal = if bumped.fract() == 0.0 {
                        format!("{}", bumped as i64)
                    } else {
                        format!("{bumped}")
                    };
                    return MathExpr::number(literal);
                }
                expr.clone()
            }
            MathExpr::Identifier { name, subscript } => MathExpr::Identifier {
                name: name.clone(),
                subscript: subscript.as_ref().map(|s| Box::new(bump(s, done))),
            },
            MathExpr::Constant { .. } => expr.clone(),
            MathExpr::BinaryOp { op, left, right } => {
                let left = bump(left, done);
                let right = bump(right, done);
                MathExpr::bin(*op, left, right)
            }
            MathExpr::Relation { rel, left, right } => {
                let left = bump(left, done);
                let right = bump(right, done);
                MathExpr::rel(*rel, left, right)
            }
            MathExpr::FunctionApply { head, args } => {
                let head = bump(head, done);
                let args = args.iter().map(|a| bump(a, done)).collect();
                MathExpr::apply(head, args)
            }
            MathExpr::MacroCall { name, args } => MathExpr::call(
                name.clone(),
                args.iter().map(|a| bump(a, done)).collect(),
            ),
            MathExpr::Group { child } => MathExpr::group(bump(child, done)),
            MathExpr::Sequence { children } => MathExpr::Sequence {
                children: children.iter().map(|c| bump(c, done)).collect(),
            },
            MathExpr::Ambiguous { interpretations } => MathExpr::Ambiguous {
                interpretations: interpretations.iter().map(|i| bump(i, done)).collect(),
            },
        }
    }
    let mut done = false;
    let bumped = bump(equation, &mut done);
    if done {
        return bumped;
    }
    match equation {
        MathExpr::Relation { rel, left, right } => MathExpr::rel(
            *rel,
            left.as_ref().clone(),
            MathExpr::bin(
                BinOp::Add,
                right.as_ref().clone(),
                MathExpr::number("1"),
            ),
        ),
        other => MathExpr::bin(BinOp::Add, other.clone(), MathExpr::number("1")),
    }
}

/// Seeded corpus drawn from an exact Zipf(s = 1) distribution: `terms`
/// distinct single-identifier formulas, `draws` total occurrences spread over
/// `docs` documents.
pub fn zipf_corpus(
    seed: u64,
    terms: usize,
    draws: usize,
    docs: usize,
) -> Vec<(String, Vec<MathExpr>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cumulative = Vec::with_capacity(terms);
    let mut total = 0.0f64;
    for k in 1..=terms {
        total += 1.0 / k as f64;
        cumulative.push(total);
    }
    let per_doc = draws / docs;
    let mut corpus = Vec::with_capacity(docs);
    for d in 0..docs {
        let mut formulas = Vec::with_capacity(per_doc);
        for _ in 0..per_doc {
            let u = rng.random::<f64>() * total;
            let term = cumulative.partition_point(|&c| c < u).min(terms - 1);
            formulas.push(MathExpr::ident(format!("t{term:04}")));
        }
        corpus.push((format!("doc{d:03}"), formulas));
    }
    corpus
}
