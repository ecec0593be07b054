//! Canonical LaTeX rendering of [`MathExpr`] trees.
//!
//! The output is normalized: scripts are always braced, `\tfrac` never
//! appears, groups are re-inserted only where precedence demands, and
//! multiplication picks between juxtaposition and `\cdot` so the result
//! re-parses to the same tree. `parse(render(parse(s)))` equals `parse(s)`
//! for every input the grammar accepts.

use crate::ast::{BinOp, MathExpr};

/// Function names the parser recognizes as fixed-arity heads.
pub const BUILTIN_FUNCTIONS: &[&str] = &["sin", "cos", "tan", "exp", "ln", "log", "Gamma"];

/// Identifier names that render as control sequences.
const GREEK_IDENTIFIERS: &[&str] = &["theta"];

const PREC_RELATION: u8 = 0;
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_MUL_OPERAND: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

pub(crate) fn render_symbol_name(name: &str) -> String {
    if GREEK_IDENTIFIERS.contains(&name) || BUILTIN_FUNCTIONS.contains(&name) {
        format!("\\{name}")
    } else {
        name.to_string()
    }
}

pub(crate) fn render_constant_name(name: &str) -> String {
    format!("\\{name}")
}

struct Rendered {
    text: String,
    /// True when the rendered text ends in a bare symbol atom, i.e. one that
    /// would fuse with a following parenthesized group into an ambiguity.
    symbol_tail: bool,
    /// True when the rendered text ends inside a big-operator body, which
    /// would swallow any atom juxtaposed after it.
    open_tail: bool,
    /// True when the rendered text ends inside the right operand of an
    /// unparenthesized `\cdot` or `/`. Juxtaposition binds tighter than
    /// both, so appending an atom would attach to that operand instead.
    tier2_tail: bool,
}

impl Rendered {
    fn plain(text: String) -> Self {
        Rendered {
            text,
            symbol_tail: false,
            open_tail: false,
            tier2_tail: false,
        }
    }
}

/// Appends `next` to `buf`, inserting a space when the boundary would merge a
/// control word with a following letter.
fn push_tex(buf: &mut String, next: &str) {
    if next.starts_with(|c: char| c.is_ascii_alphabetic()) && ends_with_control_word(buf) {
        buf.push(' ');
    }
    buf.push_str(next);
}

fn ends_with_control_word(s: &str) -> bool {
    let bytes = s.as_bytes();
    let mut i = bytes.len();
    while i > 0 && bytes[i - 1].is_ascii_alphabetic() {
        i -= 1;
    }
    i < bytes.len() && i > 0 && bytes[i - 1] == b'\\'
}

fn prec(e: &MathExpr) -> u8 {
    match e {
        MathExpr::Relation { .. } => PREC_RELATION,
        MathExpr::BinaryOp { op, .. } => match op {
            BinOp::Add | BinOp::Sub => PREC_ADD,
            BinOp::Mul | BinOp::Div => PREC_MUL,
            BinOp::Pow => PREC_POW,
            BinOp::Frac => PREC_ATOM,
        },
        _ => PREC_ATOM,
    }
}

/// Renders an expression as normalized LaTeX.
pub fn render_latex(expr: &MathExpr) -> String {
    render_prec(expr, PREC_RELATION).text
}

fn render_prec(expr: &MathExpr, min_prec: u8) -> Rendered {
    let natural = render_natural(expr);
    if prec(expr) < min_prec {
        Rendered::plain(format!("({})", natural.text))
    } else {
        natural
    }
}

fn render_natural(expr: &MathExpr) -> Rendered {
    match expr {
        MathExpr::Number { literal } => Rendered::plain(literal.clone()),
        MathExpr::Identifier { name, subscript } => {
            let mut text = render_symbol_name(name);
            if let Some(sub) = subscript {
                text.push_str(&format!("_{{{}}}", render_prec(sub, PREC_RELATION).text));
            }
            Rendered {
                text,
                symbol_tail: true,
                open_tail: false,
                tier2_tail: false,
            }
        }
        MathExpr::Constant { name } => Rendered {
            text: render_constant_name(name),
            symbol_tail: true,
            open_tail: false,
            tier2_tail: false,
        },
        MathExpr::BinaryOp { op, left, right } => render_binary(*op, left, right),
        MathExpr::Relation { rel, left, right } => {
            let l = render_prec(left, PREC_ADD);
            let r = render_prec(right, PREC_ADD);
            let mut text = l.text;
            push_tex(&mut text, rel.as_str());
            push_tex(&mut text, &r.text);
            Rendered {
                text,
                symbol_tail: r.symbol_tail,
                open_tail: r.open_tail,
                tier2_tail: r.tier2_tail,
            }
        }
        MathExpr::FunctionApply { head, args } => {
            let head_text = match head.as_ref() {
                MathExpr::Identifier {
                    name,
                    subscript: None,
                } if BUILTIN_FUNCTIONS.contains(&name.as_str()) => format!("\\{name}"),
                other => render_prec(other, PREC_ATOM).text,
            };
            Rendered::plain(format!("{head_text}({})", render_args(args)))
        }
        MathExpr::MacroCall { name, args } => render_macro(name, args),
        MathExpr::Group { child } => match child.as_ref() {
            // A sequence brings its own parentheses.
            seq @ MathExpr::Sequence { .. } => render_natural(seq),
            other => Rendered::plain(format!("({})", render_prec(other, PREC_RELATION).text)),
        },
        MathExpr::Sequence { children } => {
            let parts: Vec<String> = children
                .iter()
                .map(|c| render_prec(c, PREC_RELATION).text)
                .collect();
            Rendered::plain(format!("({})", parts.join(",")))
        }
        MathExpr::Ambiguous { interpretations } => {
            // All interpretations share one surface form; the first (implicit
            // multiplication against an explicit group) spells it out.
            render_natural(&interpretations[0])
        }
    }
}

fn render_binary(op: BinOp, left: &MathExpr, right: &MathExpr) -> Rendered {
    match op {
        BinOp::Add | BinOp::Sub => {
            let symbol = if op == BinOp::Add { "+" } else { "-" };
            if op == BinOp::Sub && matches!(left, MathExpr::Number { literal } if literal == "0") {
                let r = render_prec(right, PREC_MUL);
                let mut text = String::from("-");
                push_tex(&mut text, &r.text);
                return Rendered {
                    text,
                    symbol_tail: r.symbol_tail,
                    open_tail: r.open_tail,
                    tier2_tail: r.tier2_tail,
                };
            }
            let l = render_prec(left, PREC_ADD);
            let r = render_prec(right, PREC_MUL);
            let mut text = l.text;
            push_tex(&mut text, symbol);
            push_tex(&mut text, &r.text);
            Rendered {
                text,
                symbol_tail: r.symbol_tail,
                open_tail: r.open_tail,
                tier2_tail: r.tier2_tail,
            }
        }
        BinOp::Mul => {
            let l = render_prec(left, PREC_MUL);
            let r = render_prec(right, PREC_MUL_OPERAND);
            // An explicit group is its own delimiter; this is what keeps the
            // two readings of `\pi(x+y)` on one surface string.
            let intentional_group = matches!(right, MathExpr::Group { .. });
            let digit_fusion = l.text.ends_with(|c: char| c.is_ascii_digit())
                && r.text.starts_with(|c: char| c.is_ascii_digit());
            let false_application = r.text.starts_with('(') && l.symbol_tail;
            let mut text = l.text;
            let explicit = l.open_tail
                || l.tier2_tail
                || (!intentional_group && (digit_fusion || false_application));
            if explicit {
                push_tex(&mut text, "\\cdot");
            }
            push_tex(&mut text, &r.text);
            Rendered {
                text,
                symbol_tail: r.symbol_tail,
                open_tail: r.open_tail,
                tier2_tail: explicit || r.tier2_tail,
            }
        }
        BinOp::Div => {
            let l = render_prec(left, PREC_MUL);
            let r = render_prec(right, PREC_MUL_OPERAND);
            let mut text = l.text;
            push_tex(&mut text, "/");
            push_tex(&mut text, &r.text);
            Rendered {
                text,
                symbol_tail: r.symbol_tail,
                open_tail: r.open_tail,
                tier2_tail: true,
            }
        }
        BinOp::Frac => Rendered::plain(format!(
            "\\frac{{{}}}{{{}}}",
            render_prec(left, PREC_RELATION).text,
            render_prec(right, PREC_RELATION).text
        )),
        BinOp::Pow => {
            // Powers of built-in function applications use the function-power
            // form: `\sin^{2}(x)`.
            if let MathExpr::FunctionApply { head, args } = left {
                if matches!(
                    head.as_ref(),
                    MathExpr::Identifier { name, subscript: None }
                        if BUILTIN_FUNCTIONS.contains(&name.as_str())
                ) {
                    let head_text = render_prec(head, PREC_ATOM).text;
                    return Rendered::plain(format!(
                        "{head_text}^{{{}}}({})",
                        render_prec(right, PREC_RELATION).text,
                        render_args(args)
                    ));
                }
            }
            let base = render_prec(left, PREC_ATOM);
            // An ambiguity's surface form cannot take a script directly: the
            // script would bind to its trailing group on re-parse.
            let needs_group =
                base.open_tail || matches!(left, MathExpr::Ambiguous { .. });
            let base_text = if needs_group {
                format!("({})", base.text)
            } else {
                base.text
            };
            Rendered::plain(format!(
                "{base_text}^{{{}}}",
                render_prec(right, PREC_RELATION).text
            ))
        }
    }
}

fn render_args(args: &[MathExpr]) -> String {
    args.iter()
        .map(|a| render_prec(a, PREC_RELATION).text)
        .collect::<Vec<_>>()
        .join(",")
}

fn render_macro(name: &str, args: &[MathExpr]) -> Rendered {
    match (name, args.len()) {
        ("sqrt", 1) => Rendered::plain(format!(
            "\\sqrt{{{}}}",
            render_prec(&args[0], PREC_RELATION).text
        )),
        ("sum" | "prod" | "int", n @ 1..=3) => {
            let mut text = format!("\\{name}");
            if n >= 2 {
                text.push_str(&format!(
                    "_{{{}}}",
                    render_prec(&args[0], PREC_RELATION).text
                ));
            }
            if n == 3 {
                text.push_str(&format!(
                    "^{{{}}}",
                    render_prec(&args[1], PREC_RELATION).text
                ));
            }
            let body = render_prec(&args[n - 1], PREC_MUL_OPERAND);
            push_tex(&mut text, &body.text);
            Rendered {
                text,
                symbol_tail: body.symbol_tail,
                open_tail: true,
                tier2_tail: body.tier2_tail,
            }
        }
        (_, 0) => Rendered::plain(format!("\\{name}")),
        _ => {
            let mut text = format!("\\{name}");
            for arg in args {
                text.push_str(&format!(
                    "@{{{}}}",
                    render_prec(arg, PREC_RELATION).text
                ));
            }
            Rendered::plain(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{BinOp, MathExpr, RelOp};

    #[test]
    fn plain_sum_renders_without_decoration() {
        let e = MathExpr::bin(BinOp::Add, MathExpr::ident("a"), MathExpr::ident("b"));
        assert_eq!(render_latex(&e), "a+b");
    }

    #[test]
    fn digit_adjacency_forces_cdot() {
        let e = MathExpr::bin(BinOp::Mul, MathExpr::number("2"), MathExpr::number("3"));
        assert_eq!(render_latex(&e), "2\\cdot3");
    }

    #[test]
    fn symbol_before_parens_forces_cdot_outside_ambiguity() {
        let e = MathExpr::bin(
            BinOp::Mul,
            MathExpr::ident("x"),
            MathExpr::bin(BinOp::Mul, MathExpr::ident("y"), MathExpr::ident("z")),
        );
        assert_eq!(render_latex(&e), "x\\cdot(yz)");
    }

    #[test]
    fn ambiguity_renders_as_application_surface() {
        let amb = MathExpr::juxtaposition_ambiguity(
            MathExpr::constant("pi"),
            vec![MathExpr::bin(
                BinOp::Add,
                MathExpr::ident("x"),
                MathExpr::ident("y"),
            )],
        );
        assert_eq!(render_latex(&amb), "\\pi(x+y)");
    }

    #[test]
    fn interpretations_share_one_surface_string() {
        let amb = MathExpr::juxtaposition_ambiguity(
            MathExpr::constant("pi"),
            vec![MathExpr::bin(
                BinOp::Add,
                MathExpr::ident("x"),
                MathExpr::ident("y"),
            )],
        );
        if let MathExpr::Ambiguous { interpretations } = &amb {
            let surfaces: Vec<String> = interpretations.iter().map(render_latex).collect();
            assert_eq!(surfaces[0], surfaces[1]);
        }
    }

    #[test]
    fn control_word_boundaries_get_spaces() {
        let e = MathExpr::bin(BinOp::Mul, MathExpr::constant("pi"), MathExpr::ident("x"));
        assert_eq!(render_latex(&e), "\\pi x");
    }

    #[test]
    fn unary_minus_elides_zero() {
        let e = MathExpr::bin(BinOp::Sub, MathExpr::number("0"), MathExpr::ident("x"));
        assert_eq!(render_latex(&e), "-x");
    }

    #[test]
    fn function_power_renders_before_argument() {
        let e = MathExpr::bin(
            BinOp::Pow,
            MathExpr::apply(MathExpr::ident("sin"), vec![MathExpr::ident("x")]),
            MathExpr::number("2"),
        );
        assert_eq!(render_latex(&e), "\\sin^{2}(x)");
    }

    #[test]
    fn relation_renders_operands_without_spaces() {
        let e = MathExpr::rel(RelOp::Eq, MathExpr::ident("a"), MathExpr::ident("b"));
        assert_eq!(render_latex(&e), "a=b");
    }

    #[test]
    fn semantic_macro_renders_at_form() {
        let e = MathExpr::call("nprimes", vec![MathExpr::ident("n")]);
        assert_eq!(render_latex(&e), "\\nprimes@{n}");
    }
}
