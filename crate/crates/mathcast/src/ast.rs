//! Expression trees for presentation LaTeX math.
//!
//! [`MathExpr`] is the universal intermediate form of the toolkit: the parser
//! produces it, the disambiguator rewrites it, and the translators and the
//! numeric evaluator consume it. Trees are immutable after construction and
//! cheap to clone.

use serde::Serialize;

/// Binary operators. `Frac` and `Div` are the same operation with different
/// surface syntax (`\frac{a}{b}` vs `a/b`); both render back to their own form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Frac,
    Pow,
}

/// Relational operators accepted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RelOp {
    Eq,
    Lt,
    Gt,
}

impl RelOp {
    pub fn as_str(&self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Lt => "<",
            RelOp::Gt => ">",
        }
    }
}

/// A parsed mathematical expression.
///
/// `Ambiguous` nodes hold several structurally distinct readings of the same
/// surface syntax (for example `\pi(x+y)` as either a multiplication or a
/// function application). They are produced by the parser and eliminated by
/// `disambiguate::resolve`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MathExpr {
    /// A numeric literal, kept verbatim so rendering is lossless.
    Number { literal: String },
    /// A named symbol, optionally subscripted (`E_{n}`).
    Identifier {
        name: String,
        subscript: Option<Box<MathExpr>>,
    },
    /// A known constant such as `\pi`.
    Constant { name: String },
    BinaryOp {
        op: BinOp,
        left: Box<MathExpr>,
        right: Box<MathExpr>,
    },
    Relation {
        rel: RelOp,
        left: Box<MathExpr>,
        right: Box<MathExpr>,
    },
    /// Application of a function head to arguments, e.g. `\sin(x)`.
    FunctionApply {
        head: Box<MathExpr>,
        args: Vec<MathExpr>,
    },
    /// A macro call: semantic macros (`\nprimes@{n}`), `\sqrt`, big operators,
    /// and unknown macros kept in lenient mode.
    MacroCall { name: String, args: Vec<MathExpr> },
    /// Explicit grouping. Collapsed by [`MathExpr::normalize`] except where it
    /// preserves the surface form of an `Ambiguous` interpretation.
    Group { child: Box<MathExpr> },
    /// A comma-separated list, e.g. the content of `(a,b)`.
    Sequence { children: Vec<MathExpr> },
    /// Structurally distinct interpretations of one surface form.
    Ambiguous { interpretations: Vec<MathExpr> },
}

impl MathExpr {
    pub fn number(literal: impl Into<String>) -> Self {
        MathExpr::Number {
            literal: literal.into(),
        }
    }

    pub fn ident(name: impl Into<String>) -> Self {
        MathExpr::Identifier {
            name: name.into(),
            subscript: None,
        }
    }

    pub fn ident_sub(name: impl Into<String>, sub: MathExpr) -> Self {
        MathExpr::Identifier {
            name: name.into(),
            subscript: Some(Box::new(sub)),
        }
    }

    pub fn constant(name: impl Into<String>) -> Self {
        MathExpr::Constant { name: name.into() }
    }

    pub fn bin(op: BinOp, left: MathExpr, right: MathExpr) -> Self {
        MathExpr::BinaryOp {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn rel(rel: RelOp, left: MathExpr, right: MathExpr) -> Self {
        MathExpr::Relation {
            rel,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn apply(head: MathExpr, args: Vec<MathExpr>) -> Self {
        MathExpr::FunctionApply {
            head: Box::new(head),
            args,
        }
    }

    pub fn call(name: impl Into<String>, args: Vec<MathExpr>) -> Self {
        MathExpr::MacroCall {
            name: name.into(),
            args,
        }
    }

    pub fn group(child: MathExpr) -> Self {
        MathExpr::Group {
            child: Box::new(child),
        }
    }

    /// Builds the canonical two-way ambiguity for `head(inner)`: implicit
    /// multiplication first, function application second. Both interpretations
    /// render to the same surface string.
    pub fn juxtaposition_ambiguity(head: MathExpr, args: Vec<MathExpr>) -> Self {
        let inner = if args.len() == 1 {
            args[0].clone()
        } else {
            MathExpr::Sequence {
                children: args.clone(),
            }
        };
        MathExpr::Ambiguous {
            interpretations: vec![
                MathExpr::bin(BinOp::Mul, head.clone(), MathExpr::group(inner)),
                MathExpr::apply(head, args),
            ],
        }
    }

    /// Total node count, counting every interpretation of ambiguous nodes.
    pub fn node_count(&self) -> usize {
        1 + match self {
            MathExpr::Number { .. } | MathExpr::Constant { .. } => 0,
            MathExpr::Identifier { subscript, .. } => {
                subscript.as_ref().map_or(0, |s| s.node_count())
            }
            MathExpr::BinaryOp { left, right, .. } | MathExpr::Relation { left, right, .. } => {
                left.node_count() + right.node_count()
            }
            MathExpr::FunctionApply { head, args } => {
                head.node_count() + args.iter().map(|a| a.node_count()).sum::<usize>()
            }
            MathExpr::MacroCall { args, .. } => args.iter().map(|a| a.node_count()).sum(),
            MathExpr::Group { child } => child.node_count(),
            MathExpr::Sequence { children } => children.iter().map(|c| c.node_count()).sum(),
            MathExpr::Ambiguous { interpretations } => {
                interpretations.iter().map(|i| i.node_count()).sum()
            }
        }
    }

    /// True if the tree contains no `Ambiguous` node.
    pub fn is_resolved(&self) -> bool {
        match self {
            MathExpr::Ambiguous { .. } => false,
            MathExpr::Number { .. } | MathExpr::Constant { .. } => true,
            MathExpr::Identifier { subscript, .. } => {
                subscript.as_ref().is_none_or(|s| s.is_resolved())
            }
            MathExpr::BinaryOp { left, right, .. } | MathExpr::Relation { left, right, .. } => {
                left.is_resolved() && right.is_resolved()
            }
            MathExpr::FunctionApply { head, args } => {
                head.is_resolved() && args.iter().all(|a| a.is_resolved())
            }
            MathExpr::MacroCall { args, .. } => args.iter().all(|a| a.is_resolved()),
            MathExpr::Group { child } => child.is_resolved(),
            MathExpr::Sequence { children } => children.iter().all(|c| c.is_resolved()),
        }
    }

    /// Canonical form: groups collapsed, one-element sequences unwrapped,
    /// ambiguous nodes rebuilt in their canonical two-interpretation shape.
    pub fn normalize(&self) -> MathExpr {
        match self {
            MathExpr::Group { child } => child.normalize(),
            MathExpr::Sequence { children } if children.len() == 1 => children[0].normalize(),
            MathExpr::Sequence { children } => MathExpr::Sequence {
                children: children.iter().map(|c| c.normalize()).collect(),
            },
            MathExpr::Ambiguous { interpretations } => {
                // Rebuild from the function-application reading so the
                // multiplication reading keeps the group that ties both to the
                // same surface string.
                for interp in interpretations {
                    if let MathExpr::FunctionApply { head, args } = interp {
                        let head = head.normalize();
                        let args: Vec<_> = args.iter().map(|a| a.normalize()).collect();
                        return MathExpr::juxtaposition_ambiguity(head, args);
                    }
                }
                MathExpr::Ambiguous {
                    interpretations: interpretations.iter().map(|i| i.normalize()).collect(),
                }
            }
            MathExpr::Number { .. } | MathExpr::Constant { .. } => self.clone(),
            MathExpr::Identifier { name, subscript } => MathExpr::Identifier {
                name: name.clone(),
                subscript: subscript.as_ref().map(|s| Box::new(s.normalize())),
            },
            MathExpr::BinaryOp { op, left, right } => {
                MathExpr::bin(*op, left.normalize(), right.normalize())
            }
            MathExpr::Relation { rel, left, right } => {
                MathExpr::rel(*rel, left.normalize(), right.normalize())
            }
            MathExpr::FunctionApply { head, args } => MathExpr::apply(
                head.normalize(),
                args.iter().map(|a| a.normalize()).collect(),
            ),
            MathExpr::MacroCall { name, args } => MathExpr::call(
                name.clone(),
                args.iter().map(|a| a.normalize()).collect(),
            ),
        }
    }

    /// The symbol a juxtaposition ambiguity can be keyed on: identifiers and
    /// constants, ignoring any subscript (`E_{n}` and `E_{k}` both key on `E`).
    pub fn base_symbol(&self) -> Option<String> {
        match self {
            MathExpr::Identifier { name, .. } => Some(crate::render::render_symbol_name(name)),
            MathExpr::Constant { name } => Some(crate::render::render_constant_name(name)),
            _ => None,
        }
    }

    /// Debug serialization as an S-expression (documented in the README).
    pub fn to_sexpr(&self) -> String {
        match self {
            MathExpr::Number { literal } => format!("(num {literal})"),
            MathExpr::Identifier { name, subscript } => match subscript {
                None => format!("(id {name})"),
                Some(s) => format!("(id {name} {})", s.to_sexpr()),
            },
            MathExpr::Constant { name } => format!("(const {name})"),
            MathExpr::BinaryOp { op, left, right } => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div | BinOp::Frac => "/",
                    BinOp::Pow => "^",
                };
                format!("({sym} {} {})", left.to_sexpr(), right.to_sexpr())
            }
            MathExpr::Relation { rel, left, right } => {
                format!("({} {} {})", rel.as_str(), left.to_sexpr(), right.to_sexpr())
            }
            MathExpr::FunctionApply { head, args } => {
                let args: Vec<_> = args.iter().map(|a| a.to_sexpr()).collect();
                format!("(apply {} {})", head.to_sexpr(), args.join(" "))
            }
            MathExpr::MacroCall { name, args } => {
                if args.is_empty() {
                    format!("(macro {name})")
                } else {
                    let args: Vec<_> = args.iter().map(|a| a.to_sexpr()).collect();
                    format!("(macro {name} {})", args.join(" "))
                }
            }
            MathExpr::Group { child } => format!("(group {})", child.to_sexpr()),
            MathExpr::Sequence { children } => {
                let cs: Vec<_> = children.iter().map(|c| c.to_sexpr()).collect();
                format!("(seq {})", cs.join(" "))
            }
            MathExpr::Ambiguous { interpretations } => {
                let is: Vec<_> = interpretations.iter().map(|i| i.to_sexpr()).collect();
                format!("(amb {})", is.join(" "))
            }
        }
    }
}
