//! Numeric evaluation of resolved expressions over complex numbers.
//!
//! The internal stand-in for running a CAS: a fixed function table covering
//! arithmetic, elementary functions, and the special functions the seed
//! lexicon names. Variables are keyed by their canonical rendering (`x`,
//! `E_{n}`, `\theta`).

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use thiserror::Error;

use crate::ast::{BinOp, MathExpr};
use crate::render::{render_latex, BUILTIN_FUNCTIONS};
use crate::special::{self, SpecialError};

pub type Assignment = BTreeMap<String, Complex64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("pole or singularity: {0}")]
    PoleOrSingularity(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("{0}")]
    Domain(String),
}

impl From<SpecialError> for EvalError {
    fn from(e: SpecialError) -> Self {
        match e {
            SpecialError::Pole(msg) => EvalError::PoleOrSingularity(msg),
            SpecialError::OutOfRange(msg) => EvalError::Domain(msg),
        }
    }
}

/// Free variables of an expression: canonical renderings of every identifier
/// that is not a built-in function head.
pub fn free_variables(expr: &MathExpr) -> BTreeSet<String> {
    let mut vars = BTreeSet::new();
    collect_free(&expr.normalize(), &mut vars);
    vars
}

fn collect_free(expr: &MathExpr, vars: &mut BTreeSet<String>) {
    match expr {
        MathExpr::Identifier { subscript, .. } => {
            vars.insert(render_latex(expr));
            if let Some(sub) = subscript {
                collect_free(sub, vars);
            }
        }
        MathExpr::Number { .. } | MathExpr::Constant { .. } => {}
        MathExpr::BinaryOp { left, right, .. } | MathExpr::Relation { left, right, .. } => {
            collect_free(left, vars);
            collect_free(right, vars);
        }
        MathExpr::FunctionApply { head, args } => {
            let builtin_head = matches!(
                head.as_ref(),
                MathExpr::Identifier { name, subscript: None }
                    if BUILTIN_FUNCTIONS.contains(&name.as_str())
            );
            if !builtin_head {
                collect_free(head, vars);
            }
            for arg in args {
                collect_free(arg, vars);
            }
        }
        MathExpr::MacroCall { args, .. } => {
            for arg in args {
                collect_free(arg, vars);
            }
        }
        MathExpr::Group { child } => collect_free(child, vars),
        MathExpr::Sequence { children } | MathExpr::Ambiguous { interpretations: children } => {
            for child in children {
                collect_free(child, vars);
            }
        }
    }
}

/// Evaluates an expression under an assignment of its free variables.
pub fn evaluate(expr: &MathExpr, assignment: &Assignment) -> Result<Complex64, EvalError> {
    eval(&expr.normalize(), assignment)
}

fn eval(expr: &MathExpr, assignment: &Assignment) -> Result<Complex64, EvalError> {
    match expr {
        MathExpr::Number { literal } => literal
            .parse::<f64>()
            .map(|v| Complex64::new(v, 0.0))
            .map_err(|_| EvalError::Domain(format!("bad numeric literal `{literal}`"))),
        MathExpr::Identifier { .. } => {
            let key = render_latex(expr);
            assignment
                .get(&key)
                .copied()
                .ok_or(EvalError::UnboundSymbol(key))
        }
        MathExpr::Constant { name } => match name.as_str() {
            "pi" => Ok(Complex64::new(std::f64::consts::PI, 0.0)),
            other => Err(EvalError::UnknownFunction(other.to_string())),
        },
        MathExpr::BinaryOp { op, left, right } => {
            let l = eval(left, assignment)?;
            let r = eval(right, assignment)?;
            match op {
                BinOp::Add => Ok(l + r),
                BinOp::Sub => Ok(l - r),
                BinOp::Mul => Ok(l * r),
                BinOp::Div | BinOp::Frac => {
                    if r.norm() < 1e-300 {
                        Err(EvalError::PoleOrSingularity("division by zero".into()))
                    } else {
                        Ok(l / r)
                    }
                }
                BinOp::Pow => complex_pow(l, r),
            }
        }
        MathExpr::Relation { .. } => Err(EvalError::Domain(
            "a relation has no numeric value; evaluate its sides".into(),
        )),
        MathExpr::FunctionApply { head, args } => {
            let name = match head.as_ref() {
                MathExpr::Identifier {
                    name,
                    subscript: None,
                } => name.clone(),
                other => {
                    return Err(EvalError::Domain(format!(
                        "cannot apply `{}` as a function",
                        render_latex(other)
                    )))
                }
            };
            let values = args
                .iter()
                .map(|a| eval(a, assignment))
                .collect::<Result<Vec<_>, _>>()?;
            apply_function(&name, &values)
        }
        MathExpr::MacroCall { name, args } => {
            let values = args
                .iter()
                .map(|a| eval(a, assignment))
                .collect::<Result<Vec<_>, _>>()?;
            apply_function(name, &values)
        }
        MathExpr::Group { child } => eval(child, assignment),
        MathExpr::Sequence { .. } => Err(EvalError::Domain(
            "a sequence has no single numeric value".into(),
        )),
        MathExpr::Ambiguous { .. } => Err(EvalError::Domain(
            "ambiguous expression; resolve it before evaluating".into(),
        )),
    }
}

fn as_integer(z: Complex64) -> Option<i64> {
    if z.im.abs() > 1e-9 {
        return None;
    }
    let rounded = z.re.round();
    if (z.re - rounded).abs() > 1e-9 || rounded.abs() > 9e15 {
        return None;
    }
    Some(rounded as i64)
}

fn as_index(z: Complex64, what: &str) -> Result<u32, EvalError> {
    match as_integer(z) {
        Some(n) if n >= 0 && n <= u32::MAX as i64 => Ok(n as u32),
        _ => Err(EvalError::Domain(format!(
            "{what} requires a non-negative integer, got {z}"
        ))),
    }
}

fn complex_pow(base: Complex64, exp: Complex64) -> Result<Complex64, EvalError> {
    if let Some(n) = as_integer(exp) {
        if base.norm() < 1e-300 {
            return if n > 0 {
                Ok(Complex64::new(0.0, 0.0))
            } else if n == 0 {
                Ok(Complex64::new(1.0, 0.0))
            } else {
                Err(EvalError::PoleOrSingularity(
                    "zero to a negative power".into(),
                ))
            };
        }
        if n.abs() <= 64 {
            return Ok(special::int_pow(base, n));
        }
    }
    if base.norm() < 1e-300 {
        return if exp.re > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(EvalError::PoleOrSingularity("zero base power".into()))
        };
    }
    Ok(base.powc(exp))
}

fn reciprocal(z: Complex64, name: &str) -> Result<Complex64, EvalError> {
    if z.norm() < 1e-300 {
        Err(EvalError::PoleOrSingularity(format!("{name} pole")))
    } else {
        Ok(1.0 / z)
    }
}

fn expect_args<const N: usize>(name: &str, args: &[Complex64]) -> Result<[Complex64; N], EvalError> {
    <[Complex64; N]>::try_from(args).map_err(|_| {
        EvalError::Domain(format!(
            "`{name}` expects {N} argument(s), got {}",
            args.len()
        ))
    })
}

fn apply_function(name: &str, args: &[Complex64]) -> Result<Complex64, EvalError> {
    match name {
        "sin" => Ok(expect_args::<1>(name, args)?[0].sin()),
        "cos" => Ok(expect_args::<1>(name, args)?[0].cos()),
        "tan" => Ok(expect_args::<1>(name, args)?[0].tan()),
        "cot" => {
            let [z] = expect_args::<1>(name, args)?;
            reciprocal(z.tan(), "cot")
        }
        "sec" => {
            let [z] = expect_args::<1>(name, args)?;
            reciprocal(z.cos(), "sec")
        }
        "csc" => {
            let [z] = expect_args::<1>(name, args)?;
            reciprocal(z.sin(), "csc")
        }
        "arcsin" => Ok(expect_args::<1>(name, args)?[0].asin()),
        "arccos" => Ok(expect_args::<1>(name, args)?[0].acos()),
        "arctan" => Ok(expect_args::<1>(name, args)?[0].atan()),
        "sinh" => Ok(expect_args::<1>(name, args)?[0].sinh()),
        "cosh" => Ok(expect_args::<1>(name, args)?[0].cosh()),
        "tanh" => Ok(expect_args::<1>(name, args)?[0].tanh()),
        "exp" => Ok(expect_args::<1>(name, args)?[0].exp()),
        "ln" | "log" => {
            let [z] = expect_args::<1>(name, args)?;
            if z.norm() < 1e-300 {
                Err(EvalError::PoleOrSingularity("log of zero".into()))
            } else {
                Ok(z.ln())
            }
        }
        "sqrt" => Ok(expect_args::<1>(name, args)?[0].sqrt()),
        "abs" => Ok(Complex64::new(expect_args::<1>(name, args)?[0].norm(), 0.0)),
        "Gamma" => {
            let [z] = expect_args::<1>(name, args)?;
            Ok(special::gamma(z)?)
        }
        "nprimes" => {
            let [z] = expect_args::<1>(name, args)?;
            if z.im.abs() > 1e-9 {
                return Err(EvalError::Domain(
                    "prime counting needs a real argument".into(),
                ));
            }
            Ok(Complex64::new(special::prime_pi(z.re)? as f64, 0.0))
        }
        "EulerNumber" => {
            let [n] = expect_args::<1>(name, args)?;
            let n = as_index(n, "EulerNumber")?;
            Ok(Complex64::new(special::euler_number(n)? as f64, 0.0))
        }
        "EulerE" => {
            let [n, x] = expect_args::<2>(name, args)?;
            let n = as_index(n, "EulerE")?;
            Ok(special::euler_polynomial(n, x)?)
        }
        "BernoulliNumber" => {
            let [n] = expect_args::<1>(name, args)?;
            let n = as_index(n, "BernoulliNumber")?;
            let (num, den) = special::bernoulli_number(n)?;
            Ok(Complex64::new(num as f64 / den as f64, 0.0))
        }
        "BernoulliB" => {
            let [n, x] = expect_args::<2>(name, args)?;
            let n = as_index(n, "BernoulliB")?;
            Ok(special::bernoulli_polynomial(n, x)?)
        }
        "binomial" => {
            let [n, k] = expect_args::<2>(name, args)?;
            let (n, k) = (as_index(n, "binomial")?, as_index(k, "binomial")?);
            if k > n {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let mut result = 1.0f64;
            for i in 0..k.min(n - k) {
                result = result * (n - i) as f64 / (i + 1) as f64;
            }
            Ok(Complex64::new(result.round(), 0.0))
        }
        "factorial" => {
            let [n] = expect_args::<1>(name, args)?;
            let n = as_index(n, "factorial")?;
            if n > 170 {
                return Err(EvalError::Domain("factorial overflows f64".into()));
            }
            let mut result = 1.0f64;
            for i in 2..=n {
                result *= i as f64;
            }
            Ok(Complex64::new(result, 0.0))
        }
        "HeavisideTheta" => {
            let [z] = expect_args::<1>(name, args)?;
            if z.im.abs() > 1e-9 {
                return Err(EvalError::Domain("step function needs a real argument".into()));
            }
            let value = if z.re > 0.0 {
                1.0
            } else if z.re < 0.0 {
                0.0
            } else {
                0.5
            };
            Ok(Complex64::new(value, 0.0))
        }
        "JacobiP" => {
            let [a, b, n, x] = expect_args::<4>(name, args)?;
            let n = as_index(n, "JacobiP")?;
            Ok(special::jacobi_polynomial(n, a, b, x)?)
        }
        other => Err(EvalError::UnknownFunction(other.to_string())),
    }
}
