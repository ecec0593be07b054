//! Numeric verification of equations by seeded sampling.
//!
//! An equation is Verified when every sampled residual stays below the pass
//! tolerance, Failed when a counterexample exceeds the fail threshold with
//! all evaluations succeeding, and Inconclusive otherwise: missing semantics
//! (unbound symbols), constraints no sampler can enforce, evaluation errors,
//! or residuals inside the dead band between the two tolerances. When a
//! trusted source supplied the equation, a Failed outcome points at the
//! translation, the source, or the evaluator itself, so the report carries
//! the counterexample as evidence.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ast::{MathExpr, RelOp};
use crate::eval::{evaluate, free_variables, Assignment, EvalError};
use crate::lexicon::{Constraint, ConstraintKind, ContentDictionary, DomainSpec};
use crate::render::{render_latex, BUILTIN_FUNCTIONS};
use crate::translate::{translate, CasTarget};

/// All sampled residuals must stay below this for Verified.
pub const PASS_TOLERANCE: f64 = 1e-10;
/// Any residual above this (with clean evaluations) means Failed.
pub const FAIL_THRESHOLD: f64 = 1e-4;

const MAX_JOINT_SAMPLES: usize = 10_000;
const MAX_INTEGER_ENUMERATION: i64 = 1_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("not an equation: top-level `=` required")]
    NotAnEquation,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "code", content = "detail", rename_all = "snake_case")]
pub enum Reason {
    UnboundSymbol(String),
    ConstraintUnsupported(String),
    EvaluationError(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Verified,
    Failed {
        /// The worst sampled assignment, values as `[re, im]`.
        counterexample: BTreeMap<String, [f64; 2]>,
        residual: f64,
    },
    Inconclusive { reasons: Vec<Reason> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    #[serde(flatten)]
    pub outcome: Outcome,
    pub samples_tested: usize,
    pub max_residual: f64,
}

impl VerificationReport {
    pub fn is_verified(&self) -> bool {
        matches!(self.outcome, Outcome::Verified)
    }
    pub fn is_failed(&self) -> bool {
        matches!(self.outcome, Outcome::Failed { .. })
    }
    pub fn is_inconclusive(&self) -> bool {
        matches!(self.outcome, Outcome::Inconclusive { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingConfig {
    pub points_per_variable: usize,
    pub real_range: (f64, f64),
    pub integer_range: (i64, i64),
    pub seed: u64,
    pub pole_epsilon: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            points_per_variable: 10,
            real_range: (0.1, 0.9),
            integer_range: (1, 10),
            seed: 0,
            pole_epsilon: 1e-6,
        }
    }
}

/// Collects the constraints of every lexicon macro an expression uses.
/// Domain and pole constraints on argument slots are re-bound to the concrete
/// variable standing in that slot; custom constraints are kept as is.
pub fn macro_constraints(expr: &MathExpr, lexicon: &ContentDictionary) -> Vec<Constraint> {
    let mut out: Vec<Constraint> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    collect_constraints(&expr.normalize(), lexicon, &mut out, &mut seen);
    out
}

fn collect_constraints(
    expr: &MathExpr,
    lexicon: &ContentDictionary,
    out: &mut Vec<Constraint>,
    seen: &mut BTreeSet<String>,
) {
    let mut visit_call = |name: &str, args: &[MathExpr]| {
        let Some(entry) = lexicon.get(name) else {
            return;
        };
        for constraint in &entry.constraints {
            let rebound = match &constraint.kind {
                ConstraintKind::Custom(_) => Some(constraint.clone()),
                ConstraintKind::Domain(_) | ConstraintKind::AvoidPoles(_) => {
                    slot_index(&constraint.applies_to)
                        .and_then(|slot| args.get(slot))
                        .and_then(|arg| match arg {
                            MathExpr::Identifier { .. } => Some(Constraint {
                                applies_to: render_latex(arg),
                                kind: constraint.kind.clone(),
                            }),
                            _ => None,
                        })
                }
            };
            if let Some(c) = rebound {
                let key = format!("{}|{:?}", c.applies_to, c.kind);
                if seen.insert(key) {
                    out.push(c);
                }
            }
        }
    };

    match expr {
        MathExpr::MacroCall { name, args } => {
            visit_call(name, args);
            for arg in args {
                collect_constraints(arg, lexicon, out, seen);
            }
        }
        MathExpr::FunctionApply { head, args } => {
            if let MathExpr::Identifier {
                name,
                subscript: None,
            } = head.as_ref()
            {
                if BUILTIN_FUNCTIONS.contains(&name.as_str()) {
                    visit_call(name, args);
                }
            }
            for arg in args {
                collect_constraints(arg, lexicon, out, seen);
            }
        }
        MathExpr::Identifier {
            subscript: Some(sub),
            ..
        } => collect_constraints(sub, lexicon, out, seen),
        MathExpr::BinaryOp { left, right, .. } | MathExpr::Relation { left, right, .. } => {
            collect_constraints(left, lexicon, out, seen);
            collect_constraints(right, lexicon, out, seen);
        }
        MathExpr::Group { child } => collect_constraints(child, lexicon, out, seen),
        MathExpr::Sequence { children }
        | MathExpr::Ambiguous {
            interpretations: children,
        } => {
            for child in children {
                collect_constraints(child, lexicon, out, seen);
            }
        }
        _ => {}
    }
}

fn slot_index(applies_to: &str) -> Option<usize> {
    applies_to.strip_prefix('$').and_then(|s| s.parse().ok())
}

enum VariableValues {
    Integers(Vec<i64>),
    Reals(Vec<f64>),
}

impl VariableValues {
    fn len(&self) -> usize {
        match self {
            VariableValues::Integers(v) => v.len(),
            VariableValues::Reals(v) => v.len(),
        }
    }
    fn get(&self, i: usize) -> Complex64 {
        match self {
            VariableValues::Integers(v) => Complex64::new(v[i] as f64, 0.0),
            VariableValues::Reals(v) => Complex64::new(v[i], 0.0),
        }
    }
}

/// Verifies a top-level equality by sampling its free variables.
pub fn numeric_verify(
    equation: &MathExpr,
    constraints: &[Constraint],
    config: &SamplingConfig,
) -> Result<VerificationReport, VerifyError> {
    let normalized = equation.normalize();
    let MathExpr::Relation {
        rel: RelOp::Eq,
        left,
        right,
    } = &normalized
    else {
        return Err(VerifyError::NotAnEquation);
    };

    // Constraints nothing can enforce stop sampling up front: the equation
    // cannot be judged without the semantics they carry.
    let unsupported: Vec<Reason> = constraints
        .iter()
        .filter_map(|c| match &c.kind {
            ConstraintKind::Custom(text) => Some(Reason::ConstraintUnsupported(text.clone())),
            _ => None,
        })
        .collect();
    if !unsupported.is_empty() {
        return Ok(VerificationReport {
            outcome: Outcome::Inconclusive {
                reasons: dedup(unsupported),
            },
            samples_tested: 0,
            max_residual: 0.0,
        });
    }

    let mut variables: Vec<String> = free_variables(&normalized).into_iter().collect();
    variables.sort();

    let mut reasons: BTreeSet<Reason> = BTreeSet::new();
    let mut value_lists: Vec<VariableValues> = Vec::new();
    for (index, var) in variables.iter().enumerate() {
        match build_values(var, index, constraints, config) {
            Ok(values) => value_lists.push(values),
            Err(reason) => {
                reasons.insert(reason);
            }
        }
    }
    if !reasons.is_empty() {
        return Ok(VerificationReport {
            outcome: Outcome::Inconclusive {
                reasons: reasons.into_iter().collect(),
            },
            samples_tested: 0,
            max_residual: 0.0,
        });
    }

    let mut samples_tested = 0usize;
    let mut max_residual = 0.0f64;
    let mut worst: Option<Assignment> = None;

    let total: usize = value_lists
        .iter()
        .map(VariableValues::len)
        .try_fold(1usize, |acc, len| acc.checked_mul(len))
        .unwrap_or(usize::MAX)
        .min(MAX_JOINT_SAMPLES);

    let mut odometer = vec![0usize; value_lists.len()];
    for _ in 0..total.max(if value_lists.is_empty() { 1 } else { 0 }) {
        let assignment: Assignment = variables
            .iter()
            .zip(&odometer)
            .zip(&value_lists)
            .map(|((name, &i), values)| (name.clone(), values.get(i)))
            .collect();
        samples_tested += 1;
        match (evaluate(left, &assignment), evaluate(right, &assignment)) {
            (Ok(lhs), Ok(rhs)) => {
                let scale = 1.0f64.max(lhs.norm()).max(rhs.norm());
                let residual = (lhs - rhs).norm() / scale;
                if residual > max_residual || worst.is_none() {
                    max_residual = residual.max(max_residual);
                    if residual >= max_residual {
                        worst = Some(assignment);
                    }
                }
            }
            (lhs, rhs) => {
                for side in [lhs, rhs] {
                    if let Err(e) = side {
                        reasons.insert(reason_for(e));
                    }
                }
            }
        }
        if !advance(&mut odometer, &value_lists) {
            break;
        }
    }

    let outcome = if !reasons.is_empty() {
        Outcome::Inconclusive {
            reasons: reasons.into_iter().collect(),
        }
    } else if samples_tested == 0 {
        Outcome::Inconclusive {
            reasons: vec![Reason::EvaluationError("no samples drawn".into())],
        }
    } else if max_residual < PASS_TOLERANCE {
        Outcome::Verified
    } else if max_residual > FAIL_THRESHOLD {
        Outcome::Failed {
            counterexample: worst
                .unwrap_or_default()
                .into_iter()
                .map(|(k, v)| (k, [v.re, v.im]))
                .collect(),
            residual: max_residual,
        }
    } else {
        Outcome::Inconclusive {
            reasons: vec![Reason::EvaluationError(format!(
                "max residual {max_residual:e} falls in the inconclusive band"
            ))],
        }
    };

    Ok(VerificationReport {
        outcome,
        samples_tested,
        max_residual,
    })
}

fn dedup(reasons: Vec<Reason>) -> Vec<Reason> {
    let set: BTreeSet<Reason> = reasons.into_iter().collect();
    set.into_iter().collect()
}

fn reason_for(error: EvalError) -> Reason {
    match error {
        EvalError::UnboundSymbol(name) => Reason::UnboundSymbol(name),
        EvalError::UnknownFunction(name) => Reason::UnboundSymbol(name),
        EvalError::PoleOrSingularity(msg) => Reason::EvaluationError(msg),
        EvalError::Domain(msg) => Reason::EvaluationError(msg),
    }
}

fn advance(odometer: &mut [usize], lists: &[VariableValues]) -> bool {
    for i in (0..odometer.len()).rev() {
        odometer[i] += 1;
        if odometer[i] < lists[i].len() {
            return true;
        }
        odometer[i] = 0;
    }
    false
}

fn build_values(
    var: &str,
    index: usize,
    constraints: &[Constraint],
    config: &SamplingConfig,
) -> Result<VariableValues, Reason> {
    let mut integer_bounds: Option<(i64, i64)> = None;
    let mut real_bounds = config.real_range;
    let mut poles: Vec<f64> = Vec::new();

    for c in constraints.iter().filter(|c| c.applies_to == var) {
        match &c.kind {
            ConstraintKind::Domain(DomainSpec::Integers { min, max }) => {
                let (lo, hi) = integer_bounds.unwrap_or(config.integer_range);
                integer_bounds = Some((lo.max(*min), hi.min(*max)));
            }
            ConstraintKind::Domain(DomainSpec::Real { min, max }) => {
                real_bounds = (real_bounds.0.max(*min), real_bounds.1.min(*max));
            }
            ConstraintKind::AvoidPoles(points) => poles.extend_from_slice(points),
            ConstraintKind::Custom(_) => {}
        }
    }

    if let Some((lo, hi)) = integer_bounds {
        if lo > hi {
            return Err(Reason::EvaluationError(format!(
                "empty integer domain for `{var}`"
            )));
        }
        let size = hi - lo + 1;
        let values: Vec<i64> = if size <= MAX_INTEGER_ENUMERATION {
            (lo..=hi).collect()
        } else {
            let step = size / config.points_per_variable.max(1) as i64;
            (0..config.points_per_variable as i64)
                .map(|i| lo + i * step)
                .collect()
        };
        return Ok(VariableValues::Integers(values));
    }

    let (lo, hi) = real_bounds;
    if lo >= hi {
        return Err(Reason::EvaluationError(format!(
            "empty real domain for `{var}`"
        )));
    }
    // Per-variable substream so adding variables or points never reshuffles
    // the values drawn for existing ones.
    let mut rng =
        ChaCha8Rng::seed_from_u64(config.seed ^ (index as u64 + 1).wrapping_mul(0x9E3779B97F4A7C15));
    let mut values = Vec::with_capacity(config.points_per_variable);
    for _ in 0..config.points_per_variable {
        let mut value = lo + (hi - lo) * rng.random::<f64>();
        let mut attempts = 0;
        while poles.iter().any(|p| (value - p).abs() < config.pole_epsilon) {
            value = lo + (hi - lo) * rng.random::<f64>();
            attempts += 1;
            if attempts > 64 {
                return Err(Reason::EvaluationError(format!(
                    "cannot sample `{var}` away from declared poles"
                )));
            }
        }
        values.push(value);
    }
    Ok(VariableValues::Reals(values))
}

/// Emits a script that re-checks each labeled equation symbolically in the
/// target CAS. Nothing is executed; the text is written for offline use.
pub fn emit_cas_script(
    equations: &[(String, MathExpr)],
    target: CasTarget,
    lexicon: &ContentDictionary,
) -> String {
    let mut out = String::new();
    match target {
        CasTarget::Mathematica => {
            out.push_str("(* mathcast verification script: Mathematica *)\n")
        }
        CasTarget::Maple => out.push_str("# mathcast verification script: Maple\n"),
        CasTarget::SymPyText => out.push_str(
            "# mathcast verification script: SymPyText\nfrom sympy import *\n",
        ),
    }
    for (id, equation) in equations {
        let normalized = equation.normalize();
        let MathExpr::Relation {
            rel: RelOp::Eq,
            left,
            right,
        } = &normalized
        else {
            match target {
                CasTarget::Mathematica => {
                    out.push_str(&format!("(* {id}: skipped, not an equation *)\n"))
                }
                _ => out.push_str(&format!("# {id}: skipped, not an equation\n")),
            }
            continue;
        };
        let lhs = translate(left, target, lexicon).text;
        let rhs = translate(right, target, lexicon).text;
        match target {
            CasTarget::Mathematica => {
                out.push_str(&format!(
                    "(* {id} *)\nPrint[\"{id}: \", FullSimplify[({lhs}) - ({rhs})]];\n"
                ));
            }
            CasTarget::Maple => {
                out.push_str(&format!(
                    "# {id}\nprintf(\"{id}: %a\\n\", simplify(({lhs}) - ({rhs})));\n"
                ));
            }
            CasTarget::SymPyText => {
                out.push_str(&format!(
                    "# {id}\nprint(\"{id}:\", simplify(({lhs}) - ({rhs})))\n"
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_latex;

    fn verify_str(latex: &str) -> VerificationReport {
        let expr = parse_latex(latex).unwrap();
        let lexicon = ContentDictionary::seed();
        let constraints = macro_constraints(&expr, &lexicon);
        numeric_verify(&expr, &constraints, &SamplingConfig::default()).unwrap()
    }

    #[test]
    fn pythagorean_identity_verifies() {
        let report = verify_str(r"\sin^{2}x+\cos^{2}x=1");
        assert!(report.is_verified(), "{report:?}");
        assert!(report.max_residual < PASS_TOLERANCE);
        assert!(report.samples_tested >= 1);
    }

    #[test]
    fn sine_is_not_cosine() {
        let report = verify_str(r"\sin x=\cos x");
        match &report.outcome {
            Outcome::Failed {
                counterexample,
                residual,
            } => {
                assert!(*residual > FAIL_THRESHOLD);
                assert!(counterexample.contains_key("x"));
            }
            other => panic!("expected Failed, got {other:?}"),
        }
    }

    #[test]
    fn unbound_macro_is_inconclusive_with_reason() {
        let report = verify_str(r"\foo@{x}=x");
        match &report.outcome {
            Outcome::Inconclusive { reasons } => {
                assert!(reasons
                    .iter()
                    .any(|r| matches!(r, Reason::UnboundSymbol(name) if name == "foo")));
            }
            other => panic!("expected Inconclusive, got {other:?}"),
        }
    }

    #[test]
    fn custom_constraint_short_circuits_sampling() {
        let report = verify_str(r"\zeta@{x}=1");
        assert_eq!(report.samples_tested, 0);
        match &report.outcome {
            Outcome::Inconclusive { reasons } => {
                assert!(reasons
                    .iter()
                    .any(|r| matches!(r, Reason::ConstraintUnsupported(_))));
            }
            other => panic!("expected Inconclusive, got {other:?}"),
        }
    }

    #[test]
    fn non_equation_is_rejected() {
        let expr = parse_latex("x+1").unwrap();
        assert_eq!(
            numeric_verify(&expr, &[], &SamplingConfig::default()),
            Err(VerifyError::NotAnEquation)
        );
    }

    #[test]
    fn constant_equation_tests_one_sample() {
        let report = verify_str(r"\Gamma(5)=24");
        assert!(report.is_verified());
        assert_eq!(report.samples_tested, 1);
    }

    #[test]
    fn same_seed_reproduces_the_report() {
        let expr = parse_latex(r"\sin(x+y)=\sin(x)\cos(y)+\cos(x)\sin(y)").unwrap();
        let config = SamplingConfig {
            seed: 7,
            ..SamplingConfig::default()
        };
        let a = numeric_verify(&expr, &[], &config).unwrap();
        let b = numeric_verify(&expr, &[], &config).unwrap();
        assert_eq!(a, b);
        assert!(a.is_verified());
    }

    #[test]
    fn euler_macro_constraint_drives_integer_sampling() {
        let expr = parse_latex(r"\EulerNumber@{n}=\EulerNumber@{n}").unwrap();
        let lexicon = ContentDictionary::seed();
        let constraints = macro_constraints(&expr, &lexicon);
        assert!(constraints
            .iter()
            .any(|c| c.applies_to == "n"
                && matches!(c.kind, ConstraintKind::Domain(DomainSpec::Integers { .. }))));
        let report = numeric_verify(&expr, &constraints, &SamplingConfig::default()).unwrap();
        assert!(report.is_verified());
        // Default integer range [1, 10] enumerated exhaustively.
        assert_eq!(report.samples_tested, 10);
    }

    #[test]
    fn more_points_never_turn_failed_into_verified() {
        let base = SamplingConfig::default();
        let expr = parse_latex(r"\sin x=x").unwrap();
        let small = numeric_verify(&expr, &[], &base).unwrap();
        assert!(small.is_failed());
        let large = numeric_verify(
            &expr,
            &[],
            &SamplingConfig {
                points_per_variable: 50,
                ..base
            },
        )
        .unwrap();
        assert!(!large.is_verified());
    }

    #[test]
    fn emitted_mathematica_script_uses_full_simplify() {
        let lexicon = ContentDictionary::seed();
        let eq = parse_latex(r"\sin^{2}x+\cos^{2}x=1").unwrap();
        let script = emit_cas_script(&[("eq1".into(), eq)], CasTarget::Mathematica, &lexicon);
        assert!(script.contains("FullSimplify["));
        assert!(script.contains("eq1"));
        assert!(script.contains("Sin[x]^2 + Cos[x]^2"));
    }

    #[test]
    fn emitted_maple_script_uses_simplify() {
        let lexicon = ContentDictionary::seed();
        let eq = parse_latex("x=x").unwrap();
        let script = emit_cas_script(&[("eq".into(), eq)], CasTarget::Maple, &lexicon);
        assert!(script.contains("simplify("));
    }

    #[test]
    fn empty_equation_list_is_header_only() {
        let lexicon = ContentDictionary::seed();
        let script = emit_cas_script(&[], CasTarget::Mathematica, &lexicon);
        assert_eq!(script.lines().count(), 1);
        assert!(script.starts_with("(*"));
    }
}
