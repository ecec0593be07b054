//! The built-in complex evaluator: the internal stand-in for running a CAS.
//!
//! ```bash
//! cargo run -p mathcast --example evaluate_expressions
//! ```

use mathcast::eval::{evaluate, free_variables, Assignment, EvalError};
use mathcast::parse_latex;
use num_complex::Complex64;

fn main() {
    let zero_variable = [
        r"2+3\cdot 4",
        r"\nprimes@{10}",
        r"\Gamma(5)",
        r"\EulerNumber@{10}",
        r"\EulerE@{3}@{\frac{1}{2}}",
        r"\BernoulliNumber@{12}",
        r"\sqrt{2}",
    ];
    for input in zero_variable {
        let expr = parse_latex(input).unwrap();
        match evaluate(&expr, &Assignment::new()) {
            Ok(value) => println!("{input:<28} = {value}"),
            Err(e) => println!("{input:<28} ! {e}"),
        }
    }

    // Free variables are keyed by their canonical rendering.
    let expr = parse_latex(r"\sin(x)+E_{n}\theta").unwrap();
    println!("\nfree variables of sin(x) + E_n theta: {:?}", free_variables(&expr));

    let mut assignment = Assignment::new();
    assignment.insert("x".into(), Complex64::new(0.5, 0.0));
    assignment.insert("E_{n}".into(), Complex64::new(2.0, 0.0));
    assignment.insert("n".into(), Complex64::new(1.0, 0.0));
    assignment.insert("\\theta".into(), Complex64::new(3.0, 0.0));
    println!("value: {}", evaluate(&expr, &assignment).unwrap());

    // Errors carry enough structure for the verifier's outcome taxonomy.
    let unbound = evaluate(&parse_latex("x+1").unwrap(), &Assignment::new());
    assert!(matches!(unbound, Err(EvalError::UnboundSymbol(_))));
    println!("\nx+1 with nothing bound: {}", unbound.unwrap_err());
    let pole = evaluate(&parse_latex(r"\frac{1}{0}").unwrap(), &Assignment::new());
    println!("1/0: {}", pole.unwrap_err());
    let unknown = evaluate(&parse_latex(r"\zeta@{2}").unwrap(), &Assignment::new());
    println!("zeta(2): {}", unknown.unwrap_err());
}
