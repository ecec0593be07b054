//! Numeric verification of the bundled identity suite, plus the error
//! detector: break one constant and watch the outcome flip.
//!
//! ```bash
//! cargo run -p mathcast --example verify_identities
//! ```

use mathcast::disambiguate::resolve;
use mathcast::document::Document;
use mathcast::lexicon::ContentDictionary;
use mathcast::parse_latex;
use mathcast::render::render_latex;
use mathcast::verify::{macro_constraints, numeric_verify, Outcome, SamplingConfig};

fn main() {
    let lexicon = ContentDictionary::seed();
    let config = SamplingConfig::default();
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/identities_true.tex");
    let doc = Document::load(path).unwrap();

    println!("=== bundled identities ===");
    for (_, id, expr) in doc.formulas() {
        let resolved = resolve(expr, &[]);
        let constraints = macro_constraints(&resolved, &lexicon);
        let report = numeric_verify(&resolved, &constraints, &config).unwrap();
        println!(
            "{id}: {:<12} samples={:<3} max_residual={:.3e}  {}",
            outcome_name(&report.outcome),
            report.samples_tested,
            report.max_residual,
            render_latex(expr),
        );
    }

    // A wrong source equation shows up as Failed with a counterexample.
    println!("\n=== one constant off by one ===");
    let wrong = parse_latex(r"\sin^{2}x+\cos^{2}x=2").unwrap();
    let report = numeric_verify(&wrong, &[], &config).unwrap();
    match report.outcome {
        Outcome::Failed {
            counterexample,
            residual,
        } => {
            println!("sin^2 x + cos^2 x = 2 failed, residual {residual:.3}");
            for (var, [re, im]) in counterexample {
                println!("  counterexample {var} = {re}{im:+}i");
            }
        }
        other => println!("unexpected: {other:?}"),
    }

    // Equations the sampler cannot decide say why.
    println!("\n=== undecidable equations ===");
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/inconclusive.tex");
    let doc = Document::load(path).unwrap();
    for (_, id, expr) in doc.formulas() {
        let resolved = resolve(expr, &[]);
        let constraints = macro_constraints(&resolved, &lexicon);
        let report = numeric_verify(&resolved, &constraints, &config).unwrap();
        if let Outcome::Inconclusive { reasons } = &report.outcome {
            println!("{id}: inconclusive {reasons:?}");
        }
    }
}

fn outcome_name(outcome: &Outcome) -> &'static str {
    match outcome {
        Outcome::Verified => "Verified",
        Outcome::Failed { .. } => "Failed",
        Outcome::Inconclusive { .. } => "Inconclusive",
    }
}
