//! Grounding the same formula in two different documents.
//!
//! `\pi(x+y)` is a multiplication in a geometry article and the prime
//! counting function in a number theory article; the surrounding text is all
//! that distinguishes them.
//!
//! ```bash
//! cargo run -p mathcast --example disambiguate_with_context
//! ```

use mathcast::disambiguate::{to_semantic_latex, DocumentAnalysis};
use mathcast::document::Document;
use mathcast::lexicon::ContentDictionary;
use mathcast::translate::{translate, CasTarget};

fn main() {
    let lexicon = ContentDictionary::seed();

    let number_theory = "In this section we count primes with the \
                         prime counting function $\\pi(n)$. \
                         The quantity $\\pi(x+y)$ then bounds the sum.";
    let geometry = "The circumference of an ellipse involves $\\pi(x+y)$ \
                    for semi-axes x and y.";

    for (name, source) in [("number theory", number_theory), ("geometry", geometry)] {
        println!("=== {name} ===");
        let doc = Document::from_latex(source).unwrap();
        let analysis = DocumentAnalysis::analyze(&doc, &lexicon);

        for binding in &analysis.bindings {
            println!(
                "binding: {} -> {} (confidence {:.3}, origin {:?}, blocks {:?})",
                binding.symbol, binding.macro_name, binding.confidence, binding.origin,
                binding.scope
            );
        }
        if analysis.bindings.is_empty() {
            println!("binding: none found; unbound symbols are reported, not guessed");
        }

        let last = analysis.nodes.last().unwrap().formula_id.clone();
        let resolved = analysis.resolve_formula(&last).unwrap();
        println!("semantic: {}", to_semantic_latex(&resolved, &lexicon).unwrap());
        println!(
            "mathematica: {}\n",
            translate(&resolved, CasTarget::Mathematica, &lexicon).text
        );
    }

    // The dependency graph links formulas that share notation, which is how
    // the definition travels from pi(n) to pi(x+y).
    let doc = Document::from_latex(number_theory).unwrap();
    let analysis = DocumentAnalysis::analyze(&doc, &lexicon);
    for node in &analysis.nodes {
        println!(
            "graph: {} -> {:?} (annotations: {})",
            node.formula_id,
            node.out_edges,
            node.annotations.len()
        );
    }
}
