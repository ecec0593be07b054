//! Emitting symbolic re-check scripts for external computer algebra systems.
//!
//! The sampler only checks equations numerically; these scripts let a real
//! CAS confirm them symbolically offline.
//!
//! ```bash
//! cargo run -p mathcast --example emit_cas_scripts
//! ```

use mathcast::lexicon::ContentDictionary;
use mathcast::parse_latex;
use mathcast::translate::CasTarget;
use mathcast::verify::emit_cas_script;

fn main() {
    let lexicon = ContentDictionary::seed();
    let equations: Vec<(String, mathcast::MathExpr)> = [
        ("pythagoras", r"\sin^{2}x+\cos^{2}x=1"),
        ("gamma_recurrence", r"\Gamma(x+1)=x\Gamma(x)"),
        ("euler_numbers", r"\EulerNumber@{n}=2^{n}\EulerE@{n}@{\frac{1}{2}}"),
    ]
    .iter()
    .map(|(id, latex)| (id.to_string(), parse_latex(latex).unwrap()))
    .collect();

    for target in [CasTarget::Mathematica, CasTarget::Maple, CasTarget::SymPyText] {
        println!("----- {target} -----");
        print!("{}", emit_cas_script(&equations, target, &lexicon));
        println!();
    }
}
