//! One expression, three computer algebra systems.
//!
//! ```bash
//! cargo run -p mathcast --example translate_targets
//! ```

use mathcast::disambiguate::resolve;
use mathcast::lexicon::ContentDictionary;
use mathcast::parse_latex;
use mathcast::translate::{supported_targets, translate};

fn main() {
    let lexicon = ContentDictionary::seed();
    let inputs = [
        r"\nprimes@{n}",
        r"\frac{1}{2}",
        r"\sin^{2}x + \cos^{2}x",
        r"\EulerE@{n}@{\frac{1}{2}}",
        r"\sqrt{a^{2}+b^{2}}",
        r"\sum_{i=1}^{n} x_i",
        r"\zeta@{s}",
        r"\notamacro@{x}",
    ];

    for input in inputs {
        println!("latex: {input}");
        let resolved = resolve(&parse_latex(input).unwrap(), &[]);
        for target in supported_targets() {
            let result = translate(&resolved, target, &lexicon);
            let mark = if result.complete { " " } else { "!" };
            println!("  {mark} {target:<12} {}", result.text);
            for warning in &result.warnings {
                println!("      warning: {warning:?}");
            }
        }
        println!();
    }
}
