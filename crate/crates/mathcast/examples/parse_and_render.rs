//! Parsing presentation LaTeX into expression trees and rendering back.
//!
//! ```bash
//! cargo run -p mathcast --example parse_and_render
//! ```

use mathcast::{parse_latex, render_latex};

fn main() {
    let inputs = [
        r"\frac{1}{2}",
        r"a+b\cdot c",
        r"\pi(x+y)",
        r"E_n = 2^n E_n(\tfrac{1}{2})",
        r"\sin^{2}x + \cos^{2}x = 1",
        r"\sum_{i=1}^{n} x_i",
        r"\nprimes@{n}",
    ];

    for input in inputs {
        let expr = parse_latex(input).expect("grammar subset parses");
        println!("input:      {input}");
        println!("sexpr:      {}", expr.to_sexpr());
        println!("normalized: {}", render_latex(&expr));

        // The canonical rendering is a fixpoint of parse-then-render.
        let again = parse_latex(&render_latex(&expr)).unwrap();
        assert_eq!(expr, again);
        println!();
    }

    // Juxtaposing a symbol with a parenthesized group is ambiguous on
    // purpose: both readings are kept until context resolves them.
    let ambiguous = parse_latex(r"\pi(x+y)").unwrap();
    println!("ambiguity is represented, not resolved:");
    println!("{}", ambiguous.to_sexpr());
}
