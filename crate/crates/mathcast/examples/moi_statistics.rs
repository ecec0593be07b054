//! Corpus statistics over canonical subexpressions: TF-IDF ranking, stop
//! expressions, and the rank-frequency fit.
//!
//! ```bash
//! cargo run -p mathcast --example moi_statistics
//! ```

use mathcast::moi::{enumerate_subexpressions, index_corpus, DEFAULT_MAX_SUBEXPR_NODES};
use mathcast::parse_latex;
use mathcast::MathExpr;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    // Every complete subtree is a candidate mathematical object of interest.
    let expr = parse_latex(r"\sin^{2}x+\cos^{2}x").unwrap();
    println!("subexpressions of sin^2 x + cos^2 x:");
    for sub in enumerate_subexpressions(&expr, DEFAULT_MAX_SUBEXPR_NODES) {
        println!("  {sub}");
    }

    // A small corpus: x is everywhere (a stop expression), the Pythagorean
    // identity is distinctive.
    let docs = vec![
        ("trig", vec![r"\sin^{2}x+\cos^{2}x", r"\sin x", "x"]),
        ("algebra", vec![r"x^{2}+y^{2}", "x+y", "x"]),
        ("analysis", vec![r"\exp(x)", r"\frac{1}{x}", "x"]),
    ];
    let corpus: Vec<(String, Vec<MathExpr>)> = docs
        .into_iter()
        .map(|(id, formulas)| {
            (
                id.to_string(),
                formulas.iter().map(|f| parse_latex(f).unwrap()).collect(),
            )
        })
        .collect();
    let index = index_corpus(corpus).unwrap();

    println!("\nstop expressions (highest document frequency):");
    for term in index.stop_expressions(3).unwrap() {
        let record = index.record(&term).unwrap();
        println!("  {term}  df={} global={}", record.df, record.global_count);
    }

    println!("\ntf-idf inside the trig document:");
    let mut scored: Vec<(String, f64)> = index
        .records()
        .map(|(term, _)| (term.clone(), index.tfidf(term, "trig").unwrap()))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    for (term, score) in scored.iter().take(5) {
        println!("  {score:.4}  {term}");
    }
    println!("  (ubiquitous `x` scores {:.4})", index.tfidf("x", "trig").unwrap());

    // Synthetic corpus with Zipfian term frequencies: the log-log fit
    // recovers the exponent.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let terms = 200usize;
    let total: f64 = (1..=terms).map(|k| 1.0 / k as f64).sum();
    let cumulative: Vec<f64> = (1..=terms)
        .scan(0.0, |acc, k| {
            *acc += 1.0 / k as f64;
            Some(*acc)
        })
        .collect();
    let mut docs = Vec::new();
    for d in 0..20 {
        let mut formulas = Vec::new();
        for _ in 0..2_000 {
            let u = rng.random::<f64>() * total;
            let term = cumulative.partition_point(|&c| c < u).min(terms - 1);
            formulas.push(MathExpr::ident(format!("t{term:03}")));
        }
        docs.push((format!("doc{d}"), formulas));
    }
    let fit = index_corpus(docs).unwrap().zipf_fit().unwrap();
    println!(
        "\nzipf fit over the synthetic corpus: slope {:.3}, r^2 {:.4}",
        fit.slope, fit.r_squared
    );
    println!("(mathematical notation behaves like words: slope near -1)");
}
