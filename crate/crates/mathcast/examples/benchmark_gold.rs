//! Running the whole pipeline against the bundled gold dataset, with and
//! without context.
//!
//! ```bash
//! cargo run -p mathcast --example benchmark_gold
//! ```

use mathcast::bench::{evaluate_pipeline, load_gold, resolve_entry, Category, Mode};
use mathcast::lexicon::ContentDictionary;
use mathcast::translate::{translate, CasTarget};
use mathcast::verify::SamplingConfig;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/gold_seed.tsv");
    let entries = load_gold(path).unwrap();
    let lexicon = ContentDictionary::seed();
    let sampling = SamplingConfig::default();
    let target = CasTarget::Mathematica;

    for mode in [Mode::ContextSensitive, Mode::ContextFree] {
        let metrics = evaluate_pipeline(&entries, &lexicon, mode, target, &sampling).unwrap();
        println!(
            "{mode:?}: accuracy {:.3}, verified {:.3}, failed {:.3}, inconclusive {:.3}",
            metrics.translation_accuracy,
            metrics.verified_rate,
            metrics.failed_rate,
            metrics.inconclusive_rate
        );
    }

    // Where the two modes disagree: exactly the ambiguous entries.
    println!("\nambiguous entries, side by side:");
    for entry in entries.iter().filter(|e| e.category == Category::Ambiguous) {
        let cs = resolve_entry(entry, &lexicon, Mode::ContextSensitive).unwrap();
        let cf = resolve_entry(entry, &lexicon, Mode::ContextFree).unwrap();
        println!(
            "{:<4} {:<24} with context: {:<24} without: {}",
            entry.id,
            entry.latex,
            translate(&cs, target, &lexicon).text,
            translate(&cf, target, &lexicon).text
        );
    }
}
