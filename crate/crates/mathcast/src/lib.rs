//! mathcast turns presentation LaTeX math into computable form.
//!
//! The pipeline: [`parser`] builds a [`MathExpr`] tree from LaTeX,
//! [`disambiguate`] grounds ambiguous notation in document context using a
//! [`lexicon`] of semantic macros, [`translate`] rewrites resolved trees into
//! computer-algebra-system syntax, and [`verify`] checks equations numerically.
//! [`moi`] ranks subexpressions across a corpus by TF-IDF, and [`mod@bench`] runs
//! the whole pipeline against a gold dataset.
//!
//! See the `examples/` directory for one runnable program per capability; the
//! `mathcast` binary exposes the same functionality as subcommands.

pub mod ast;
pub mod bench;
pub mod cli;
pub mod disambiguate;
pub mod document;
pub mod eval;
pub mod lexicon;
pub mod moi;
pub mod parser;
pub mod render;
pub mod special;
pub mod sympytext;
pub mod token;
pub mod translate;
pub mod verify;

pub use ast::{BinOp, MathExpr, RelOp};
pub use parser::{parse_latex, parse_latex_strict, parse_latex_with, LatexError, ParseOptions};
pub use render::render_latex;
pub use token::{tokenize, MathToken, TokenKind, TokenizeError};
