//! Command line interface: `parse`, `translate`, `verify`, `moi`, `bench`,
//! and `emit-script` subcommands over the library pipeline.
//!
//! Results go to stdout as JSON (tab-separated for the `moi` reports, raw
//! text for scripts), diagnostics to stderr. Exit codes: 0 success, 1 user
//! error, 2 internal error. Identical invocations produce identical stdout.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::bench::{evaluate_pipeline, load_gold, Mode};
use crate::disambiguate::{DocumentAnalysis, SemanticBinding};
use crate::document::{Document, DocumentError};
use crate::lexicon::ContentDictionary;
use crate::moi::{MoiIndex, MoiIndexBuilder};
use crate::parser::{parse_latex_with, ParseOptions};
use crate::translate::{translate, CasTarget, TranslationResult};
use crate::verify::{
    emit_cas_script, macro_constraints, numeric_verify, Outcome, Reason, SamplingConfig,
};

/// Environment variable that overrides the configured lexicon path.
pub const LEXICON_ENV_VAR: &str = "MATHCAST_LEXICON";

#[derive(Parser)]
#[command(
    name = "mathcast",
    version,
    about = "Parse, disambiguate, translate, and verify presentation LaTeX math"
)]
struct Cli {
    /// Config file: `key = value` lines (see README for the key list)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Lexicon file (JSON lines); overrides config and MATHCAST_LEXICON
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a math-mode LaTeX expression and print its tree as JSON
    Parse {
        latex: String,
        /// Reject macros outside the grammar subset
        #[arg(long)]
        strict: bool,
        /// Print the S-expression form instead of JSON
        #[arg(long)]
        pretty: bool,
    },
    /// Translate an expression to a computer algebra system syntax
    Translate {
        latex: String,
        /// Target system: mathematica, maple, or sympytext
        #[arg(long)]
        target: Option<String>,
        /// LaTeX file whose text disambiguates the expression
        #[arg(long)]
        context: Option<PathBuf>,
        /// Include the derived symbol bindings in the output
        #[arg(long)]
        bindings: bool,
        /// Print only the translated text
        #[arg(long)]
        pretty: bool,
    },
    /// Numerically verify every equation in a LaTeX file
    Verify {
        file: PathBuf,
        /// Sampling seed (overrides config)
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the report JSON to this path
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Corpus frequency statistics over canonical subexpressions
    #[command(subcommand)]
    Moi(MoiCommand),
    /// Run the pipeline against a gold TSV dataset
    Bench {
        gold: PathBuf,
        #[arg(long)]
        target: Option<String>,
        /// context_sensitive, context_free, or both
        #[arg(long, default_value = "both")]
        mode: String,
        /// Also write the metrics JSON to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a symbolic re-check script for an external CAS
    EmitScript {
        file: PathBuf,
        #[arg(long)]
        target: Option<String>,
    },
}

#[derive(Subcommand)]
enum MoiCommand {
    /// Index the .tex files under a directory
    Index {
        dir: PathBuf,
        #[arg(long, default_value = "moi_index.json")]
        out: PathBuf,
    },
    /// Print the k most document-frequent subexpressions, tab-separated
    Top {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "moi_index.json")]
        index: PathBuf,
    },
    /// Fit the rank-frequency power law, tab-separated `slope r_squared`
    Zipf {
        #[arg(long, default_value = "moi_index.json")]
        index: PathBuf,
    },
}

enum CliError {
    User(String),
    Internal(String),
}

impl CliError {
    fn user(message: impl std::fmt::Display) -> Self {
        CliError::User(message.to_string())
    }
}

impl From<DocumentError> for CliError {
    fn from(e: DocumentError) -> Self {
        CliError::User(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

/// Runs the CLI over the given argument vector and returns the exit code.
/// Never panics: internal panics are caught and mapped to exit code 2.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return 0;
                }
                _ => 1,
            };
            eprint!("{e}");
            return code;
        }
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| dispatch(cli)));
    match outcome {
        Ok(Ok(())) => 0,
        Ok(Err(CliError::User(message))) => {
            eprintln!("error: {message}");
            1
        }
        Ok(Err(CliError::Internal(message))) => {
            eprintln!("internal error: {message}");
            2
        }
        Err(_) => {
            eprintln!("internal error: unexpected panic");
            2
        }
    }
}

#[derive(Debug, Clone)]
struct Config {
    lexicon_path: Option<PathBuf>,
    default_target: CasTarget,
    strict_parse: bool,
    sampling: SamplingConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            lexicon_path: None,
            default_target: CasTarget::Mathematica,
            strict_parse: false,
            sampling: SamplingConfig::default(),
        }
    }
}

/// Parses the flat `key = value` config format. `#` starts a comment; string
/// values may be quoted.
fn parse_config(text: &str) -> Result<Config, String> {
    let mut config = Config::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected `key = value`", idx + 1));
        };
        let key = key.trim();
        let value = value.trim().trim_matches('"');
        let parse_err = |what: &str| format!("line {}: bad {what} value `{value}`", idx + 1);
        match key {
            "lexicon_path" => config.lexicon_path = Some(PathBuf::from(value)),
            "default_target" => {
                config.default_target = value.parse().map_err(|_| parse_err("target"))?
            }
            "strict_parse" => {
                config.strict_parse = value.parse().map_err(|_| parse_err("boolean"))?
            }
            "sampling.points_per_variable" => {
                config.sampling.points_per_variable =
                    value.parse().map_err(|_| parse_err("integer"))?
            }
            "sampling.real_min" => {
                config.sampling.real_range.0 = value.parse().map_err(|_| parse_err("number"))?
            }
            "sampling.real_max" => {
                config.sampling.real_range.1 = value.parse().map_err(|_| parse_err("number"))?
            }
            "sampling.integer_min" => {
                config.sampling.integer_range.0 =
                    value.parse().map_err(|_| parse_err("integer"))?
            }
            "sampling.integer_max" => {
                config.sampling.integer_range.1 =
                    value.parse().map_err(|_| parse_err("integer"))?
            }
            "sampling.seed" => {
                config.sampling.seed = value.parse().map_err(|_| parse_err("integer"))?
            }
            "sampling.pole_epsilon" => {
                config.sampling.pole_epsilon = value.parse().map_err(|_| parse_err("number"))?
            }
            other => return Err(format!("line {}: unknown key `{other}`", idx + 1)),
        }
    }
    Ok(config)
}

fn load_config(cli_config: &Option<PathBuf>) -> Result<Config, CliError> {
    match cli_config {
        None => Ok(Config::default()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::user(format!("config {}: {e}", path.display())))?;
            parse_config(&text)
                .map_err(|e| CliError::user(format!("config {}: {e}", path.display())))
        }
    }
}

fn load_lexicon(flag: &Option<PathBuf>, config: &Config) -> Result<ContentDictionary, CliError> {
    let path = flag
        .clone()
        .or_else(|| std::env::var(LEXICON_ENV_VAR).ok().map(PathBuf::from))
        .or_else(|| config.lexicon_path.clone());
    match path {
        Some(path) => ContentDictionary::load(&path)
            .map_err(|e| CliError::user(format!("lexicon {}: {e}", path.display()))),
        None => Ok(ContentDictionary::seed()),
    }
}

fn parse_target(flag: &Option<String>, config: &Config) -> Result<CasTarget, CliError> {
    match flag {
        Some(value) => value.parse().map_err(CliError::user),
        None => Ok(config.default_target),
    }
}

fn dispatch(cli: Cli) -> CliResult {
    let config = load_config(&cli.config)?;
    match cli.command {
        Command::Parse {
            latex,
            strict,
            pretty,
        } => cmd_parse(&latex, strict || config.strict_parse, pretty),
        Command::Translate {
            latex,
            target,
            context,
            bindings,
            pretty,
        } => {
            let lexicon = load_lexicon(&cli.lexicon, &config)?;
            let target = parse_target(&target, &config)?;
            cmd_translate(&latex, target, context.as_deref(), bindings, pretty, &lexicon)
        }
        Command::Verify { file, seed, report } => {
            let lexicon = load_lexicon(&cli.lexicon, &config)?;
            let mut sampling = config.sampling.clone();
            if let Some(seed) = seed {
                sampling.seed = seed;
            }
            cmd_verify(&file, &sampling, report.as_deref(), &lexicon)
        }
        Command::Moi(moi) => match moi {
            MoiCommand::Index { dir, out } => cmd_moi_index(&dir, &out),
            MoiCommand::Top { k, index } => cmd_moi_top(k, &index),
            MoiCommand::Zipf { index } => cmd_moi_zipf(&index),
        },
        Command::Bench {
            gold,
            target,
            mode,
            out,
        } => {
            let lexicon = load_lexicon(&cli.lexicon, &config)?;
            let target = parse_target(&target, &config)?;
            cmd_bench(&gold, target, &mode, out.as_deref(), &config.sampling, &lexicon)
        }
        Command::EmitScript { file, target } => {
            let lexicon = load_lexicon(&cli.lexicon, &config)?;
            let target = parse_target(&target, &config)?;
            cmd_emit_script(&file, target, &lexicon)
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string(value).map_err(|e| CliError::Internal(e.to_string()))
}

fn cmd_parse(latex: &str, strict: bool, pretty: bool) -> CliResult {
    let expr = parse_latex_with(latex, ParseOptions { strict }).map_err(CliError::user)?;
    if pretty {
        println!("{}", expr.to_sexpr());
    } else {
        println!("{}", to_json(&expr)?);
    }
    Ok(())
}

#[derive(Serialize)]
struct TranslationWithBindings {
    translation: TranslationResult,
    bindings: Vec<SemanticBinding>,
}

fn cmd_translate(
    latex: &str,
    target: CasTarget,
    context: Option<&Path>,
    show_bindings: bool,
    pretty: bool,
    lexicon: &ContentDictionary,
) -> CliResult {
    crate::parser::parse_latex(latex).map_err(CliError::user)?;
    let (resolved, bindings) = match context {
        None => {
            let expr = crate::parser::parse_latex(latex).map_err(CliError::user)?;
            (crate::disambiguate::resolve(&expr, &[]), Vec::new())
        }
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::user(format!("context {}: {e}", path.display())))?;
            // The expression reads as if appended to the end of the context.
            let source = format!("{text}\n${latex}$");
            let doc = Document::from_latex(&source)?;
            let analysis = DocumentAnalysis::analyze(&doc, lexicon);
            let last_formula = doc
                .formulas()
                .last()
                .map(|(_, id, _)| id.to_string())
                .expect("appended formula exists");
            let resolved = analysis
                .resolve_formula(&last_formula)
                .map_err(CliError::user)?;
            (resolved, analysis.bindings)
        }
    };
    let translation = translate(&resolved, target, lexicon);
    if pretty {
        println!("{}", translation.text);
    } else if show_bindings {
        println!(
            "{}",
            to_json(&TranslationWithBindings {
                translation,
                bindings
            })?
        );
    } else {
        println!("{}", to_json(&translation)?);
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyRow {
    id: String,
    outcome: &'static str,
    samples_tested: usize,
    max_residual: f64,
    reasons: Vec<Reason>,
    counterexample: Option<BTreeMap<String, [f64; 2]>>,
}

fn cmd_verify(
    file: &Path,
    sampling: &SamplingConfig,
    report_path: Option<&Path>,
    lexicon: &ContentDictionary,
) -> CliResult {
    let doc = Document::load(file)?;
    let analysis = DocumentAnalysis::analyze(&doc, lexicon);
    let mut rows = Vec::new();
    for (_, id, _) in doc.formulas() {
        let resolved = analysis.resolve_formula(id).map_err(CliError::user)?;
        let constraints = macro_constraints(&resolved, lexicon);
        let row = match numeric_verify(&resolved, &constraints, sampling) {
            Ok(report) => {
                let (outcome, reasons, counterexample) = match report.outcome {
                    Outcome::Verified => ("verified", Vec::new(), None),
                    Outcome::Failed {
                        counterexample, ..
                    } => ("failed", Vec::new(), Some(counterexample)),
                    Outcome::Inconclusive { reasons } => ("inconclusive", reasons, None),
                };
                VerifyRow {
                    id: id.to_string(),
                    outcome,
                    samples_tested: report.samples_tested,
                    max_residual: report.max_residual,
                    reasons,
                    counterexample,
                }
            }
            Err(e) => VerifyRow {
                id: id.to_string(),
                outcome: "inconclusive",
                samples_tested: 0,
                max_residual: 0.0,
                reasons: vec![Reason::EvaluationError(e.to_string())],
                counterexample: None,
            },
        };
        rows.push(row);
    }
    let json = to_json(&rows)?;
    println!("{json}");
    if let Some(path) = report_path {
        fs::write(path, &json)
            .map_err(|e| CliError::user(format!("report {}: {e}", path.display())))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct IndexSummary {
    documents: u64,
    terms: usize,
    index: String,
}

fn cmd_moi_index(dir: &Path, out: &Path) -> CliResult {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::user(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "tex"))
        .collect();
    paths.sort();
    let mut builder = MoiIndexBuilder::new();
    for path in &paths {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::user(format!("{}: {e}", path.display())))?;
        let formulas = extract_formulas(&text)
            .map_err(|e| CliError::user(format!("{}: {e}", path.display())))?;
        let doc_id = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        builder
            .add_document(doc_id, &formulas)
            .map_err(CliError::user)?;
    }
    let index = builder.finish();
    index
        .save(out)
        .map_err(|e| CliError::user(format!("{}: {e}", out.display())))?;
    println!(
        "{}",
        to_json(&IndexSummary {
            documents: index.doc_count(),
            terms: index.distinct_terms(),
            index: out.display().to_string(),
        })?
    );
    Ok(())
}

/// A .tex corpus file holds formulas either delimited by `$...$` or one per
/// line when no dollar signs appear.
fn extract_formulas(text: &str) -> Result<Vec<crate::ast::MathExpr>, String> {
    if text.contains('$') {
        let doc = Document::from_latex(text).map_err(|e| e.to_string())?;
        Ok(doc.formulas().map(|(_, _, e)| e.clone()).collect())
    } else {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('%'))
            .map(|l| crate::parser::parse_latex(l).map_err(|e| format!("`{l}`: {e}")))
            .collect()
    }
}

fn load_index(path: &Path) -> Result<MoiIndex, CliError> {
    MoiIndex::load(path).map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

fn cmd_moi_top(k: usize, index_path: &Path) -> CliResult {
    let index = load_index(index_path)?;
    let top = index.stop_expressions(k).map_err(CliError::user)?;
    for canonical in top {
        let record = index.record(&canonical).expect("ranked term exists");
        println!("{canonical}\t{}\t{}", record.df, record.global_count);
    }
    Ok(())
}

fn cmd_moi_zipf(index_path: &Path) -> CliResult {
    let index = load_index(index_path)?;
    let fit = index.zipf_fit().map_err(CliError::user)?;
    println!("{}\t{}", fit.slope, fit.r_squared);
    Ok(())
}

fn cmd_bench(
    gold: &Path,
    target: CasTarget,
    mode: &str,
    out: Option<&Path>,
    sampling: &SamplingConfig,
    lexicon: &ContentDictionary,
) -> CliResult {
    let entries = load_gold(gold).map_err(CliError::user)?;
    if entries.is_empty() {
        return Err(CliError::user("gold dataset is empty"));
    }
    let modes: Vec<Mode> = match mode {
        "both" => vec![Mode::ContextSensitive, Mode::ContextFree],
        other => vec![other.parse().map_err(CliError::user)?],
    };
    let mut report = BTreeMap::new();
    for mode in modes {
        let metrics = evaluate_pipeline(&entries, lexicon, mode, target, sampling)
            .map_err(CliError::user)?;
        let key = match mode {
            Mode::ContextSensitive => "context_sensitive",
            Mode::ContextFree => "context_free",
        };
        report.insert(key, metrics);
    }
    let json = to_json(&report)?;
    println!("{json}");
    if let Some(path) = out {
        fs::write(path, &json)
            .map_err(|e| CliError::user(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_emit_script(file: &Path, target: CasTarget, lexicon: &ContentDictionary) -> CliResult {
    let doc = Document::load(file)?;
    let analysis = DocumentAnalysis::analyze(&doc, lexicon);
    let mut equations = Vec::new();
    for (_, id, _) in doc.formulas() {
        let resolved = analysis.resolve_formula(id).map_err(CliError::user)?;
        equations.push((id.to_string(), resolved));
    }
    print!("{}", emit_cas_script(&equations, target, lexicon));
    Ok(())
}
