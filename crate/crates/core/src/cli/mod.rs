//! Command-line front end: `lagmatch {dim|tqft-eval|example|cz|gradings}`.

pub mod commands;
pub mod document;
pub mod fixtures;
pub mod report;

use std::io::Read;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
pub use document::{parse, Document, SCHEMA_VERSION};
pub use report::Report;

pub const THREADS_ENV: &str = "LAGMATCH_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "lagmatch",
    version,
    about = "Lagrangian matching invariant calculator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Formal dimension and admissibility of spin-c structures.
    Dim(Source),
    /// Evaluate a closed Morse cycle.
    TqftEval(Source),
    /// A built-in worked example.
    Example {
        /// One of: s2xs2, s1s3_sum.
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        json: bool,
    },
    /// Conley–Zehnder index of sampled symplectic paths.
    Cz(Source),
    /// Grading set bookkeeping for a symmetric product.
    Gradings(Source),
}

#[derive(Debug, Args)]
pub struct Source {
    /// Input document; `-` reads standard input.
    #[arg(long, conflicts_with = "fixture")]
    pub input: Option<String>,
    /// A built-in document instead of a file.
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub json: bool,
}

impl Source {
    fn text(&self) -> Result<String> {
        match (&self.input, &self.fixture) {
            (Some(path), _) if path == "-" => {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| Error::Schema(format!("reading standard input: {e}")))?;
                Ok(s)
            }
            (Some(path), _) => std::fs::read_to_string(path)
                .map_err(|e| Error::Schema(format!("reading {path}: {e}"))),
            (None, Some(name)) => fixtures::get(name).map(str::to_string),
            (None, None) => Err(Error::Schema(
                "no input document: pass --input FILE or --fixture NAME".to_string(),
            )),
        }
    }
}

/// Worker count from `LAGMATCH_THREADS`, defaulting to 1.
pub fn threads_from(var: Option<&str>) -> Result<usize> {
    match var {
        None => Ok(1),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::InvalidParameter(format!(
                "{THREADS_ENV} must be a positive integer, got '{s}'"
            ))),
        },
    }
}

pub fn threads_from_env() -> Result<usize> {
    let var = std::env::var(THREADS_ENV).ok();
    threads_from(var.as_deref())
}

/// Runs a document command by name (`dim`, `tqft-eval`, `cz`, `gradings`).
pub fn run_document(command: &str, text: &str, threads: usize) -> Result<Report> {
    let doc = parse(text)?;
    match command {
        "dim" => commands::dim(&doc),
        "tqft-eval" => commands::tqft_eval(&doc, threads),
        "cz" => commands::cz(&doc),
        "gradings" => commands::gradings(&doc),
        other => Err(Error::InvalidParameter(format!(
            "unknown command '{other}'; expected dim, tqft-eval, cz or gradings"
        ))),
    }
}

/// Executes a parsed command line and returns the text for standard output.
pub fn execute(cli: &Cli) -> Result<String> {
    let threads = threads_from_env()?;
    let (name, source) = match &cli.command {
        Command::Example { name, m, n, json } => {
            return Ok(commands::example(name, *m, *n)?.render(*json));
        }
        Command::Dim(s) => ("dim", s),
        Command::TqftEval(s) => ("tqft-eval", s),
        Command::Cz(s) => ("cz", s),
        Command::Gradings(s) => ("gradings", s),
    };
    Ok(run_document(name, &source.text()?, threads)?.render(source.json))
}
