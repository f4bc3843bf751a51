//! Command-line front end for `genmaxent`.
//!
//! [`run`] parses arguments, reads the input document, dispatches to the
//! library and returns the text to print together with the exit status, so
//! the binary is a thin wrapper and tests can drive it in-process.

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

mod commands;
pub mod docs;
pub mod format;

pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Environment variable capping the number of scan workers.
pub const THREADS_VAR: &str = "GENMAXENT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "genmaxent",
    version,
    about = "Generalized maximum-entropy solver"
)]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,

    /// Input document; `-` or absent reads standard input.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Input document given inline.
    #[arg(long, global = true, conflicts_with = "input")]
    pub doc: Option<String>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Seed for verification sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Random distributions sampled by `verify`.
    #[arg(long, global = true, default_value_t = 1000)]
    pub trials: usize,

    /// Finite-difference step for `thermo` and `fisher`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub step: Option<f64>,

    /// Energy-matching tolerance for `solve`, violation threshold for `verify`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Equilibrium state for a `theta` or an `energies` target.
    Solve,
    /// CSV table of thermodynamic quantities over a theta grid.
    Scan,
    /// Massieu function, gradient, metric and entropy at one theta.
    Thermo,
    /// Escort distribution, scores and Fisher information at one theta.
    Fisher,
    /// Shape classes of site percolation clusters.
    Percolation(PercolationArgs),
    /// Equilibrium certificates and sampled optimality check.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeArg {
    #[value(name = "1d")]
    Chain,
    #[value(name = "2d")]
    Square,
}

#[derive(Debug, Args)]
pub struct PercolationArgs {
    #[arg(long, value_enum)]
    pub lattice: LatticeArg,

    #[arg(long)]
    pub max_size: usize,

    /// Occupation probability.
    #[arg(long, conflicts_with = "theta", required_unless_present = "theta")]
    pub q: Option<f64>,

    /// `ln(q / (1 - q))`.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,

    /// Merge shapes related by a quarter turn (2D only).
    #[arg(long)]
    pub merge_rotations: bool,
}

/// Failure reported as a JSON error object.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub exit: i32,
    pub kind: String,
    pub path: Option<String>,
    pub message: String,
}

impl Failure {
    pub fn schema(kind: &str, path: Option<String>, message: impl Into<String>) -> Self {
        Self {
            exit: EXIT_SCHEMA,
            kind: kind.into(),
            path,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::schema("usage", None, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            exit: EXIT_IO,
            kind: "io".into(),
            path: None,
            message: message.into(),
        }
    }

    /// Maps a library error, prefixing field paths with `root`.
    pub fn from_library(e: genmaxent::Error, root: &str) -> Self {
        let exit = if e.is_validation() {
            EXIT_SCHEMA
        } else {
            EXIT_NUMERICAL
        };
        let path = match &e {
            genmaxent::Error::Invalid { path, .. } if root.is_empty() => Some(path.clone()),
            genmaxent::Error::Invalid { path, .. } => Some(format!("{root}.{path}")),
            _ => None,
        };
        Self {
            exit,
            kind: e.kind().into(),
            path,
            message: e.to_string(),
        }
    }

    fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            exit: i32,
            #[serde(skip_serializing_if = "Option::is_none")]
            path: Option<&'a str>,
            message: &'a str,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        format::to_json(&Wrapper {
            error: Body {
                kind: &self.kind,
                exit: self.exit,
                path: self.path.as_deref(),
                message: &self.message,
            },
        })
    }
}

impl From<genmaxent::Error> for Failure {
    fn from(e: genmaxent::Error) -> Self {
        Failure::from_library(e, "")
    }
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and executes the command.
/// `stdin` is read only when no `--input` file or `--doc` is given.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let first = rendered.lines().next().unwrap_or_default();
                Outcome {
                    code: EXIT_SCHEMA,
                    stdout: Failure::usage(first.trim_start_matches("error: ")).to_json(),
                    stderr: rendered,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    let threads = std::env::var(THREADS_VAR).ok();
    match execute(&cli, stdin, threads.as_deref()) {
        Ok(Report { text, code }) => Outcome {
            code,
            stdout: text,
            stderr: String::new(),
        },
        Err(f) => Outcome {
            code: f.exit,
            stderr: format!("error: {}\n", f.message),
            stdout: f.to_json(),
        },
    }
}

/// Successful output. `code` is nonzero only for a failed verification.
pub(crate) struct Report {
    pub text: String,
    pub code: i32,
}

fn execute(cli: &Cli, stdin: &mut dyn Read, threads: Option<&str>) -> Result<Report, Failure> {
    if let Some(step) = cli.step {
        positive("--step", step)?;
    }
    if let Some(tol) = cli.tolerance {
        positive("--tolerance", tol)?;
    }
    commands::check_format(cli)?;
    match &cli.verb {
        Verb::Percolation(args) => commands::percolation(cli, args),
        Verb::Solve => commands::solve(cli, &parse(&read_input(cli, stdin)?)?),
        Verb::Scan => {
            let workers = thread_count(threads)?;
            commands::scan(cli, &parse(&read_input(cli, stdin)?)?, workers)
        }
        Verb::Thermo => commands::thermo(cli, &parse(&read_input(cli, stdin)?)?),
        Verb::Fisher => commands::fisher(cli, &parse(&read_input(cli, stdin)?)?),
        Verb::Verify => commands::verify(cli, &parse(&read_input(cli, stdin)?)?),
    }
}

fn positive(flag: &str, value: f64) -> Result<(), Failure> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Failure::schema(
            "invalid",
            Some(flag.into()),
            format!("must be positive, got {value}"),
        ))
    }
}

fn thread_count(raw: Option<&str>) -> Result<usize, Failure> {
    match raw {
        None => Ok(1),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Failure::usage(format!(
                "{THREADS_VAR} must be a positive integer, got `{s}`"
            ))),
        },
    }
}

fn read_input(cli: &Cli, stdin: &mut dyn Read) -> Result<String, Failure> {
    if let Some(doc) = &cli.doc {
        return Ok(doc.clone());
    }
    match &cli.input {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display()))),
        _ => {
            let mut buf = String::new();
            stdin
                .read_to_string(&mut buf)
                .map_err(|e| Failure::io(format!("cannot read standard input: {e}")))?;
            Ok(buf)
        }
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, Failure> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Failure::schema("schema", Some(path), e.into_inner().to_string())
    })
}
