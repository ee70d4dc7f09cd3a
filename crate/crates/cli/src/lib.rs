//! Pipeline driver behind the `bianchi` binary.
//!
//! [`parse_invocation`] turns argv into a [`Cli`], [`execute`] runs it and
//! returns a [`Report`] whose exit code follows the contract: 0 success,
//! 1 verified negative, 2 usage or input error, 3 budget exhausted.

pub mod cache;
pub mod commands;
pub mod label;
pub mod survey;

use std::path::PathBuf;

use bianchi_core::fpgroups::{FpError, DEFAULT_COSET_BUDGET};
use bianchi_core::geometry::GeometryError;
use bianchi_core::homology::HomologyError;
use bianchi_core::ring::RingError;
use bianchi_core::triangulation::TriangulationError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Environment variable that overrides `--cache-dir`.
pub const CACHE_ENV: &str = "CF_CACHE_DIR";

#[derive(Parser, Debug, Clone, PartialEq, Eq)]
#[command(name = "bianchi", version, about = "Fundamental domains, congruence quotients and link certificates for Bianchi groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Directory for cached fundamental domains.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Work limit: cosets for enumerations, tetrahedra for builds.
    #[arg(long, global = true, default_value_t = DEFAULT_COSET_BUDGET)]
    pub budget: usize,
    /// Output file (domain or triangulation data; the report otherwise).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for surveys.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Compute (or load) the verified fundamental domain for d.
    Domain {
        #[arg(long)]
        d: i64,
    },
    /// Glue the quotient triangulation and simplify it.
    Build(Target),
    /// H1 of the quotient and of the coned-off complex.
    Homology(Target),
    /// |PSL(2, O_d/I)| from the factorization of I.
    PslOrder(IdealArgs),
    /// |B(I)| by coset enumeration.
    BiOrder {
        #[command(flatten)]
        ideal: IdealArgs,
        /// Peripheral triples `n,k,l;n,k,l;...`, derived when omitted.
        #[arg(long)]
        triples: Option<String>,
    },
    /// Check a link certificate file.
    VerifyLink { path: PathBuf },
    /// One row per ideal of norm up to --max-norm.
    Survey {
        #[arg(long)]
        d: i64,
        #[arg(long, default_value_t = 10)]
        max_norm: i64,
    },
}

#[derive(Args, Debug, Clone, PartialEq, Eq)]
pub struct IdealArgs {
    #[arg(long)]
    pub d: i64,
    /// Comma-separated generators, e.g. `2, 1+w` or `(1+s)/2`.
    #[arg(long)]
    pub ideal: String,
}

#[derive(Args, Debug, Clone, PartialEq, Eq)]
pub struct Target {
    #[command(flatten)]
    pub ideal: IdealArgs,
    /// Use Γ₁(I) instead of Γ(I).
    #[arg(long)]
    pub gamma1: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.to_path_buf(), message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Ring(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Fp(e) => match e {
                FpError::BudgetExceeded(_) => EXIT_BUDGET,
                FpError::Ring(RingError::BudgetExceeded(_)) => EXIT_BUDGET,
                FpError::Test1Failed { .. }
                | FpError::Test2Failed(_)
                | FpError::Test3Failed(_)
                | FpError::OrderMismatch { .. }
                | FpError::IncompleteTable => EXIT_NEGATIVE,
                _ => EXIT_USAGE,
            },
            CliError::Geometry(e) => match e {
                GeometryError::UnsupportedD(_) => EXIT_USAGE,
                GeometryError::IncompleteSample(_) => EXIT_BUDGET,
                _ => EXIT_NEGATIVE,
            },
            CliError::Triangulation(e) => match e {
                TriangulationError::BudgetExceeded(_) => EXIT_BUDGET,
                TriangulationError::Ring(RingError::BudgetExceeded(_)) => EXIT_BUDGET,
                TriangulationError::Ring(_) => EXIT_USAGE,
                _ => EXIT_NEGATIVE,
            },
            CliError::Homology(_) => EXIT_NEGATIVE,
        }
    }
}

/// Result of one command: a JSON body, its text rendering, and the exit
/// code.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub body: Value,
    pub text: String,
    pub exit_code: i32,
}

impl Report {
    pub fn ok(command: &'static str, body: Value, text: String) -> Self {
        Report { command, body, text, exit_code: EXIT_OK }
    }

    pub fn error(command: &'static str, e: &CliError) -> Self {
        Report {
            command,
            body: json!({ "error": e.to_string() }),
            text: format!("error: {}", e),
            exit_code: e.exit_code(),
        }
    }

    /// The report as printed for `format`, with a trailing newline.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => format!("{}\n", self.text),
            Format::Json => {
                let mut v = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": self.command,
                    "exit_code": self.exit_code,
                });
                if let (Value::Object(out), Value::Object(body)) = (&mut v, &self.body) {
                    for (k, x) in body {
                        out.insert(k.clone(), x.clone());
                    }
                }
                format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
            }
        }
    }
}

/// Parses argv (including the program name). Help and version requests
/// come back as errors too; `clap::Error::exit` prints them with code 0.
pub fn parse_invocation<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(argv)
}

impl Cli {
    /// `CF_CACHE_DIR` when set and non-empty, else `--cache-dir`.
    pub fn resolved_cache_dir(&self) -> Option<PathBuf> {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
            _ => self.cache_dir.clone(),
        }
    }

    pub fn command_name(&self) -> &'static str {
        match self.command {
            Command::Domain { .. } => "domain",
            Command::Build(_) => "build",
            Command::Homology(_) => "homology",
            Command::PslOrder(_) => "psl-order",
            Command::BiOrder { .. } => "bi-order",
            Command::VerifyLink { .. } => "verify-link",
            Command::Survey { .. } => "survey",
        }
    }
}

/// Runs the plan. Errors become reports with the mapped exit code.
pub fn execute(cli: &Cli) -> Report {
    let name = cli.command_name();
    let result = match &cli.command {
        Command::Domain { d } => commands::domain(cli, *d),
        Command::Build(t) => commands::build(cli, t),
        Command::Homology(t) => commands::homology(cli, t),
        Command::PslOrder(i) => commands::psl_order(i),
        Command::BiOrder { ideal, triples } => commands::bi_order(cli, ideal, triples.as_deref()),
        Command::VerifyLink { path } => commands::verify_link(cli, path),
        Command::Survey { d, max_norm } => survey::survey(cli, *d, *max_norm),
    };
    result.unwrap_or_else(|e| Report::error(name, &e))
}

/// Executes and writes the report to `--out` for commands whose `--out`
/// is the report itself; returns the text for stdout.
pub fn run(cli: &Cli) -> (String, i32) {
    let report = execute(cli);
    let rendered = report.render(cli.format);
    let writes_data = matches!(cli.command, Command::Domain { .. } | Command::Build(_));
    if let (Some(path), false) = (&cli.out, writes_data) {
        if let Err(e) = std::fs::write(path, &rendered) {
            let err = CliError::io(path, e);
            return (Report::error(report.command, &err).render(cli.format), err.exit_code());
        }
    }
    (rendered, report.exit_code)
}
