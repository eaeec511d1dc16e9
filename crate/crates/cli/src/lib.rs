//! Command-line front end. Every command prints one JSON report on stdout (or
//! to `--out`) and signals the outcome through the exit code.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

mod commands;
mod selector;

pub use selector::Selector;

pub const SCHEMA_VERSION: &str = "1";
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "crosscal", version, about = "Cross-product calibration toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Root seed for all sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for convergence and probe tests (command-specific default).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Random samples per sampled check.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Progress notes on stderr.
    #[arg(long, global = true)]
    pub verbose: bool,
    /// Omit the timestamp and hostname so reports compare byte for byte.
    #[arg(long, global = true)]
    pub deterministic: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print forms, multiplication tables and automorphism dimensions.
    Tables(StructureArgs),
    /// Run the invariant suite of a structure.
    Verify(VerifyArgs),
    /// Search the Grassmannian for calibrated planes or branes.
    Find(FindArgs),
    /// Run a check on a knot loaded from JSON.
    Knot(KnotArgs),
}

#[derive(Debug, Args)]
pub struct StructureArgs {
    /// complex:m, volume:n, g2, spin7, cy:n or hk:m.
    #[arg(long)]
    pub structure: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub structure: String,
    /// Phase for the rotated holomorphic-volume checks.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveArg {
    Instanton,
    Brane,
}

#[derive(Debug, Args)]
pub struct FindArgs {
    #[arg(long)]
    pub structure: String,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Instanton)]
    pub objective: ObjectiveArg,
    /// Plane dimension (defaults to r+1 for instantons, (n+r−1)/2 for branes).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnotCheck {
    Compatibility,
    JSquared,
    Omega,
    Isotropy,
    Quotient,
    Submersion,
}

#[derive(Debug, Args)]
pub struct KnotArgs {
    #[arg(long)]
    pub structure: String,
    /// Knot JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub check: KnotCheck,
    /// Normal-field JSON file; repeat for checks that take two fields.
    #[arg(long)]
    pub field: Vec<PathBuf>,
}

/// One named check in a report.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

impl Check {
    /// Passes when `value <= threshold`.
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: Some(threshold),
            pass: value <= threshold,
            detail: Value::Null,
        }
    }

    pub fn flag(name: &str, value: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: None,
            pass,
            detail: Value::Null,
        }
    }

    pub fn with_detail<T: Serialize>(mut self, detail: T) -> Self {
        self.detail = serde_json::to_value(detail).unwrap_or(Value::Null);
        self
    }
}

/// Errors that map to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl From<crosscal::Error> for InputError {
    fn from(e: crosscal::Error) -> Self {
        InputError(e.to_string())
    }
}

/// Body of a report before the common envelope is added.
pub struct Outcome {
    pub checks: Vec<Check>,
    pub data: Value,
}

fn thread_count() -> Result<Option<usize>, InputError> {
    match std::env::var("CROSSCAL_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(InputError(format!(
                "CROSSCAL_THREADS must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn hostname() -> String {
    std::fs::read_to_string("/etc/hostname")
        .ok()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .or_else(|| std::env::var("HOSTNAME").ok())
        .unwrap_or_else(|| "unknown".into())
}

fn envelope(cli: &Cli, outcome: Outcome) -> Value {
    let (command, structure) = match &cli.command {
        Command::Tables(a) => ("tables", &a.structure),
        Command::Verify(a) => ("verify", &a.structure),
        Command::Find(a) => ("find", &a.structure),
        Command::Knot(a) => ("knot", &a.structure),
    };
    let pass = outcome.checks.iter().all(|c| c.pass);
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "structure": structure,
        "seed": cli.common.seed,
        "samples": cli.common.samples,
        "tol": cli.common.tol,
        "checks": outcome.checks,
        "pass": pass,
        "data": outcome.data,
    });
    if !cli.common.deterministic {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        report["timestamp"] = json!(now);
        report["hostname"] = json!(hostname());
    }
    report
}

fn execute(cli: &Cli) -> Result<Outcome, InputError> {
    match &cli.command {
        Command::Tables(a) => commands::tables(&cli.common, a),
        Command::Verify(a) => commands::verify(&cli.common, a),
        Command::Find(a) => commands::find(&cli.common, a),
        Command::Knot(a) => commands::knot(&cli.common, a),
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn run_cli(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    if let Some(tol) = cli.common.tol {
        if !(tol.is_finite() && tol > 0.0) {
            let _ = writeln!(stderr, "error: --tol must be positive");
            return EXIT_INPUT;
        }
    }
    let outcome = match thread_count() {
        Err(e) => Err(e),
        Ok(threads) => {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads {
                builder = builder.num_threads(n);
            }
            match builder.build() {
                Ok(pool) => pool.install(|| execute(cli)),
                Err(e) => Err(InputError(format!("thread pool: {e}"))),
            }
        }
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(InputError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    if cli.common.verbose {
        for c in &outcome.checks {
            let _ = writeln!(
                stderr,
                "{:<32} {:>12.3e} {}",
                c.name,
                c.value,
                if c.pass { "ok" } else { "FAILED" }
            );
        }
    }
    let report = envelope(cli, outcome);
    let pass = report["pass"].as_bool().unwrap_or(false);
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_INPUT;
    }
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_cli(&cli, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            code
        }
    }
}
