//! Command-line front end: `run` a problem file or `certify` a randomized suite.

pub mod certify;
pub mod run;
pub mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use crate::error::Error;
use crate::tolerance;

pub use certify::{certify, Suite, SuiteSummary};
pub use run::{run_spec, RunOutcome};
pub use spec::ProblemSpec;

/// Residual tolerance that `--tol` is measured against.
pub const REFERENCE_TOL: f64 = tolerance::AXIOM;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitKind {
    Ok,
    Parse,
    Precondition,
    TheoremViolation,
}

impl ExitKind {
    pub fn code(self) -> u8 {
        match self {
            ExitKind::Ok => 0,
            ExitKind::Parse => 2,
            ExitKind::Precondition => 3,
            ExitKind::TheoremViolation => 4,
        }
    }

    pub fn of(e: &Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidParams { .. } | Error::DimensionMismatch { .. } | Error::Io(_) => {
                ExitKind::Parse
            }
            e if e.is_theorem_violation() => ExitKind::TheoremViolation,
            _ => ExitKind::Precondition,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ljb", version, about = "Lie-Jordan algebra reduction, states and GNS certificates")]
pub struct Cli {
    /// Residual tolerance; all tolerances scale by tol / 1e-8.
    #[arg(long, env = "LJB_TOL", global = true)]
    pub tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Execute the tasks of a JSON problem file.
    Run {
        spec: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a randomized certification suite.
    Certify {
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        max_n: Option<usize>,
        /// Also write the JSON summary here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Rounds every float to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) => {
            if num.is_f64() {
                if let Some(x) = num.as_f64() {
                    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
                    if let Some(r) = serde_json::Number::from_f64(rounded) {
                        *num = r;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn render(value: &Value) -> String {
    let mut v = value.clone();
    round_floats(&mut v);
    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
}

fn write_out(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn main_with(cli: Cli) -> ExitCode {
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            eprintln!("error: --tol must be positive, got {tol}");
            return ExitCode::from(ExitKind::Parse.code());
        }
        tolerance::set_scale(tol / REFERENCE_TOL);
    }
    match cli.command {
        Command::Run { spec, out, seed } => {
            let text = match std::fs::read_to_string(&spec) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", spec.display());
                    return ExitCode::from(ExitKind::Parse.code());
                }
            };
            let parsed = match ProblemSpec::parse(&text) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(ExitKind::of(&e).code());
                }
            };
            let outcome = run_spec(&parsed, seed);
            if let Err(e) = write_out(out.as_ref(), &render(&outcome.report)) {
                eprintln!("error: writing report: {e}");
                return ExitCode::from(ExitKind::Parse.code());
            }
            for line in &outcome.summary {
                eprintln!("{line}");
            }
            ExitCode::from(outcome.exit.code())
        }
        Command::Certify {
            suite,
            seed,
            count,
            max_n,
            out,
        } => {
            let summary = certify(suite, seed, count, max_n);
            println!("{}", summary.line());
            for f in &summary.failures {
                println!("  {f}");
            }
            if let Some(path) = out {
                let value = serde_json::to_value(&summary).expect("serializable");
                if let Err(e) = std::fs::write(&path, render(&value)) {
                    eprintln!("error: writing summary: {e}");
                    return ExitCode::from(ExitKind::Parse.code());
                }
            }
            let kind = if summary.all_passed() {
                ExitKind::Ok
            } else {
                ExitKind::TheoremViolation
            };
            ExitCode::from(kind.code())
        }
    }
}
