mod config;
mod eval;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use config::{ConfigArgs, RunConfig};
use eval::{EvalError, Target};
use report::Report;

const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;

/// Exact q-calculus and base-prism verification suites.
///
/// Every flag may also be given as an environment variable: QPRISM_PRIME,
/// QPRISM_PRECISION, QPRISM_ORDER, QPRISM_LEVEL, QPRISM_BIVAR_Q,
/// QPRISM_BIVAR_X, QPRISM_SEED, QPRISM_SUITE (comma separated) and
/// QPRISM_OUT. A flag on the command line takes precedence.
#[derive(Parser, Debug)]
#[command(name = "qprism", version)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the selected suites and write a JSON report.
    Verify,
    /// Evaluate one quantity, e.g. `eval qint n=5`.
    Eval {
        #[arg(value_enum)]
        what: Target,
        /// Parameters as key=value.
        params: Vec<String>,
    },
    /// Re-verify a certificate file (one certificate or an array of them).
    Recheck { file: PathBuf },
}

fn emit(value: &Value, cfg: &RunConfig) -> Result<(), u8> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            eprintln!("qprism: cannot write {}: {e}", path.display());
            USAGE
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn recheck(file: &PathBuf, cfg: &RunConfig) -> u8 {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("qprism: cannot read {}: {e}", file.display());
            return USAGE;
        }
    };
    let verdicts: Vec<_> = match serde_json::from_str::<Value>(&text) {
        Ok(Value::Array(items)) => items.iter().map(qprism::cert::recheck::recheck_value).collect(),
        Ok(v) => vec![qprism::cert::recheck::recheck_value(&v)],
        Err(_) => vec![qprism::cert::recheck::recheck_json(&text)],
    };
    let pass = !verdicts.is_empty() && verdicts.iter().all(|v| v.pass);
    if let Err(code) = emit(&json!({ "pass": pass, "verdicts": verdicts }), cfg) {
        return code;
    }
    if pass {
        PASS
    } else {
        FAIL
    }
}

fn run(cli: Cli) -> u8 {
    let cfg = match RunConfig::from_args(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qprism: {e}");
            return USAGE;
        }
    };
    match cli.command {
        Command::Verify => {
            let report = Report::new(cfg.clone(), suites::run(&cfg));
            let value = serde_json::to_value(&report).expect("serializable");
            if let Err(code) = emit(&value, &cfg) {
                return code;
            }
            if report.passed() {
                PASS
            } else {
                FAIL
            }
        }
        Command::Eval { what, params } => {
            let result = eval::parse_params(what, &params).and_then(|ps| eval::eval(what, &ps, &cfg));
            match result {
                Ok(v) => emit(&v, &cfg).err().unwrap_or(PASS),
                Err(EvalError::Usage(e)) => {
                    eprintln!("qprism eval: {e}");
                    USAGE
                }
                Err(EvalError::Compute(e)) => {
                    eprintln!("qprism eval: {e}");
                    FAIL
                }
            }
        }
        Command::Recheck { file } => recheck(&file, &cfg),
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
