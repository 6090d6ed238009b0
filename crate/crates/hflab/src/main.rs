//! Scenario-driven command-line front end for the graded-Hopf verification
//! engine: parse a scenario, orchestrate builders and verifiers, emit a
//! machine-readable report and a human-readable summary.

mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use hopfgamma::error::Error;
use hopfgamma::qls::build_fiber;

use scenario::{run_scenario, Outcome, Scenario};

#[derive(Parser)]
#[command(
    name = "hflab",
    version,
    about = "Exact verifier for graded Hopf systems built from root-of-unity braiding data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check declared in the scenario, in order.
    Run {
        scenario: PathBuf,
        /// Write the JSON report here (overrides the scenario's output path).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for independent checks.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Validate the braiding datum only.
    Validate { scenario: PathBuf },
    /// Print the fiber algebra at a character as JSON.
    Fiber {
        scenario: PathBuf,
        /// Character as JSON, e.g. '{"t":["2"],"s":["0"]}'. Defaults to the
        /// identity character.
        #[arg(long = "char")]
        character: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the graded-system verifier suite on the scenario's support.
    Verify {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the Cayley-ball growth analysis and verdicts.
    Growth {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the verifier suite on the cocycle-twisted system.
    Twist {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                Error::ParseError(_) => Outcome::SchemaError,
                e if e.is_internal() => Outcome::InternalError,
                _ => Outcome::CheckFailed,
            };
            ExitCode::from(code.exit_code() as u8)
        }
    }
}

fn load_scenario(path: &PathBuf) -> Result<Scenario, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ParseError(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::ParseError(format!("malformed JSON in {}: {e}", path.display())))?;
    Scenario::from_json(&value)
}

fn emit(
    scenario: &Scenario,
    out_flag: Option<PathBuf>,
    result: scenario::RunResult,
) -> Result<Outcome, Error> {
    for line in &result.summary {
        println!("{line}");
    }
    let out_path = out_flag.or_else(|| scenario.output.clone().map(PathBuf::from));
    if let Some(path) = out_path {
        let text = serde_json::to_string_pretty(&result.report)
            .map_err(|e| Error::ParseError(e.to_string()))?;
        std::fs::write(&path, text + "\n")
            .map_err(|e| Error::ParseError(format!("cannot write {}: {e}", path.display())))?;
        println!("report written to {}", path.display());
    }
    Ok(result.outcome)
}

fn dispatch(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Run {
            scenario: path,
            out,
            jobs,
        } => {
            let sc = load_scenario(&path)?;
            let result = run_scenario(&sc, None, jobs.max(1))?;
            emit(&sc, out, result)
        }
        Command::Validate { scenario: path } => {
            let sc = load_scenario(&path)?;
            let result = run_scenario(&sc, Some(&["validate"]), 1)?;
            emit(&sc, None, result)
        }
        Command::Fiber {
            scenario: path,
            character,
            out,
        } => {
            let sc = load_scenario(&path)?;
            sc.datum.ensure_valid()?;
            let kappa = match character {
                None => sc.datum.char_identity(),
                Some(text) => {
                    let v: Value = serde_json::from_str(&text)
                        .map_err(|e| Error::ParseError(format!("bad character JSON: {e}")))?;
                    sc.datum.character_from_json(&v)?
                }
            };
            let fiber = build_fiber(&sc.datum, &kappa)?;
            let json = fiber.hopf.to_json();
            let text = serde_json::to_string_pretty(&json)
                .map_err(|e| Error::ParseError(e.to_string()))?;
            match out {
                Some(path) => std::fs::write(&path, text + "\n")
                    .map_err(|e| Error::ParseError(format!("cannot write: {e}")))?,
                None => println!("{text}"),
            }
            Ok(Outcome::AllPassed)
        }
        Command::Verify {
            scenario: path,
            out,
            jobs,
        } => {
            let sc = load_scenario(&path)?;
            let verify_set = [
                "validate",
                "uniformity",
                "strong_grading",
                "exact_sequence",
                "coradical",
                "cosemisimple",
                "normality",
                "coherence",
                "cocentral",
                "materialize",
            ];
            let result = run_scenario(&sc, Some(&verify_set), jobs.max(1))?;
            emit(&sc, out, result)
        }
        Command::Growth {
            scenario: path,
            out,
        } => {
            let mut sc = load_scenario(&path)?;
            if !sc.checks.iter().any(|c| c == "growth") {
                sc.checks.push("growth".into());
            }
            let result = run_scenario(&sc, Some(&["validate", "growth"]), 1)?;
            emit(&sc, out, result)
        }
        Command::Twist {
            scenario: path,
            out,
        } => {
            let mut sc = load_scenario(&path)?;
            if !sc.checks.iter().any(|c| c == "twist") {
                sc.checks.push("twist".into());
            }
            let result = run_scenario(&sc, Some(&["validate", "twist"]), 1)?;
            emit(&sc, out, result)
        }
    }
}
