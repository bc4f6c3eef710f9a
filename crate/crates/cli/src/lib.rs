//! Library side of the `qxor` binary: argument types, subcommands and the
//! run report, exposed so tests can drive commands without a subprocess.

pub mod args;
pub mod commands;
pub mod report;
pub mod trace;
pub mod verify;

use std::path::Path;

use qxor_core::ErrorKind;
use serde_json::{json, Value};

use args::{Cli, Command};
use commands::Outcome;
use report::{inputs_digest, RunReport, EXIT_INPUT, EXIT_NUMERICAL, EXIT_VALIDATION};

/// Report plus the human summary for stdout and the error line for stderr.
pub struct Run {
    pub report: RunReport,
    pub summary: Vec<String>,
    pub error: Option<String>,
}

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Validation => EXIT_VALIDATION,
        ErrorKind::Input => EXIT_INPUT,
        ErrorKind::Numerical => EXIT_NUMERICAL,
    }
}

fn kind_name(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Validation => "validation",
        ErrorKind::Input => "input",
        ErrorKind::Numerical => "numerical",
    }
}

fn path_json(p: &Path) -> Value {
    json!(p.display().to_string())
}

fn opt_path_json(p: Option<&Path>) -> Value {
    p.map(path_json).unwrap_or(Value::Null)
}

/// Command name, input files and the configuration echo with defaults
/// resolved.
fn describe(cmd: &Command) -> (&'static str, Vec<&Path>, Value) {
    match cmd {
        Command::Validate(a) => ("validate", vec![a.game.as_path()], json!({"game": path_json(&a.game)})),
        Command::Bias(a) => (
            "bias",
            vec![a.game.as_path(), a.strategy.as_path()],
            json!({"game": path_json(&a.game), "strategy": path_json(&a.strategy)}),
        ),
        Command::Optimize(a) => {
            let threads = commands::resolve_threads(a.threads).ok().flatten();
            let cfg = commands::seesaw_config(a, threads);
            (
                "optimize",
                vec![a.game.as_path()],
                json!({
                    "game": path_json(&a.game),
                    "dimA": cfg.da,
                    "dimB": cfg.db,
                    "dims": a.dims,
                    "restarts": cfg.restarts,
                    "sweeps": cfg.max_sweeps,
                    "tol": cfg.tol,
                    "seed": cfg.seed,
                    "threads": cfg.threads,
                    "trace": opt_path_json(a.trace.as_deref()),
                    "strategy_out": opt_path_json(a.strategy_out.as_deref()),
                }),
            )
        }
        Command::Dilate(a) => (
            "dilate",
            vec![a.strategy.as_path()],
            json!({"strategy": path_json(&a.strategy), "kind": a.kind.name(), "out": path_json(&a.out)}),
        ),
        Command::Verify(a) => (
            "verify",
            vec![],
            json!({
                "n": a.n,
                "dims": a.dims,
                "trials": a.trials,
                "seed": a.seed,
                "filter": a.filter,
                "mutate_halmos": a.mutate_halmos,
            }),
        ),
    }
}

/// Executes the parsed command. Never panics on bad input; failures end up
/// in the report's `results.error` with the matching exit status.
pub fn run(cli: &Cli) -> Run {
    let (name, inputs, config) = describe(&cli.command);
    let digest = inputs_digest(&inputs);
    let outcome = match &cli.command {
        Command::Validate(a) => commands::validate(a),
        Command::Bias(a) => commands::bias(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Dilate(a) => commands::dilate(a),
        Command::Verify(a) => verify::verify(a),
    };
    let (results, summary, status, error) = match outcome {
        Ok(Outcome { results, summary, status }) => (results, summary, status, None),
        Err(e) => {
            let kind = e.kind();
            (
                json!({"error": e.to_string(), "error_kind": kind_name(kind)}),
                Vec::new(),
                exit_code(kind),
                Some(e.to_string()),
            )
        }
    };
    let mut run = Run {
        report: RunReport {
            command: name.to_string(),
            inputs_digest: digest,
            config,
            results,
            exit_status: status,
        },
        summary,
        error,
    };
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, run.report.to_json()) {
            run.error = Some(format!("cannot write report {}: {e}", path.display()));
            run.report.exit_status = EXIT_INPUT;
        }
    }
    run
}
