use std::path::Path;

use qxor_core::dilation::{
    corner_block, embed_self_adjoint, embedding_deviation, extract_from_embedding_commuting,
    extract_from_embedding_tensor, observable_dilation_commuting, observable_dilation_tensor, off_pattern_mass,
    symmetrize_strategy,
};
use qxor_core::io::{read_game, read_strategy, write_text, AnyStrategy};
use qxor_core::linalg::hermitian_violation;
use qxor_core::optimize::{dimension_ladder, seesaw, SeesawConfig, SeesawResult};
use qxor_core::strategy::{
    adjoint_strategy, bias_direct, bias_direct_commuting, bias_trace, check_commuting, observable_violation,
    success_probability,
};
use qxor_core::{Complex64, Correlation64, Error, Game64, Result, Strategy};
use serde_json::{json, Value};

use crate::args::{BiasArgs, DilateArgs, DilationKind, OptimizeArgs, ValidateArgs};
use crate::report::{EXIT_OK, EXIT_VALIDATION};
use crate::trace::{per_dimension_path, write_trace};

pub const THREADS_ENV: &str = "QXOR_THREADS";

/// Result of a command that ran to completion. `status` can still be a
/// failure, e.g. when a property suite finds violations.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub results: Value,
    pub summary: Vec<String>,
    pub status: i32,
}

impl Outcome {
    fn ok(results: Value, summary: Vec<String>) -> Self {
        Outcome { results, summary, status: EXIT_OK }
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn format_complex(z: Complex64) -> String {
    format!("{:.15} {} {:.15}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
}

pub fn validate(a: &ValidateArgs) -> Result<Outcome> {
    let g: Game64 = read_game(&a.game)?;
    let norm = g.trace_norm()?;
    let herm = hermitian_violation(g.matrix())?;
    Ok(Outcome::ok(
        json!({
            "n": g.n(),
            "strict": g.strict(),
            "trace_norm": norm,
            "hermitian_violation": herm,
        }),
        vec![
            format!("valid quantum XOR game of size n = {}", g.n()),
            format!("trace norm: {norm}"),
            format!("strict: {}", g.strict()),
        ],
    ))
}

pub fn bias(a: &BiasArgs) -> Result<Outcome> {
    let g: Game64 = read_game(&a.game)?;
    let s: AnyStrategy<f64> = read_strategy(&a.strategy)?;
    let traced = bias_trace(&g, &s.correlation())?;
    let direct = match &s {
        AnyStrategy::Tensor(t) => bias_direct(&g, t)?,
        AnyStrategy::Commuting(c) => bias_direct_commuting(&g, c)?,
    };
    let difference = (traced - direct).norm();
    let p = success_probability(traced.re)?;
    Ok(Outcome::ok(
        json!({
            "model": s.model().name(),
            "n": s.n(),
            "bias_trace": complex_json(traced),
            "bias_direct": complex_json(direct),
            "difference": difference,
            "bias_modulus": traced.norm(),
            "success_probability": p,
        }),
        vec![
            format!("bias (trace):  {}", format_complex(traced)),
            format!("bias (direct): {}", format_complex(direct)),
            format!("difference:    {difference:e}"),
            format!("success probability: {p:.15}"),
        ],
    ))
}

/// Thread cap from `--threads` and `QXOR_THREADS`, whichever is smaller.
pub fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    let env = match std::env::var(THREADS_ENV) {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Some(v),
            _ => {
                return Err(Error::Parse(format!(
                    "{THREADS_ENV} must be a positive integer, got {raw:?}"
                )))
            }
        },
        Err(_) => None,
    };
    if flag == Some(0) {
        return Err(Error::InvalidArgument("--threads must be at least 1".into()));
    }
    Ok(match (flag, env) {
        (Some(f), Some(e)) => Some(f.min(e)),
        (f, e) => f.or(e),
    })
}

pub fn seesaw_config(a: &OptimizeArgs, threads: Option<usize>) -> SeesawConfig {
    SeesawConfig {
        da: a.dim_a.unwrap_or(a.dim),
        db: a.dim_b.unwrap_or(a.dim),
        restarts: a.restarts,
        max_sweeps: a.sweeps,
        tol: a.tol,
        seed: a.seed,
        threads,
    }
}

fn seesaw_summary(game: &Game64, r: &SeesawResult<f64>) -> Result<Value> {
    let recomputed = bias_trace(game, &r.best_strategy.correlation())?;
    Ok(json!({
        "best_bias": r.best_bias,
        "success_probability": success_probability(r.best_bias)?,
        "best_restart": r.best_restart,
        "recomputed_bias": complex_json(recomputed),
        "restarts": r.traces.len(),
        "converged_restarts": r.traces.iter().filter(|t| t.converged).count(),
        "total_sweeps": r.traces.iter().map(|t| t.sweeps).sum::<usize>(),
        "monotonicity_violation": r.monotonicity_violation(),
        "elapsed_seconds": r.elapsed.as_secs_f64(),
    }))
}

fn write_outputs(r: &SeesawResult<f64>, trace: Option<&Path>, strategy: Option<&Path>) -> Result<()> {
    if let Some(path) = trace {
        write_trace(path, r)?;
    }
    if let Some(path) = strategy {
        write_text(path, &AnyStrategy::Tensor(r.best_strategy.clone()).to_json())?;
    }
    Ok(())
}

pub fn optimize(a: &OptimizeArgs) -> Result<Outcome> {
    let g: Game64 = read_game(&a.game)?;
    let cfg = seesaw_config(a, resolve_threads(a.threads)?);
    match &a.dims {
        None => {
            let r = seesaw(&g, &cfg)?;
            write_outputs(&r, a.trace.as_deref(), a.strategy_out.as_deref())?;
            let results = seesaw_summary(&g, &r)?;
            let summary = vec![
                format!(
                    "best bias: {:.12} (restart {} of {}, dA = {}, dB = {})",
                    r.best_bias,
                    r.best_restart,
                    cfg.restarts,
                    cfg.da,
                    cfg.db
                ),
                format!("success probability: {:.12}", success_probability(r.best_bias)?),
            ];
            Ok(Outcome::ok(results, summary))
        }
        Some(dims) => {
            let ladder = dimension_ladder(&g, dims, &cfg)?;
            let mut rows = Vec::new();
            let mut summary = vec![format!("{:>4}  {:>16}  {:>16}", "d", "best bias", "p")];
            for row in &ladder.rows {
                let trace = a.trace.as_deref().map(|p| per_dimension_path(p, row.d));
                let strategy = a.strategy_out.as_deref().map(|p| per_dimension_path(p, row.d));
                write_outputs(&row.result, trace.as_deref(), strategy.as_deref())?;
                let mut entry = seesaw_summary(&g, &row.result)?;
                entry["d"] = json!(row.d);
                rows.push(entry);
                summary.push(format!(
                    "{:>4}  {:>16.12}  {:>16.12}",
                    row.d,
                    row.best_bias,
                    success_probability(row.best_bias)?
                ));
            }
            for w in &ladder.warnings {
                summary.push(format!("warning: {w}"));
            }
            Ok(Outcome::ok(json!({ "ladder": rows, "warnings": ladder.warnings }), summary))
        }
    }
}

fn same_size_distance(before: &Correlation64, after: &Correlation64) -> Value {
    if before.n() == after.n() {
        json!(before.distance(after))
    } else {
        Value::Null
    }
}

fn dims_json(s: &AnyStrategy<f64>) -> Value {
    match s {
        AnyStrategy::Tensor(t) => json!({"n": t.n(), "dA": t.da(), "dB": t.db()}),
        AnyStrategy::Commuting(c) => json!({"n": c.n(), "d": c.d()}),
    }
}

pub fn dilate(a: &DilateArgs) -> Result<Outcome> {
    let input: AnyStrategy<f64> = read_strategy(&a.strategy)?;
    let x = input.correlation();
    let mut checks = serde_json::Map::new();
    let (output, target_name, target): (AnyStrategy<f64>, &str, Option<Correlation64>) = match a.kind {
        DilationKind::Observable => {
            let out: AnyStrategy<f64> = match &input {
                AnyStrategy::Tensor(t) => observable_dilation_tensor(t)?.into(),
                AnyStrategy::Commuting(c) => observable_dilation_commuting(c)?.into(),
            };
            (out, "(X + X*)/2", Some(x.hermitian_part()))
        }
        DilationKind::Adjoint => {
            let out: AnyStrategy<f64> = match &input {
                AnyStrategy::Tensor(t) => adjoint_strategy(t)?.into(),
                AnyStrategy::Commuting(c) => adjoint_strategy(c)?.into(),
            };
            (out, "X*", Some(x.adjoint()))
        }
        DilationKind::Symmetrize => {
            let out: AnyStrategy<f64> = match &input {
                AnyStrategy::Tensor(t) => symmetrize_strategy(t)?.into(),
                AnyStrategy::Commuting(c) => symmetrize_strategy(c)?.into(),
            };
            (out, "(X + X*)/2", Some(x.hermitian_part()))
        }
        DilationKind::Embed => {
            let (out, witness): (AnyStrategy<f64>, _) = match &input {
                AnyStrategy::Tensor(t) => {
                    let (s, w) = embed_self_adjoint(t)?;
                    (s.into(), w)
                }
                AnyStrategy::Commuting(c) => {
                    let (s, w) = embed_self_adjoint(c)?;
                    (s.into(), w)
                }
            };
            checks.insert("pattern_deviation".into(), json!(witness.deviation()));
            checks.insert("off_pattern_mass".into(), json!(witness.off_pattern_mass()));
            checks.insert(
                "corner_distance".into(),
                json!(corner_block(&witness.embedded)?.distance(&x)),
            );
            (out, "corner pattern of X", None)
        }
        DilationKind::Extract => {
            checks.insert("input_pattern_deviation".into(), json!(embedding_deviation(&x)?));
            checks.insert("input_off_pattern_mass".into(), json!(off_pattern_mass(&x)));
            let corner = corner_block(&x)?;
            let out: AnyStrategy<f64> = match &input {
                AnyStrategy::Tensor(t) => extract_from_embedding_tensor(t)?.into(),
                AnyStrategy::Commuting(c) => extract_from_embedding_commuting(c)?.into(),
            };
            (out, "corner block of W", Some(corner))
        }
    };
    let y = output.correlation();
    let observable = match &output {
        AnyStrategy::Tensor(t) => observable_violation(t),
        AnyStrategy::Commuting(c) => {
            checks.insert("commutation_violation".into(), json!(check_commuting(c)));
            observable_violation(c)
        }
    };
    checks.insert("observable_violation".into(), json!(observable));
    let target_distance = target.as_ref().map(|t| y.distance(t));
    write_text(&a.out, &output.to_json())?;

    let mut summary = vec![format!(
        "{} dilation: {} strategy, size {} -> {}",
        a.kind.name(),
        input.model().name(),
        input.n(),
        output.n()
    )];
    if let Some(d) = same_size_distance(&x, &y).as_f64() {
        summary.push(format!("correlation distance before/after: {d:e}"));
    }
    if let Some(d) = target_distance {
        summary.push(format!("distance to {target_name}: {d:e}"));
    }
    for (k, v) in &checks {
        summary.push(format!("{k}: {v}"));
    }
    summary.push(format!("wrote {}", a.out.display()));
    Ok(Outcome::ok(
        json!({
            "kind": a.kind.name(),
            "model": input.model().name(),
            "input": dims_json(&input),
            "output": dims_json(&output),
            "distance_before_after": same_size_distance(&x, &y),
            "target": target_name,
            "target_distance": target_distance,
            "checks": checks,
        }),
        summary,
    ))
}

pub fn status_for(passed: bool) -> i32 {
    if passed {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}
