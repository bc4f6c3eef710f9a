use std::time::Instant;

use qxor_core::dilation::{
    corner_block, embed_self_adjoint, extract_from_embedding_commuting_with, extract_from_embedding_tensor_with,
    generic_corner_strategy_with, observable_dilation_commuting, observable_dilation_tensor, off_pattern_mass,
    symmetrize_strategy, HalmosVariant,
};
use qxor_core::game::{game_from_classical_xor, game_from_outcomes, random_game_with, Outcome, OutcomeSpec};
use qxor_core::linalg::{haar_unitary_with, max_abs, rng_for_stream, trace_norm, unitarity_violation, SeededRng};
use qxor_core::optimize::{
    assemble_update_matrix, seesaw, Player, SeesawConfig,
};
use qxor_core::strategy::{
    adjoint_strategy, bias_direct, bias_trace, check_commuting, observable_violation, phase_adjust,
    random_commuting_strategy_with, random_tensor_strategy_with, scale_by_phase,
};
use qxor_core::{CommutingStrategy, Complex64, Game64, Result, Strategy, TensorStrategy64};
use rand::Rng;
use serde_json::{json, Value};

use crate::args::VerifyArgs;
use crate::commands::{status_for, Outcome as CommandOutcome};

/// Random-instance generator shared by all properties of one trial.
pub struct Ctx {
    pub rng: SeededRng,
    pub n: usize,
    pub max_dim: usize,
    pub variant: HalmosVariant,
}

impl Ctx {
    fn dim(&mut self) -> usize {
        self.rng.random_range(1..=self.max_dim)
    }

    fn small_dim(&mut self) -> usize {
        self.rng.random_range(1..=self.max_dim.min(2))
    }

    fn game(&mut self) -> Result<Game64> {
        random_game_with(self.n, &mut self.rng)
    }

    fn tensor(&mut self) -> Result<TensorStrategy64> {
        let (da, db) = (self.dim(), self.dim());
        random_tensor_strategy_with(self.n, da, db, &mut self.rng)
    }

    fn commuting(&mut self) -> Result<CommutingStrategy<f64>> {
        let (da, db) = (self.small_dim(), self.small_dim());
        random_commuting_strategy_with(self.n, da, db, &mut self.rng)
    }

    fn phase(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, self.rng.random_range(0.0..std::f64::consts::TAU))
    }

    fn outcome_spec(&mut self) -> Result<OutcomeSpec<f64>> {
        let dim = self.n * self.n;
        let basis = haar_unitary_with::<f64, _>(dim, &mut self.rng)?;
        let count = self.rng.random_range(1..=dim);
        let weights: Vec<f64> = (0..count).map(|_| self.rng.random_range(0.01..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let outcomes = weights
            .iter()
            .enumerate()
            .map(|(k, w)| Outcome {
                state: basis.column(k).into_owned(),
                probability: w / total,
                differ: self.rng.random(),
            })
            .collect();
        Ok(OutcomeSpec { n: self.n, outcomes })
    }

    fn seesaw_config(&mut self) -> SeesawConfig {
        let d = self.small_dim();
        SeesawConfig {
            da: d,
            db: d,
            restarts: 2,
            max_sweeps: 20,
            tol: 1e-10,
            seed: self.rng.random(),
            threads: Some(1),
        }
    }
}

type Check = fn(&mut Ctx) -> Result<f64>;

/// A randomized invariant: `check` returns a violation magnitude that must
/// not exceed `tol`.
pub struct Property {
    pub name: &'static str,
    pub tol: f64,
    pub check: Check,
}

fn signed_sum(g: &Game64, x: &qxor_core::Correlation64) -> Result<f64> {
    Ok(bias_trace(g, x)?.norm())
}

fn outcome_trace_norm(c: &mut Ctx) -> Result<f64> {
    let g = game_from_outcomes(&c.outcome_spec()?)?;
    Ok((trace_norm(g.matrix())? - 1.0).abs())
}

fn outcome_permutation(c: &mut Ctx) -> Result<f64> {
    let spec = c.outcome_spec()?;
    let mut shuffled = spec.clone();
    let len = shuffled.outcomes.len();
    for i in (1..len).rev() {
        let j = c.rng.random_range(0..=i);
        shuffled.outcomes.swap(i, j);
    }
    let a = game_from_outcomes(&spec)?;
    let b = game_from_outcomes(&shuffled)?;
    Ok(max_abs(&(a.matrix() - b.matrix())))
}

fn classical_diagonal(c: &mut Ctx) -> Result<f64> {
    let n = c.n;
    let r = nalgebra::DMatrix::from_fn(n, n, |_, _| c.rng.random_range(-1.0..1.0));
    let g = game_from_classical_xor(&r, true)?;
    let m = g.matrix();
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    Ok(worst)
}

fn correlation_bound(c: &mut Ctx) -> Result<f64> {
    let x = c.tensor()?.correlation();
    let entry = x.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((entry.max(x.operator_norm()?) - 1.0).max(0.0))
}

fn adjoint_realizes_adjoint(c: &mut Ctx) -> Result<f64> {
    let s = c.tensor()?;
    Ok(adjoint_strategy(&s)?.correlation().distance(&s.correlation().adjoint()))
}

fn phase_scales_correlation(c: &mut Ctx) -> Result<f64> {
    let s = c.tensor()?;
    let lambda = c.phase();
    let x = s.correlation();
    let expected = qxor_core::Correlation64::new(x.n(), x.matrix() * lambda)?;
    Ok(scale_by_phase(&s, lambda)?.correlation().distance(&expected))
}

fn dual_bias(c: &mut Ctx) -> Result<f64> {
    let g = c.game()?;
    let s = c.tensor()?;
    Ok((bias_direct(&g, &s)? - bias_trace(&g, &s.correlation())?).norm())
}

fn commuting_agrees(c: &mut Ctx) -> Result<f64> {
    let s = c.tensor()?;
    let q = CommutingStrategy::from_tensor(&s)?;
    Ok(q.correlation().distance(&s.correlation()))
}

fn bias_bound(c: &mut Ctx) -> Result<f64> {
    let g = c.game()?;
    let a = signed_sum(&g, &c.tensor()?.correlation())?;
    let b = signed_sum(&g, &c.commuting()?.correlation())?;
    Ok((a.max(b) - 1.0).max(0.0))
}

fn observable_outputs(c: &mut Ctx) -> Result<f64> {
    let t = observable_dilation_tensor(&c.tensor()?)?;
    let q = observable_dilation_commuting(&c.commuting()?)?;
    let unitary = [t.alice(), t.bob(), q.alice(), q.bob()]
        .into_iter()
        .map(unitarity_violation)
        .collect::<Result<Vec<_>>>()?;
    Ok(unitary
        .into_iter()
        .chain([observable_violation(&t), observable_violation(&q), check_commuting(&q)])
        .fold(0.0, f64::max))
}

fn observable_correlation(c: &mut Ctx) -> Result<f64> {
    let s = c.tensor()?;
    let q = c.commuting()?;
    let a = observable_dilation_tensor(&s)?.correlation().distance(&s.correlation().hermitian_part());
    let b = observable_dilation_commuting(&q)?.correlation().distance(&q.correlation().hermitian_part());
    // fixed points: the dilation of an observable strategy keeps X
    let h = observable_dilation_tensor(&s)?;
    let fixed = observable_dilation_tensor(&h)?.correlation().distance(&h.correlation());
    Ok(a.max(b).max(fixed))
}

fn symmetrized_bias(c: &mut Ctx) -> Result<f64> {
    let g = c.game()?;
    let s = c.tensor()?;
    let modulus = bias_trace(&g, &s.correlation())?.norm();
    let (adjusted, _) = phase_adjust(&g, &s)?;
    let sym = symmetrize_strategy(&adjusted)?;
    Ok((bias_trace(&g, &sym.correlation())? - Complex64::new(modulus, 0.0)).norm())
}

fn embedding_pattern(c: &mut Ctx) -> Result<f64> {
    let s = c.tensor()?;
    let (_, w) = embed_self_adjoint(&s)?;
    let hermitian = w.embedded.hermitian_violation();
    let corner = corner_block(&w.embedded)?.distance(&s.correlation());
    Ok(w.deviation().max(w.off_pattern_mass()).max(hermitian).max(corner))
}

fn round_trip_tensor(c: &mut Ctx) -> Result<f64> {
    let s = c.tensor()?;
    let (embedded, _) = embed_self_adjoint(&s)?;
    let back = extract_from_embedding_tensor_with(&embedded, c.variant)?;
    let plain = back.correlation().distance(&s.correlation());
    // corner patterns whose corners are not unitary exercise the full dilation
    let (da, db) = (c.small_dim(), c.small_dim());
    let generic = generic_corner_strategy_with::<f64, _>(c.n, da, db, &mut c.rng)?;
    let x = generic.correlation();
    let out = extract_from_embedding_tensor_with(&generic, c.variant)?;
    let generic_err = out.correlation().distance(&corner_block(&x)?).max(off_pattern_mass(&x));
    Ok(plain.max(generic_err))
}

fn round_trip_commuting(c: &mut Ctx) -> Result<f64> {
    let s = c.commuting()?;
    let (embedded, _) = embed_self_adjoint(&s)?;
    let back = extract_from_embedding_commuting_with(&embedded, c.variant)?;
    Ok(back.correlation().distance(&s.correlation()).max(check_commuting(&back)))
}

fn update_matrix(c: &mut Ctx) -> Result<f64> {
    let g = c.game()?;
    let s = c.tensor()?;
    let b = bias_trace(&g, &s.correlation())?;
    let mut worst = 0.0f64;
    for (p, w) in [(Player::Alice, s.alice()), (Player::Bob, s.bob())] {
        let a = assemble_update_matrix(&g, &s, p)?;
        worst = worst.max(((w * a).trace() - b).norm());
    }
    Ok(worst)
}

fn seesaw_monotone(c: &mut Ctx) -> Result<f64> {
    let g = c.game()?;
    let cfg = c.seesaw_config();
    Ok(seesaw(&g, &cfg)?.monotonicity_violation())
}

fn seesaw_sound(c: &mut Ctx) -> Result<f64> {
    let g = c.game()?;
    let cfg = c.seesaw_config();
    let r = seesaw(&g, &cfg)?;
    let recomputed = bias_trace(&g, &r.best_strategy.correlation())?;
    let sound = (recomputed - Complex64::new(r.best_bias, 0.0)).norm();
    Ok(sound.max((r.best_bias - 1.0).max(0.0)))
}

fn seesaw_symmetrization(c: &mut Ctx) -> Result<f64> {
    let g = c.game()?;
    let cfg = c.seesaw_config();
    let r = seesaw(&g, &cfg)?;
    let (adjusted, _) = phase_adjust(&g, &r.best_strategy)?;
    let sym = symmetrize_strategy(&adjusted)?;
    Ok((bias_trace(&g, &sym.correlation())? - Complex64::new(r.best_bias, 0.0)).norm())
}

pub fn registry() -> Vec<Property> {
    macro_rules! prop {
        ($name:expr, $tol:expr, $f:ident) => {
            Property { name: $name, tol: $tol, check: $f }
        };
    }
    vec![
        prop!("game/outcome-trace-norm", 1e-10, outcome_trace_norm),
        prop!("game/outcome-permutation", 1e-12, outcome_permutation),
        prop!("game/classical-diagonal", 0.0, classical_diagonal),
        prop!("strategy/correlation-bound", 1e-9, correlation_bound),
        prop!("strategy/adjoint", 1e-12, adjoint_realizes_adjoint),
        prop!("strategy/phase", 1e-12, phase_scales_correlation),
        prop!("strategy/dual-bias", 1e-10, dual_bias),
        prop!("strategy/commuting-agrees", 1e-12, commuting_agrees),
        prop!("strategy/bias-bound", 1e-9, bias_bound),
        prop!("dilation/observable-outputs", 1e-9, observable_outputs),
        prop!("dilation/observable-correlation", 1e-11, observable_correlation),
        prop!("dilation/symmetrized-bias", 1e-10, symmetrized_bias),
        prop!("dilation/embedding-pattern", 1e-11, embedding_pattern),
        prop!("dilation/round-trip-tensor", 1e-10, round_trip_tensor),
        prop!("dilation/round-trip-commuting", 1e-9, round_trip_commuting),
        prop!("optimize/update-matrix", 1e-12, update_matrix),
        prop!("optimize/monotonicity", 1e-12, seesaw_monotone),
        prop!("optimize/soundness", 1e-10, seesaw_sound),
        prop!("optimize/symmetrization", 1e-10, seesaw_symmetrization),
    ]
}

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub tol: f64,
    pub trials: usize,
    pub worst: f64,
    pub failures: usize,
    pub first_error: Option<String>,
    pub seconds: f64,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "tol": self.tol,
            "trials": self.trials,
            // infinite violations (errors) serialize as null
            "worst_violation": if self.worst.is_finite() { json!(self.worst) } else { Value::Null },
            "failures": self.failures,
            "error": self.first_error,
            "passed": self.passed(),
            "elapsed_seconds": self.seconds,
        })
    }
}

pub fn run_property(p: &Property, index: usize, a: &VerifyArgs, variant: HalmosVariant) -> PropertyResult {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut first_error = None;
    for trial in 0..a.trials {
        let stream = ((index as u64) << 32) | trial as u64;
        let mut ctx = Ctx { rng: rng_for_stream(a.seed, stream), n: a.n, max_dim: a.dims, variant };
        let v = match (p.check)(&mut ctx) {
            Ok(v) if v.is_finite() => v,
            Ok(_) => f64::INFINITY,
            Err(e) => {
                first_error.get_or_insert_with(|| format!("trial {trial}: {e}"));
                f64::INFINITY
            }
        };
        if v > p.tol {
            failures += 1;
        }
        worst = worst.max(v);
    }
    PropertyResult {
        name: p.name,
        tol: p.tol,
        trials: a.trials,
        worst,
        failures,
        first_error,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn verify(a: &VerifyArgs) -> Result<CommandOutcome> {
    if a.n < 1 || a.dims < 1 {
        return Err(qxor_core::Error::InvalidArgument("--n and --dims must be at least 1".into()));
    }
    let variant = if a.mutate_halmos { HalmosVariant::FlippedCorner } else { HalmosVariant::Standard };
    let start = Instant::now();
    let mut summary = Vec::new();
    let mut results = Vec::new();
    let mut all = true;
    for (index, p) in registry().iter().enumerate() {
        if let Some(f) = &a.filter {
            if !p.name.contains(f.as_str()) {
                continue;
            }
        }
        let r = run_property(p, index, a, variant);
        all &= r.passed();
        summary.push(format!(
            "{} {:<34} worst {:>9.2e}  tol {:.0e}  ({} trials, {:.2}s)",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            r.worst,
            r.tol,
            r.trials,
            r.seconds
        ));
        if let Some(e) = &r.first_error {
            summary.push(format!("     {e}"));
        }
        results.push(r.to_json());
    }
    if results.is_empty() {
        return Err(qxor_core::Error::InvalidArgument("--filter matched no property".into()));
    }
    let failed = results.iter().filter(|r| r["passed"] == json!(false)).count();
    summary.push(format!("{} of {} properties passed", results.len() - failed, results.len()));
    Ok(CommandOutcome {
        results: json!({
            "properties": results,
            "all_passed": all,
            "elapsed_seconds": start.elapsed().as_secs_f64(),
        }),
        summary,
        status: status_for(all),
    })
}
