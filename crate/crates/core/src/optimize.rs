//! See-saw maximization of `Re Tr(M X)` over finite-dimensional tensor
//! strategies.
//!
//! The bias is linear in each of `U`, `V` and (as a quadratic form) in `ψ`,
//! so every partial maximization has a closed form: a polar factor for the
//! unitaries and a top eigenvector for the state. Each sweep starts with a
//! phase adjustment, so the real part that is maximized equals `|bias|`.

use std::time::{Duration, Instant};

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::QuantumXorGame;
use crate::linalg::{block, polar_factor, rng_for_stream, top_eigenvector, CMatrix};
use crate::scalar::Real;
use crate::strategy::{bias, phase_adjust, random_tensor_strategy_with, Strategy, TensorStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Alice,
    Bob,
}

/// Coefficient `M_{(j,l),(i,k)}` multiplying `X_{(i,j),(k,l)}` in `Tr(M X)`.
fn coefficient<T: Real>(game: &QuantumXorGame<T>, i: usize, j: usize, k: usize, l: usize) -> Complex<T> {
    let n = game.n();
    game.matrix()[(j * n + l, i * n + k)]
}

/// Matrix `A` shaped like the `free` player's big unitary such that, with the
/// other player and the state held fixed, `Tr(M X) = Tr(W A)` for every
/// choice `W` of that unitary.
///
/// For Alice, block `(j, i)` of `A` is `Σ_{k,l} M_{(j,l),(i,k)} Ψ V_kl^T Ψ*`,
/// where `Ψ` is the state reshaped to `dA x dB`; Bob's is analogous with
/// `Ψ^T U_ij^T Ψ̄`.
pub fn assemble_update_matrix<T: Real>(
    game: &QuantumXorGame<T>,
    s: &TensorStrategy<T>,
    free: Player,
) -> Result<CMatrix<T>> {
    let n = s.n();
    if game.n() != n {
        return Err(Error::Shape(format!("game has size {} but strategy has size {n}", game.n())));
    }
    let psi = s.state_matrix();
    let (fixed, bs, other_bs) = match free {
        Player::Alice => (s.bob(), s.da(), s.db()),
        Player::Bob => (s.alice(), s.db(), s.da()),
    };
    // reduced blocks of the fixed player, indexed like its own blocks
    let mut reduced = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            let b = block(fixed, p, q, other_bs).transpose();
            reduced.push(match free {
                Player::Alice => &psi * b * psi.adjoint(),
                Player::Bob => psi.transpose() * b * psi.conjugate(),
            });
        }
    }
    let mut a = CMatrix::zeros(n * bs, n * bs);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let m = coefficient(game, i, j, k, l);
                    if m == Complex::new(T::zero(), T::zero()) {
                        continue;
                    }
                    match free {
                        // contributes to block (j, i)
                        Player::Alice => {
                            let mut view = a.view_mut((j * bs, i * bs), (bs, bs));
                            view += &reduced[k * n + l] * m;
                        }
                        // contributes to block (l, k)
                        Player::Bob => {
                            let mut view = a.view_mut((l * bs, k * bs), (bs, bs));
                            view += &reduced[i * n + j] * m;
                        }
                    }
                }
            }
        }
    }
    Ok(a)
}

/// Replaces one player's unitary by the maximizer of `Re Tr(M X)` with
/// everything else fixed.
pub fn update_player<T: Real>(
    game: &QuantumXorGame<T>,
    s: &TensorStrategy<T>,
    free: Player,
) -> Result<TensorStrategy<T>> {
    let a = assemble_update_matrix(game, s, free)?;
    let w = polar_factor(&a)?;
    match free {
        Player::Alice => s.with_unitaries(s.n(), w, s.bob().clone()),
        Player::Bob => s.with_unitaries(s.n(), s.alice().clone(), w),
    }
}

/// `K = Σ M_{(j,l),(i,k)} U_ij ⊗ V_kl`, so that the bias is `⟨K ψ, ψ⟩`.
pub fn state_operator<T: Real>(game: &QuantumXorGame<T>, s: &TensorStrategy<T>) -> Result<CMatrix<T>> {
    let (n, da, db) = (s.n(), s.da(), s.db());
    if game.n() != n {
        return Err(Error::Shape(format!("game has size {} but strategy has size {n}", game.n())));
    }
    let mut k_op = CMatrix::zeros(da * db, da * db);
    for i in 0..n {
        for j in 0..n {
            let uij = block(s.alice(), i, j, da);
            for k in 0..n {
                for l in 0..n {
                    let m = coefficient(game, i, j, k, l);
                    if m == Complex::new(T::zero(), T::zero()) {
                        continue;
                    }
                    k_op += uij.kronecker(&block(s.bob(), k, l, db)) * m;
                }
            }
        }
    }
    Ok(k_op)
}

/// Replaces the state by a top eigenvector of the Hermitian part of
/// [`state_operator`]. Ties go to the first vector the eigensolver reports.
pub fn update_state<T: Real>(game: &QuantumXorGame<T>, s: &TensorStrategy<T>) -> Result<TensorStrategy<T>> {
    let k_op = state_operator(game, s)?;
    let herm = (&k_op + k_op.adjoint()) * Complex::new(T::lit(0.5), T::zero());
    let (_, psi) = top_eigenvector(&herm)?;
    s.with_state(psi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeesawConfig {
    pub da: usize,
    pub db: usize,
    pub restarts: usize,
    pub max_sweeps: usize,
    /// A restart stops once one sweep improves the bias by less than this.
    pub tol: f64,
    pub seed: u64,
    /// Worker threads for restarts; `None` uses the global pool.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig {
            da: 2,
            db: 2,
            restarts: 50,
            max_sweeps: 500,
            tol: 1e-10,
            seed: 0,
            threads: None,
        }
    }
}

impl SeesawConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("dA", self.da),
            ("dB", self.db),
            ("restarts", self.restarts),
            ("max_sweeps", self.max_sweeps),
        ];
        for (name, v) in counts {
            if v < 1 {
                return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
            }
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    /// Random starting point after phase adjustment (sweep 0).
    Init,
    Alice,
    Bob,
    State,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Init => "init",
            Stage::Alice => "alice",
            Stage::Bob => "bob",
            Stage::State => "state",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord<T: Real> {
    pub restart: usize,
    pub sweep: usize,
    pub stage: Stage,
    pub bias: Complex<T>,
}

#[derive(Debug, Clone)]
pub struct RestartTrace<T: Real> {
    pub restart: usize,
    pub records: Vec<TraceRecord<T>>,
    pub sweeps: usize,
    pub converged: bool,
    /// `|bias|` of the final strategy, which phase adjustment makes real.
    pub final_bias: T,
    pub elapsed: Duration,
}

impl<T: Real> RestartTrace<T> {
    /// Largest drop of `Re(bias)` between consecutive records.
    pub fn monotonicity_violation(&self) -> T {
        self.records
            .windows(2)
            .map(|w| w[0].bias.re - w[1].bias.re)
            .fold(T::zero(), |m, d| m.max(d))
    }
}

#[derive(Debug, Clone)]
pub struct SeesawResult<T: Real> {
    pub best_bias: T,
    pub best_restart: usize,
    /// Phase-adjusted, so its bias is real and equal to `best_bias`.
    pub best_strategy: TensorStrategy<T>,
    pub traces: Vec<RestartTrace<T>>,
    pub elapsed: Duration,
}

impl<T: Real> SeesawResult<T> {
    pub fn monotonicity_violation(&self) -> T {
        self.traces
            .iter()
            .map(RestartTrace::monotonicity_violation)
            .fold(T::zero(), |m, d| m.max(d))
    }
}

fn run_restart<T: Real>(
    game: &QuantumXorGame<T>,
    config: &SeesawConfig,
    restart: usize,
) -> Result<(TensorStrategy<T>, RestartTrace<T>)> {
    let start = Instant::now();
    let mut rng = rng_for_stream(config.seed, restart as u64);
    let init = random_tensor_strategy_with::<T, _>(game.n(), config.da, config.db, &mut rng)?;
    let (mut s, _) = phase_adjust(game, &init)?;
    let mut records = vec![TraceRecord { restart, sweep: 0, stage: Stage::Init, bias: bias(game, &s)? }];
    let tol = T::lit(config.tol);
    let mut previous = records[0].bias.re;
    let mut converged = false;
    let mut sweeps = 0;
    for sweep in 1..=config.max_sweeps {
        sweeps = sweep;
        s = phase_adjust(game, &s)?.0;
        for stage in [Stage::Alice, Stage::Bob, Stage::State] {
            s = match stage {
                Stage::Alice => update_player(game, &s, Player::Alice)?,
                Stage::Bob => update_player(game, &s, Player::Bob)?,
                _ => update_state(game, &s)?,
            };
            records.push(TraceRecord { restart, sweep, stage, bias: bias(game, &s)? });
        }
        let current = records.last().expect("sweep recorded").bias.re;
        let gain = current - previous;
        previous = current;
        if gain < tol {
            converged = true;
            break;
        }
    }
    let (s, _) = phase_adjust(game, &s)?;
    let final_bias = bias(game, &s)?.re;
    let trace = RestartTrace {
        restart,
        records,
        sweeps,
        converged,
        final_bias,
        elapsed: start.elapsed(),
    };
    Ok((s, trace))
}

/// Best bias over `config.restarts` independent see-saw runs. Restart `r`
/// draws its starting point from stream `r` of `config.seed`, so the result
/// does not depend on the thread count. Ties go to the lowest restart index.
pub fn seesaw<T: Real>(game: &QuantumXorGame<T>, config: &SeesawConfig) -> Result<SeesawResult<T>> {
    config.validate()?;
    let start = Instant::now();
    let run = || -> Vec<Result<(TensorStrategy<T>, RestartTrace<T>)>> {
        (0..config.restarts)
            .into_par_iter()
            .map(|r| run_restart(game, config, r))
            .collect()
    };
    let outcomes = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let mut best: Option<(usize, TensorStrategy<T>)> = None;
    let mut best_bias = T::zero();
    let mut traces = Vec::with_capacity(config.restarts);
    for (r, outcome) in outcomes.into_iter().enumerate() {
        let (s, trace) = outcome?;
        if best.is_none() || trace.final_bias > best_bias {
            best_bias = trace.final_bias;
            best = Some((r, s));
        }
        traces.push(trace);
    }
    let (best_restart, best_strategy) = best.expect("at least one restart");
    Ok(SeesawResult {
        best_bias,
        best_restart,
        best_strategy,
        traces,
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone)]
pub struct LadderRow<T: Real> {
    pub d: usize,
    pub best_bias: T,
    pub result: SeesawResult<T>,
}

#[derive(Debug, Clone)]
pub struct Ladder<T: Real> {
    pub rows: Vec<LadderRow<T>>,
    /// One message per rung that scored below a smaller dimension by more
    /// than the configured tolerance; usually a sign of too few restarts.
    pub warnings: Vec<String>,
}

/// Runs [`seesaw`] at `dA = dB = d` for each `d` in `dims`.
pub fn dimension_ladder<T: Real>(
    game: &QuantumXorGame<T>,
    dims: &[usize],
    config: &SeesawConfig,
) -> Result<Ladder<T>> {
    if dims.is_empty() {
        return Err(Error::InvalidArgument("dimension list is empty".into()));
    }
    if dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("dimensions must be strictly increasing".into()));
    }
    let mut rows: Vec<LadderRow<T>> = Vec::with_capacity(dims.len());
    let mut warnings = Vec::new();
    for &d in dims {
        let cfg = SeesawConfig { da: d, db: d, ..config.clone() };
        let result = seesaw(game, &cfg)?;
        let best_bias = result.best_bias;
        if let Some(prev) = rows.iter().max_by(|a, b| a.best_bias.partial_cmp(&b.best_bias).unwrap()) {
            if best_bias + T::lit(config.tol.max(1e-9)) < prev.best_bias {
                warnings.push(format!(
                    "d={d} reached {:.10} below d={} at {:.10}; consider more restarts",
                    best_bias.as_f64(),
                    prev.d,
                    prev.best_bias.as_f64()
                ));
            }
        }
        rows.push(LadderRow { d, best_bias, result });
    }
    Ok(Ladder { rows, warnings })
}
