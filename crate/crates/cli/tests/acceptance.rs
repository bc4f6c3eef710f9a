//! Acceptance suite: one PASS/FAIL line per criterion, then a single assert.
//! Run with `cargo test -p qxor-cli --test acceptance -- --nocapture`.

mod common;

use std::cell::Cell;
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use qxor_core::dilation::{
    embed_self_adjoint, extract_from_embedding_commuting, extract_from_embedding_tensor,
    observable_dilation_commuting, observable_dilation_tensor, symmetrize_strategy,
};
use qxor_core::game::{chsh_game, perfect_product_game, random_game_with};
use qxor_core::linalg::{rng_for_stream, unitarity_violation, SeededRng};
use qxor_core::optimize::{seesaw, SeesawConfig, SeesawResult};
use qxor_core::strategy::{
    adjoint_strategy, bias_direct, bias_trace, check_commuting, observable_violation, phase_adjust,
    random_commuting_strategy_with, random_diagonal_commuting_strategy_with, random_tensor_strategy_with,
};
use qxor_core::{Correlation64, Game64, Strategy};
use rand::Rng;
use tempfile::tempdir;

const SQRT2_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

struct Verdict {
    passed: bool,
    detail: String,
}

/// Largest `|Tr(MX)|` seen by any criterion (criterion 8).
struct Bound(Cell<f64>);

impl Bound {
    fn see(&self, g: &Game64, x: &Correlation64) {
        let v = bias_trace(g, x).unwrap().norm();
        self.0.set(self.0.get().max(v));
    }
}

fn rng(criterion: u64, trial: u64) -> SeededRng {
    rng_for_stream(2024 + criterion, trial)
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed < Duration::from_secs(secs)
}

fn dual_bias(bound: &Bound) -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let mut r = rng(1, trial);
        let n = r.random_range(2..=3);
        let (da, db) = (r.random_range(1..=3), r.random_range(1..=3));
        let g = random_game_with::<f64, _>(n, &mut r).unwrap();
        let s = random_tensor_strategy_with::<f64, _>(n, da, db, &mut r).unwrap();
        let x = s.correlation();
        worst = worst.max((bias_direct(&g, &s).unwrap() - bias_trace(&g, &x).unwrap()).norm());
        bound.see(&g, &x);
    }
    let t = start.elapsed();
    Verdict {
        passed: worst <= 1e-10 && within(t, 30),
        detail: format!("worst {worst:.2e} <= 1e-10 over 200 pairs, {:.2}s < 30s", t.as_secs_f64()),
    }
}

fn observable_dilation(bound: &Bound) -> Verdict {
    let (mut structure, mut fixed, mut general) = (0.0f64, 0.0f64, 0.0f64);
    for trial in 0..100 {
        let mut r = rng(2, trial);
        let n = r.random_range(2..=3);
        let (da, db) = (r.random_range(1..=3), r.random_range(1..=3));
        let g = random_game_with::<f64, _>(n, &mut r).unwrap();

        let s = random_tensor_strategy_with::<f64, _>(n, da, db, &mut r).unwrap();
        let t = observable_dilation_tensor(&s).unwrap();
        structure = structure
            .max(observable_violation(&t))
            .max(unitarity_violation(t.alice()).unwrap())
            .max(unitarity_violation(t.bob()).unwrap());
        general = general.max(t.correlation().distance(&s.correlation().hermitian_part()));
        let h = symmetrize_strategy(&s).unwrap();
        fixed = fixed.max(observable_dilation_tensor(&h).unwrap().correlation().distance(&h.correlation()));
        bound.see(&g, &t.correlation());

        let (ca, cb) = (r.random_range(1..=2), r.random_range(1..=2));
        let q = random_commuting_strategy_with::<f64, _>(n, ca, cb, &mut r).unwrap();
        let o = observable_dilation_commuting(&q).unwrap();
        structure = structure
            .max(observable_violation(&o))
            .max(unitarity_violation(o.alice()).unwrap())
            .max(unitarity_violation(o.bob()).unwrap())
            .max(check_commuting(&o));
        general = general.max(o.correlation().distance(&q.correlation().hermitian_part()));
        let hq = symmetrize_strategy(&q).unwrap();
        fixed = fixed.max(observable_dilation_commuting(&hq).unwrap().correlation().distance(&hq.correlation()));
        bound.see(&g, &o.correlation());
    }
    Verdict {
        passed: structure <= 1e-9 && fixed <= 1e-11 && general <= 1e-11,
        detail: format!(
            "self-adjoint unitary {structure:.2e} <= 1e-9, Hermitian X kept {fixed:.2e} <= 1e-11, \
             X -> (X+X*)/2 {general:.2e} <= 1e-11"
        ),
    }
}

fn adjoint_and_symmetrization(bound: &Bound) -> Verdict {
    let (mut adjoint, mut sym) = (0.0f64, 0.0f64);
    for trial in 0..100 {
        let mut r = rng(3, trial);
        let n = r.random_range(2..=3);
        let (da, db) = (r.random_range(1..=3), r.random_range(1..=3));
        let g = random_game_with::<f64, _>(n, &mut r).unwrap();
        let s = random_tensor_strategy_with::<f64, _>(n, da, db, &mut r).unwrap();
        let x = s.correlation();
        adjoint = adjoint.max(adjoint_strategy(&s).unwrap().correlation().distance(&x.adjoint()));
        let modulus = bias_trace(&g, &x).unwrap().norm();
        let (adjusted, _) = phase_adjust(&g, &s).unwrap();
        let y = symmetrize_strategy(&adjusted).unwrap().correlation();
        let b = bias_trace(&g, &y).unwrap();
        sym = sym.max((b.re - modulus).abs().max(b.im.abs()));
        bound.see(&g, &y);
    }
    Verdict {
        passed: adjoint <= 1e-12 && sym <= 1e-10,
        detail: format!("adjoint {adjoint:.2e} <= 1e-12, symmetrized bias vs |Tr(MX)| {sym:.2e} <= 1e-10"),
    }
}

fn round_trip(bound: &Bound) -> Verdict {
    let start = Instant::now();
    let (mut tensor, mut commuting, mut mass) = (0.0f64, 0.0f64, 0.0f64);
    for trial in 0..100 {
        let mut r = rng(4, trial);
        let n = r.random_range(2..=3);
        let (da, db) = (r.random_range(1..=3), r.random_range(1..=3));
        let g = random_game_with::<f64, _>(n, &mut r).unwrap();
        let s = random_tensor_strategy_with::<f64, _>(n, da, db, &mut r).unwrap();
        let (e, w) = embed_self_adjoint(&s).unwrap();
        mass = mass.max(w.off_pattern_mass()).max(w.deviation());
        let back = extract_from_embedding_tensor(&e).unwrap();
        tensor = tensor.max(back.correlation().distance(&s.correlation()));
        bound.see(&g, &back.correlation());

        // commuting model at n = 2 with d <= 4, alternating the two samplers
        let q = if trial % 2 == 0 {
            let ca = r.random_range(1..=2);
            let cb = r.random_range(1..=2);
            random_commuting_strategy_with::<f64, _>(2, ca, cb, &mut r).unwrap()
        } else {
            let d = r.random_range(1..=4);
            random_diagonal_commuting_strategy_with::<f64, _>(2, d, &mut r).unwrap()
        };
        let (eq, wq) = embed_self_adjoint(&q).unwrap();
        mass = mass.max(wq.off_pattern_mass()).max(wq.deviation());
        let bq = extract_from_embedding_commuting(&eq).unwrap();
        commuting = commuting.max(bq.correlation().distance(&q.correlation())).max(check_commuting(&bq));
    }
    let t = start.elapsed();
    Verdict {
        passed: tensor <= 1e-10 && commuting <= 1e-9 && mass <= 1e-11 && within(t, 60),
        detail: format!(
            "tensor {tensor:.2e} <= 1e-10, commuting {commuting:.2e} <= 1e-9, off-pattern {mass:.2e} <= 1e-11, \
             {:.2}s < 60s",
            t.as_secs_f64()
        ),
    }
}

/// Exhaustive search over real planar observables `cos a Z + sin a X` on a
/// maximally entangled pair, where `<A(a) ⊗ B(b)> = cos(a - b)`.
fn chsh_angle_oracle() -> f64 {
    let steps = 64;
    let angle = |k: usize| k as f64 * std::f64::consts::PI / steps as f64;
    let mut best = f64::MIN;
    for a0 in 0..steps {
        for a1 in 0..steps {
            for b0 in 0..steps {
                for b1 in 0..steps {
                    let e = |a: usize, b: usize| (angle(a) - angle(b)).cos();
                    let v = (e(a0, b0) + e(a0, b1) + e(a1, b0) - e(a1, b1)) / 4.0;
                    best = best.max(v);
                }
            }
        }
    }
    best
}

fn chsh(bound: &Bound) -> Verdict {
    let oracle = chsh_angle_oracle();
    let start = Instant::now();
    let cfg = SeesawConfig { da: 2, db: 2, restarts: 50, seed: 7, ..SeesawConfig::default() };
    let g = chsh_game::<f64>();
    let r = seesaw(&g, &cfg).unwrap();
    let t = start.elapsed();
    bound.see(&g, &r.best_strategy.correlation());
    // bounds as stated, not an approximation of the constant
    #[allow(clippy::approx_constant)]
    let (lo, hi) = (0.7071067 - 1e-4, 0.7071068 + 1e-6);
    Verdict {
        passed: (lo..=hi).contains(&r.best_bias) && (oracle - SQRT2_HALF).abs() < 1e-12 && within(t, 60),
        detail: format!(
            "best bias {:.10} in [{lo:.7}, {hi:.7}], angle oracle {oracle:.10}, {:.2}s < 60s",
            r.best_bias,
            t.as_secs_f64()
        ),
    }
}

fn stdout_value(stdout: &str, prefix: &str) -> Option<f64> {
    let line = stdout.lines().find(|l| l.starts_with(prefix))?;
    line[prefix.len()..].split_whitespace().next()?.parse().ok()
}

fn perfect_game(dir: &Path, bound: &Bound) -> Verdict {
    let g = perfect_product_game::<f64>(2).unwrap();
    let cfg = SeesawConfig { da: 1, db: 1, restarts: 10, ..SeesawConfig::default() };
    let r = seesaw(&g, &cfg).unwrap();
    bound.see(&g, &r.best_strategy.correlation());
    let run = qxor(dir, &["bias", s(&perfect_file(dir)), s(&identity_file(dir, 2))]);
    let printed_bias = stdout_value(&run.stdout, "bias (trace):");
    let printed_p = stdout_value(&run.stdout, "success probability:");
    let exact = |v: Option<f64>| v.is_some_and(|v| (v - 1.0).abs() <= 1e-12);
    Verdict {
        passed: r.best_bias >= 1.0 - 1e-8 && run.code == 0 && exact(printed_bias) && exact(printed_p),
        detail: format!(
            "seesaw d=1 {:.12} >= 1 - 1e-8, `qxor bias` on identity printed bias {printed_bias:?}, p {printed_p:?}",
            r.best_bias
        ),
    }
}

fn csv_monotonicity(path: &Path) -> f64 {
    let text = std::fs::read_to_string(path).unwrap();
    let mut worst = 0.0f64;
    let mut prev: Option<(String, f64)> = None;
    for line in text.lines().skip(1).filter(|l| !l.starts_with("summary")) {
        let f: Vec<&str> = line.split(',').collect();
        let (restart, re) = (f[0].to_string(), f[3].parse::<f64>().unwrap());
        if let Some((pr, pre)) = &prev {
            if *pr == restart {
                worst = worst.max(pre - re);
            }
        }
        prev = Some((restart, re));
    }
    worst
}

fn monotone_and_sound(dir: &Path, bound: &Bound) -> Verdict {
    let mut games = vec![("chsh".to_string(), chsh_game::<f64>())];
    for k in 0..4 {
        let mut r = rng(7, k);
        let n = 2 + (k as usize % 2);
        games.push((format!("random{k}"), random_game_with::<f64, _>(n, &mut r).unwrap()));
    }
    let (mut mono, mut sound, mut failures) = (0.0f64, 0.0f64, 0usize);
    for (name, g) in &games {
        let game = write_game(dir, &format!("{name}.json"), g);
        let trace = dir.join(format!("{name}.csv"));
        let out = dir.join(format!("{name}.best.json"));
        let opt = qxor(
            dir,
            &["optimize", s(&game), "--dim", "2", "--restarts", "8", "--seed", "1", "--trace", s(&trace), "--strategy-out", s(&out)],
        );
        let best = opt.report.as_ref().map(|r| num(&r.results["best_bias"]));
        let check = qxor(dir, &["bias", s(&game), s(&out)]);
        let rederived = check.report.as_ref().map(|r| num(&r.results["bias_trace"][0]));
        match (opt.code, check.code, best, rederived) {
            (0, 0, Some(b), Some(d)) => {
                mono = mono.max(csv_monotonicity(&trace));
                sound = sound.max((b - d).abs());
                let strategy = qxor_core::io::read_strategy::<f64>(&out).unwrap();
                bound.see(g, &strategy.correlation());
            }
            _ => failures += 1,
        }
    }
    // in-process traces for more games and dimensions
    for k in 0..10u64 {
        let mut r = rng(70, k);
        let n = r.random_range(2..=3);
        let d = r.random_range(1..=3);
        let g = random_game_with::<f64, _>(n, &mut r).unwrap();
        let cfg = SeesawConfig { da: d, db: d, restarts: 4, max_sweeps: 100, seed: k, ..SeesawConfig::default() };
        let res: SeesawResult<f64> = seesaw(&g, &cfg).unwrap();
        mono = mono.max(res.monotonicity_violation());
        sound = sound.max((bias_trace(&g, &res.best_strategy.correlation()).unwrap().re - res.best_bias).abs());
        bound.see(&g, &res.best_strategy.correlation());
    }
    Verdict {
        passed: failures == 0 && mono <= 1e-12 && sound <= 1e-10,
        detail: format!(
            "trace drop {mono:.2e} <= 1e-12, `qxor bias` re-derivation {sound:.2e} <= 1e-10, {failures} failed runs"
        ),
    }
}

fn global_bound(bound: &Bound) -> Verdict {
    // additional fuzzing on top of everything the other criteria produced
    for trial in 0..200 {
        let mut r = rng(8, trial);
        let n = r.random_range(1..=3);
        let g = random_game_with::<f64, _>(n, &mut r).unwrap();
        let (da, db) = (r.random_range(1..=4), r.random_range(1..=4));
        let s = random_tensor_strategy_with::<f64, _>(n, da, db, &mut r).unwrap();
        bound.see(&g, &s.correlation());
        bound.see(&g, &observable_dilation_tensor(&s).unwrap().correlation());
        let q = random_commuting_strategy_with::<f64, _>(n, 1 + da % 2, 1 + db % 2, &mut r).unwrap();
        bound.see(&g, &q.correlation());
        bound.see(&g.negated(), &q.correlation());
    }
    let worst = bound.0.get();
    Verdict { passed: worst <= 1.0 + 1e-9, detail: format!("max |Tr(MX)| {worst:.15} <= 1 + 1e-9") }
}

fn verify_suite(dir: &Path) -> Verdict {
    let start = Instant::now();
    let run = qxor(dir, &["verify"]);
    let t = start.elapsed();
    let last = run.stdout.lines().last().unwrap_or("").to_string();
    Verdict {
        passed: run.code == 0 && within(t, 60),
        detail: format!("exit {} ({last}), {:.2}s < 60s", run.code, t.as_secs_f64()),
    }
}

#[test]
fn acceptance() {
    let dir = tempdir().unwrap();
    let bound = Bound(Cell::new(0.0));
    let criteria: Vec<(&str, Verdict)> = vec![
        ("1 dual bias agreement", dual_bias(&bound)),
        ("2 observable dilation", observable_dilation(&bound)),
        ("3 adjoint and symmetrization", adjoint_and_symmetrization(&bound)),
        ("4 embedding round trip", round_trip(&bound)),
        ("5 CHSH see-saw value", chsh(&bound)),
        ("6 perfect-strategy game", perfect_game(dir.path(), &bound)),
        ("7 monotonicity and soundness", monotone_and_sound(dir.path(), &bound)),
        ("8 global bias bound", global_bound(&bound)),
        ("9 verify suite", verify_suite(dir.path())),
    ];
    for (name, v) in &criteria {
        println!("{} {name}: {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    let failed: Vec<_> = criteria.iter().filter(|(_, v)| !v.passed).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
