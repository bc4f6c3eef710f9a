#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qxor_cli::report::RunReport;
use qxor_core::game::{chsh_game, perfect_product_game};
use qxor_core::io::{game_to_json, AnyStrategy};
use qxor_core::{Game64, TensorStrategy64};

pub const BIN: &str = env!("CARGO_BIN_EXE_qxor");

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<RunReport>,
}

/// Runs the binary with `--report` pointed into `dir`.
pub fn qxor(dir: &Path, args: &[&str]) -> Run {
    qxor_env(dir, args, &[])
}

pub fn qxor_env(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Run {
    let report = dir.join(format!("report-{}.json", unique()));
    let mut cmd = Command::new(BIN);
    cmd.args(args).arg("--report").arg(&report).env_remove("QXOR_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8_lossy(&stdout).into_owned(),
        stderr: String::from_utf8_lossy(&stderr).into_owned(),
        report: std::fs::read_to_string(&report)
            .ok()
            .map(|t| RunReport::from_json(&t).expect("report parses")),
    }
}

fn unique() -> u64 {
    use std::sync::atomic::{AtomicU64, Ordering};
    static NEXT: AtomicU64 = AtomicU64::new(0);
    NEXT.fetch_add(1, Ordering::Relaxed)
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub fn write_game(dir: &Path, name: &str, g: &Game64) -> PathBuf {
    write(dir, name, &game_to_json(g))
}

pub fn write_strategy(dir: &Path, name: &str, s: impl Into<AnyStrategy<f64>>) -> PathBuf {
    write(dir, name, &s.into().to_json())
}

pub fn chsh_file(dir: &Path) -> PathBuf {
    write_game(dir, "chsh.json", &chsh_game())
}

/// `M = diag(1, 0, 0, 0)` at `n = 2`.
pub fn perfect_file(dir: &Path) -> PathBuf {
    write_game(dir, "perfect.json", &perfect_product_game(2).unwrap())
}

pub fn identity_file(dir: &Path, n: usize) -> PathBuf {
    write_strategy(dir, &format!("identity{n}.json"), TensorStrategy64::identity(n, 1, 1).unwrap())
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn num(v: &serde_json::Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("expected a number, got {v}"))
}
