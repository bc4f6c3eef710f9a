use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qxor", version, about = "Quantum XOR games: validation, bias evaluation, dilations and see-saw optimization")]
pub struct Cli {
    /// Also write the machine-readable run report to this JSON file.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a game file describes a valid quantum XOR game.
    Validate(ValidateArgs),
    /// Evaluate the bias of a strategy against a game, by both evaluation paths.
    Bias(BiasArgs),
    /// Search for good tensor strategies with see-saw iterations.
    Optimize(OptimizeArgs),
    /// Apply a dilation transform to a strategy.
    Dilate(DilateArgs),
    /// Run the randomized property suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub game: PathBuf,
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    pub game: PathBuf,
    pub strategy: PathBuf,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    pub game: PathBuf,
    /// Local dimension for both players.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Alice's local dimension (overrides --dim).
    #[arg(long = "dimA", visible_alias = "dim-a")]
    pub dim_a: Option<usize>,
    /// Bob's local dimension (overrides --dim).
    #[arg(long = "dimB", visible_alias = "dim-b")]
    pub dim_b: Option<usize>,
    /// Comma-separated, increasing dimensions; runs one optimization per entry.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["dim_a", "dim_b"])]
    pub dims: Option<Vec<usize>>,
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    /// Maximum sweeps per restart.
    #[arg(long, default_value_t = 500)]
    pub sweeps: usize,
    /// Stop a restart once a sweep improves the bias by less than this.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for restarts (further capped by QXOR_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    /// CSV trace output. With --dims, one file per dimension: NAME.dD.csv.
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
    /// Best strategy output. With --dims, one file per dimension: NAME.dD.json.
    #[arg(long = "strategy-out", value_name = "PATH")]
    pub strategy_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DilationKind {
    /// Self-adjoint unitaries realizing (X + X*)/2.
    Observable,
    /// Adjoint unitaries realizing X*.
    Adjoint,
    /// Half-and-half combination with the adjoint strategy.
    Symmetrize,
    /// Size-2n strategy carrying X and X* in the corner blocks.
    Embed,
    /// Size-n strategy recovered from a corner-pattern strategy.
    Extract,
}

impl DilationKind {
    pub fn name(self) -> &'static str {
        match self {
            DilationKind::Observable => "observable",
            DilationKind::Adjoint => "adjoint",
            DilationKind::Symmetrize => "symmetrize",
            DilationKind::Embed => "embed",
            DilationKind::Extract => "extract",
        }
    }
}

#[derive(Debug, Args)]
pub struct DilateArgs {
    pub strategy: PathBuf,
    #[arg(long, value_enum)]
    pub kind: DilationKind,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Game size for the randomized instances.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Largest local dimension drawn for random strategies.
    #[arg(long, default_value_t = 3)]
    pub dims: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Only run properties whose name contains this string.
    #[arg(long)]
    pub filter: Option<String>,
    /// Test fixture: build Halmos dilations with the wrong sign in the last corner.
    #[arg(long, hide = true)]
    pub mutate_halmos: bool,
}
