//! Quantum XOR games and their signed game matrices.
//!
//! A game of size `n` is a self-adjoint `M ∈ M_n ⊗ M_n` with trace norm at
//! most one. The referee's data (states, probabilities, XOR bits) maps onto
//! `M = Σ (-1)^{c_i} p_i φ_i φ_i*`; the classical XOR games embed as the
//! diagonal case.

use nalgebra::{ComplexField, DMatrix};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    all_finite, hermitian_violation, real, seeded_rng, trace_norm, vector_norm, CMatrix, CVector,
    TensorLayout,
};
use crate::scalar::Real;

/// Tolerance for user-supplied game data (normalization, orthogonality,
/// probability sums, trace norm).
pub const INPUT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<T: Real> {
    /// Question state on `C^n ⊗ C^n`, Alice's factor leading.
    pub state: CVector<T>,
    pub probability: T,
    /// `false`: answers must agree; `true`: answers must differ.
    pub differ: bool,
}

/// Referee data for a quantum XOR game. Fewer than `n²` outcomes are
/// allowed; the missing basis states carry probability zero.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSpec<T: Real> {
    pub n: usize,
    pub outcomes: Vec<Outcome<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumXorGame<T: Real> {
    n: usize,
    matrix: CMatrix<T>,
    strict: bool,
}

impl<T: Real> QuantumXorGame<T> {
    /// Validates `matrix` at [`INPUT_TOL`].
    pub fn new(matrix: CMatrix<T>, n: usize, strict: bool) -> Result<Self> {
        validate_game(matrix, n, strict, T::lit(INPUT_TOL))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    pub fn layout(&self) -> TensorLayout {
        TensorLayout::new(self.n)
    }

    pub fn trace_norm(&self) -> Result<T> {
        trace_norm(&self.matrix)
    }

    /// The game with matrix `-M`.
    pub fn negated(&self) -> Self {
        QuantumXorGame {
            n: self.n,
            matrix: -self.matrix.clone(),
            strict: self.strict,
        }
    }
}

/// Checks that `matrix` is an `n² x n²` self-adjoint matrix whose trace norm
/// is one (`strict`) or at most one.
pub fn validate_game<T: Real>(matrix: CMatrix<T>, n: usize, strict: bool, tol: T) -> Result<QuantumXorGame<T>> {
    if n < 1 {
        return Err(Error::InvalidArgument("game size must be at least 1".into()));
    }
    let dim = n * n;
    if matrix.shape() != (dim, dim) {
        return Err(Error::Shape(format!(
            "game of size {n} needs a {dim}x{dim} matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    if !all_finite(&matrix) {
        return Err(Error::NonFinite("game matrix"));
    }
    let dev = hermitian_violation(&matrix)?;
    if dev > tol {
        return Err(Error::NotSelfAdjoint(dev.as_f64()));
    }
    let norm = trace_norm(&matrix)?;
    if strict && (norm - T::one()).abs() > tol {
        return Err(Error::TraceNorm {
            value: norm.as_f64(),
            requirement: "a strict game needs ||M||_1 = 1",
        });
    }
    if !strict && norm > T::one() + tol {
        return Err(Error::TraceNorm {
            value: norm.as_f64(),
            requirement: "a game needs ||M||_1 <= 1",
        });
    }
    Ok(QuantumXorGame { n, matrix, strict })
}

/// Builds `M = Σ (-1)^{c_i} p_i φ_i φ_i*` after checking the referee data.
pub fn game_from_outcomes<T: Real>(spec: &OutcomeSpec<T>) -> Result<QuantumXorGame<T>> {
    let tol = T::lit(INPUT_TOL);
    let n = spec.n;
    if n < 1 {
        return Err(Error::InvalidArgument("game size must be at least 1".into()));
    }
    let dim = n * n;
    let mut total = T::zero();
    for (index, o) in spec.outcomes.iter().enumerate() {
        if o.state.len() != dim {
            return Err(Error::Shape(format!(
                "outcome {index} state has length {}, expected {dim}",
                o.state.len()
            )));
        }
        if !o.probability.is_finite() || o.probability < -tol || o.probability > T::one() + tol {
            return Err(Error::Probability {
                index,
                p: o.probability.as_f64(),
            });
        }
        let norm = vector_norm(&o.state);
        if !norm.is_finite() || (norm - T::one()).abs() > tol {
            return Err(Error::NonUnitState {
                index,
                norm: norm.as_f64(),
            });
        }
        total += o.probability;
    }
    if (total - T::one()).abs() > tol {
        return Err(Error::ProbabilitySum(total.as_f64()));
    }
    for (first, a) in spec.outcomes.iter().enumerate() {
        for (second, b) in spec.outcomes.iter().enumerate().skip(first + 1) {
            let overlap = a.state.dotc(&b.state).modulus();
            if overlap > tol {
                return Err(Error::NonOrthogonal {
                    first,
                    second,
                    overlap: overlap.as_f64(),
                });
            }
        }
    }
    let mut m = CMatrix::zeros(dim, dim);
    for o in &spec.outcomes {
        let sign = if o.differ { -o.probability } else { o.probability };
        m += (&o.state * o.state.adjoint()) * real(sign);
    }
    validate_game(m, n, true, tol)
}

/// Quantum XOR game of a classical XOR game with signed weights `r[(s, t)]`:
/// `M = Σ R_{s,t} (e_s e_s*) ⊗ (e_t e_t*)`.
///
/// The weights must satisfy `Σ |R_{s,t}| = 1` unless `normalize` is set, in
/// which case they are rescaled.
pub fn game_from_classical_xor<T: Real>(r: &DMatrix<T>, normalize: bool) -> Result<QuantumXorGame<T>> {
    let n = r.nrows();
    if n < 1 || r.ncols() != n {
        return Err(Error::Shape(format!(
            "classical XOR weights must be a non-empty square matrix, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    if let Some(bad) = r.iter().find(|x| !x.is_finite() || x.abs() > T::one()) {
        return Err(Error::InvalidArgument(format!(
            "classical XOR weight {} outside [-1, 1]",
            bad.as_f64()
        )));
    }
    let total = r.iter().fold(T::zero(), |s, x| s + x.abs());
    if total == T::zero() {
        return Err(Error::InvalidArgument("classical XOR weights are all zero".into()));
    }
    let tol = T::lit(INPUT_TOL);
    let scale = if normalize {
        T::one() / total
    } else if (total - T::one()).abs() > tol {
        return Err(Error::ProbabilitySum(total.as_f64()));
    } else {
        T::one()
    };
    let mut m = CMatrix::zeros(n * n, n * n);
    for s in 0..n {
        for t in 0..n {
            let k = s * n + t;
            m[(k, k)] = real(r[(s, t)] * scale);
        }
    }
    validate_game(m, n, true, tol)
}

/// CHSH: uniform questions, answers agree except on the question pair (2, 2).
pub fn chsh_game<T: Real>() -> QuantumXorGame<T> {
    let q = T::lit(0.25);
    let r = DMatrix::from_row_slice(2, 2, &[q, q, q, -q]);
    game_from_classical_xor(&r, false).expect("CHSH weights are valid")
}

/// `M = (e_1 ⊗ e_1)(e_1 ⊗ e_1)*`: won with certainty by any strategy whose
/// leading blocks act as the identity.
pub fn perfect_product_game<T: Real>(n: usize) -> Result<QuantumXorGame<T>> {
    let mut state = CVector::zeros(n * n);
    if n == 0 {
        return Err(Error::InvalidArgument("game size must be at least 1".into()));
    }
    state[0] = real(T::one());
    game_from_outcomes(&OutcomeSpec {
        n,
        outcomes: vec![Outcome {
            state,
            probability: T::one(),
            differ: false,
        }],
    })
}

/// Random strict game: a Gaussian Hermitian matrix scaled to unit trace norm.
pub fn random_game_with<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<QuantumXorGame<T>> {
    if n < 1 {
        return Err(Error::InvalidArgument("game size must be at least 1".into()));
    }
    let dim = n * n;
    let g = CMatrix::<T>::from_fn(dim, dim, |_, _| {
        num_complex::Complex::new(
            T::lit(rng.random::<f64>() - 0.5),
            T::lit(rng.random::<f64>() - 0.5),
        )
    });
    let h = &g + g.adjoint();
    let norm = trace_norm(&h)?;
    validate_game(h / real(norm), n, true, T::lit(INPUT_TOL))
}

pub fn random_game<T: Real>(n: usize, seed: u64) -> Result<QuantumXorGame<T>> {
    random_game_with(n, &mut seeded_rng(seed))
}
