//! Strategies in the tensor and (finite-dimensional) commuting models, their
//! unitary correlations, and the bias functional.
//!
//! Both models store Alice's and Bob's unitaries as `n x n` block matrices;
//! block `(i, j)` of `U` is `U_ij`. The correlation of a strategy is the
//! `n² x n²` matrix with `X_{(i,j),(k,l)} = ⟨U_ij V_kl ψ, ψ⟩` placed by
//! [`TensorLayout`].

use nalgebra::ComplexField;
use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::game::QuantumXorGame;
use crate::linalg::{
    all_finite, block, expectation, haar_unitary_with, hermitian_violation, max_abs_diff,
    operator_norm, partial_trace_game, permute_subsystems, random_unit_vector, real, seeded_rng,
    unitarity_violation, vector_norm, CMatrix, CVector, TensorLayout,
};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Tensor,
    Commuting,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Tensor => "tensor",
            Model::Commuting => "commuting",
        }
    }
}

/// Unitary correlation matrix of game size `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation<T: Real> {
    n: usize,
    x: CMatrix<T>,
}

impl<T: Real> Correlation<T> {
    pub fn new(n: usize, x: CMatrix<T>) -> Result<Self> {
        if x.shape() != (n * n, n * n) {
            return Err(Error::Shape(format!(
                "correlation of size {n} must be {0}x{0}, got {1}x{2}",
                n * n,
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(Correlation { n, x })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.x
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.x
    }

    pub fn layout(&self) -> TensorLayout {
        TensorLayout::new(self.n)
    }

    /// `X_{(i,j),(k,l)}`, 0-based.
    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> Complex<T> {
        self.x[self.layout().index(i, j, k, l)]
    }

    pub fn adjoint(&self) -> Self {
        Correlation {
            n: self.n,
            x: self.x.adjoint(),
        }
    }

    /// `(X + X*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Correlation {
            n: self.n,
            x: (&self.x + self.x.adjoint()) * real(T::lit(0.5)),
        }
    }

    pub fn operator_norm(&self) -> Result<T> {
        operator_norm(&self.x)
    }

    /// Largest entrywise deviation from `other`.
    pub fn distance(&self, other: &Self) -> T {
        max_abs_diff(&self.x, &other.x)
    }

    pub fn hermitian_violation(&self) -> T {
        max_abs_diff(&self.x, &self.x.adjoint())
    }
}

/// Operations shared by both strategy models.
pub trait Strategy<T: Real>: Clone + Sized {
    fn model(&self) -> Model;
    /// Game size.
    fn n(&self) -> usize;
    /// Dimension of each `U_ij` block.
    fn alice_block_dim(&self) -> usize;
    /// Dimension of each `V_kl` block.
    fn bob_block_dim(&self) -> usize;
    fn alice(&self) -> &CMatrix<T>;
    fn bob(&self) -> &CMatrix<T>;
    fn state(&self) -> &CVector<T>;
    fn correlation(&self) -> Correlation<T>;
    /// Same local spaces and shared state, new block unitaries of game size
    /// `n`. The result is revalidated.
    fn with_unitaries(&self, n: usize, u: CMatrix<T>, v: CMatrix<T>) -> Result<Self>;
    /// Direct-sum strategy realizing `λ X₁ + (1 - λ) X₂`.
    fn convex_combine(&self, other: &Self, lambda: T) -> Result<Self>;
}

fn check_unitary<T: Real>(m: &CMatrix<T>, dim: usize, which: &'static str, tol: T) -> Result<()> {
    if m.shape() != (dim, dim) {
        return Err(Error::Shape(format!(
            "{which} must be {dim}x{dim}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !all_finite(m) {
        return Err(Error::NonFinite(which));
    }
    let violation = unitarity_violation(m)?;
    if violation > tol {
        return Err(Error::NotUnitary {
            which,
            violation: violation.as_f64(),
        });
    }
    Ok(())
}

fn check_state<T: Real>(psi: &CVector<T>, dim: usize, tol: T) -> Result<()> {
    if psi.len() != dim {
        return Err(Error::Shape(format!(
            "shared state must have length {dim}, got {}",
            psi.len()
        )));
    }
    let norm = vector_norm(psi);
    if !norm.is_finite() || (norm - T::one()).abs() > tol {
        return Err(Error::NotUnitVector(norm.as_f64()));
    }
    Ok(())
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return Err(Error::InvalidArgument(format!(
            "convex weight {} outside [0, 1]",
            lambda.as_f64()
        )));
    }
    Ok(())
}

/// Per-block direct sum: block `(i, j)` of the result is `A_ij ⊕ B_ij`.
pub fn block_direct_sum<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, n: usize, da: usize, db: usize) -> CMatrix<T> {
    let d = da + db;
    let mut out = CMatrix::zeros(n * d, n * d);
    for i in 0..n {
        for j in 0..n {
            out.view_mut((i * d, j * d), (da, da))
                .copy_from(&a.view((i * da, j * da), (da, da)));
            out.view_mut((i * d + da, j * d + da), (db, db))
                .copy_from(&b.view((i * db, j * db), (db, db)));
        }
    }
    out
}

/// Strategy in the tensor model: `U` on `C^n ⊗ H_A`, `V` on `C^n ⊗ H_B` and
/// `ψ ∈ H_A ⊗ H_B` (index `a * dB + b`).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorStrategy<T: Real> {
    n: usize,
    da: usize,
    db: usize,
    u: CMatrix<T>,
    v: CMatrix<T>,
    psi: CVector<T>,
}

impl<T: Real> TensorStrategy<T> {
    /// Validates shapes, unitarity and normalization at [`Real::default_tol`].
    pub fn new(n: usize, da: usize, db: usize, u: CMatrix<T>, v: CMatrix<T>, psi: CVector<T>) -> Result<Self> {
        if n < 1 || da < 1 || db < 1 {
            return Err(Error::InvalidArgument("strategy dimensions must be at least 1".into()));
        }
        let tol = T::default_tol();
        check_unitary(&u, n * da, "Alice's unitary", tol)?;
        check_unitary(&v, n * db, "Bob's unitary", tol)?;
        check_state(&psi, da * db, tol)?;
        Ok(TensorStrategy { n, da, db, u, v, psi })
    }

    /// Trivial strategy: identity unitaries and `ψ = e_1`.
    pub fn identity(n: usize, da: usize, db: usize) -> Result<Self> {
        let mut psi = CVector::zeros(da * db);
        if psi.is_empty() {
            return Err(Error::InvalidArgument("strategy dimensions must be at least 1".into()));
        }
        psi[0] = real(T::one());
        Self::new(n, da, db, CMatrix::identity(n * da, n * da), CMatrix::identity(n * db, n * db), psi)
    }

    pub fn da(&self) -> usize {
        self.da
    }

    pub fn db(&self) -> usize {
        self.db
    }

    /// The state as a `dA x dB` matrix `Ψ[a, b] = ψ[a * dB + b]`.
    pub fn state_matrix(&self) -> CMatrix<T> {
        CMatrix::from_fn(self.da, self.db, |a, b| self.psi[a * self.db + b])
    }

    pub fn with_state(&self, psi: CVector<T>) -> Result<Self> {
        Self::new(self.n, self.da, self.db, self.u.clone(), self.v.clone(), psi)
    }
}

impl<T: Real> Strategy<T> for TensorStrategy<T> {
    fn model(&self) -> Model {
        Model::Tensor
    }

    fn n(&self) -> usize {
        self.n
    }

    fn alice_block_dim(&self) -> usize {
        self.da
    }

    fn bob_block_dim(&self) -> usize {
        self.db
    }

    fn alice(&self) -> &CMatrix<T> {
        &self.u
    }

    fn bob(&self) -> &CMatrix<T> {
        &self.v
    }

    fn state(&self) -> &CVector<T> {
        &self.psi
    }

    fn correlation(&self) -> Correlation<T> {
        correlation_tensor(self)
    }

    fn with_unitaries(&self, n: usize, u: CMatrix<T>, v: CMatrix<T>) -> Result<Self> {
        Self::new(n, self.da, self.db, u, v, self.psi.clone())
    }

    fn convex_combine(&self, other: &Self, lambda: T) -> Result<Self> {
        check_lambda(lambda)?;
        if self.n != other.n {
            return Err(Error::Shape(format!("game sizes differ: {} vs {}", self.n, other.n)));
        }
        let (da, db) = (self.da + other.da, self.db + other.db);
        let u = block_direct_sum(&self.u, &other.u, self.n, self.da, other.da);
        let v = block_direct_sum(&self.v, &other.v, self.n, self.db, other.db);
        let w1 = real(lambda.sqrt());
        let w2 = real((T::one() - lambda).sqrt());
        let mut psi = CVector::zeros(da * db);
        for a in 0..self.da {
            for b in 0..self.db {
                psi[a * db + b] = self.psi[a * self.db + b] * w1;
            }
        }
        for a in 0..other.da {
            for b in 0..other.db {
                psi[(self.da + a) * db + self.db + b] = other.psi[a * other.db + b] * w2;
            }
        }
        Self::new(self.n, da, db, u, v, psi)
    }
}

/// Strategy in the commuting model on `C^d`: every block of `U` commutes with
/// every block of `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingStrategy<T: Real> {
    n: usize,
    d: usize,
    u: CMatrix<T>,
    v: CMatrix<T>,
    psi: CVector<T>,
}

impl<T: Real> CommutingStrategy<T> {
    /// Validates shapes, unitarity, normalization and commutation at
    /// [`Real::default_tol`].
    pub fn new(n: usize, d: usize, u: CMatrix<T>, v: CMatrix<T>, psi: CVector<T>) -> Result<Self> {
        if n < 1 || d < 1 {
            return Err(Error::InvalidArgument("strategy dimensions must be at least 1".into()));
        }
        let tol = T::default_tol();
        check_unitary(&u, n * d, "Alice's unitary", tol)?;
        check_unitary(&v, n * d, "Bob's unitary", tol)?;
        check_state(&psi, d, tol)?;
        let violation = commutation_violation(&u, &v, n, d);
        if violation > tol {
            return Err(Error::Commutation(violation.as_f64()));
        }
        Ok(CommutingStrategy { n, d, u, v, psi })
    }

    pub fn identity(n: usize, d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidArgument("strategy dimensions must be at least 1".into()));
        }
        let mut psi = CVector::zeros(d);
        psi[0] = real(T::one());
        Self::new(n, d, CMatrix::identity(n * d, n * d), CMatrix::identity(n * d, n * d), psi)
    }

    /// Commuting realization of a tensor strategy on `H_A ⊗ H_B`:
    /// blocks `U_ij ⊗ I` and `I ⊗ V_kl`.
    pub fn from_tensor(s: &TensorStrategy<T>) -> Result<Self> {
        let (n, da, db) = (s.n, s.da, s.db);
        let u = s.u.kronecker(&CMatrix::identity(db, db));
        let v = permute_subsystems(&s.v.kronecker(&CMatrix::identity(da, da)), &[n, db, da], &[0, 2, 1])?;
        Self::new(n, da * db, u, v, s.psi.clone())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Conjugates every block by the unitary `w` on `C^d` and maps `ψ ↦ w ψ`;
    /// the correlation is unchanged.
    pub fn conjugated(&self, w: &CMatrix<T>) -> Result<Self> {
        let lift = CMatrix::identity(self.n, self.n).kronecker(w);
        let u = &lift * &self.u * lift.adjoint();
        let v = &lift * &self.v * lift.adjoint();
        Self::new(self.n, self.d, u, v, w * &self.psi)
    }
}

impl<T: Real> Strategy<T> for CommutingStrategy<T> {
    fn model(&self) -> Model {
        Model::Commuting
    }

    fn n(&self) -> usize {
        self.n
    }

    fn alice_block_dim(&self) -> usize {
        self.d
    }

    fn bob_block_dim(&self) -> usize {
        self.d
    }

    fn alice(&self) -> &CMatrix<T> {
        &self.u
    }

    fn bob(&self) -> &CMatrix<T> {
        &self.v
    }

    fn state(&self) -> &CVector<T> {
        &self.psi
    }

    fn correlation(&self) -> Correlation<T> {
        correlation_commuting(self)
    }

    fn with_unitaries(&self, n: usize, u: CMatrix<T>, v: CMatrix<T>) -> Result<Self> {
        Self::new(n, self.d, u, v, self.psi.clone())
    }

    fn convex_combine(&self, other: &Self, lambda: T) -> Result<Self> {
        check_lambda(lambda)?;
        if self.n != other.n {
            return Err(Error::Shape(format!("game sizes differ: {} vs {}", self.n, other.n)));
        }
        let u = block_direct_sum(&self.u, &other.u, self.n, self.d, other.d);
        let v = block_direct_sum(&self.v, &other.v, self.n, self.d, other.d);
        let mut psi = CVector::zeros(self.d + other.d);
        psi.rows_mut(0, self.d)
            .copy_from(&(&self.psi * real(lambda.sqrt())));
        psi.rows_mut(self.d, other.d)
            .copy_from(&(&other.psi * real((T::one() - lambda).sqrt())));
        Self::new(self.n, self.d + other.d, u, v, psi)
    }
}

/// `X_{(i,j),(k,l)} = ⟨(U_ij ⊗ V_kl) ψ, ψ⟩`.
pub fn correlation_tensor<T: Real>(s: &TensorStrategy<T>) -> Correlation<T> {
    let n = s.n;
    let layout = TensorLayout::new(n);
    let psi = s.state_matrix();
    let psi_adj = psi.adjoint();
    // ⟨(A ⊗ B) ψ, ψ⟩ = Σ_{b,b'} (Ψ* A Ψ)[b, b'] B[b, b']
    let mut x = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let p = &psi_adj * block(&s.u, i, j, s.da) * &psi;
            for k in 0..n {
                for l in 0..n {
                    let vkl = s.v.view((k * s.db, l * s.db), (s.db, s.db));
                    let val = p.iter().zip(vkl.iter()).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + *a * *b);
                    x[layout.index(i, j, k, l)] = val;
                }
            }
        }
    }
    Correlation { n, x }
}

/// `X_{(i,j),(k,l)} = ⟨U_ij V_kl ψ, ψ⟩`.
pub fn correlation_commuting<T: Real>(s: &CommutingStrategy<T>) -> Correlation<T> {
    let (n, d) = (s.n, s.d);
    let layout = TensorLayout::new(n);
    // ⟨U V ψ, ψ⟩ = ⟨V ψ, U* ψ⟩
    let left: Vec<CVector<T>> = (0..n * n)
        .map(|ij| s.u.view((ij / n * d, ij % n * d), (d, d)).adjoint() * &s.psi)
        .collect();
    let right: Vec<CVector<T>> = (0..n * n)
        .map(|kl| s.v.view((kl / n * d, kl % n * d), (d, d)) * &s.psi)
        .collect();
    let mut x = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    x[layout.index(i, j, k, l)] = left[i * n + j].dotc(&right[k * n + l]);
                }
            }
        }
    }
    Correlation { n, x }
}

/// `max_{i,j,k,l} max |U_ij V_kl - V_kl U_ij|` for block matrices with `d x d`
/// blocks.
pub fn commutation_violation<T: Real>(u: &CMatrix<T>, v: &CMatrix<T>, n: usize, d: usize) -> T {
    let ub: Vec<CMatrix<T>> = (0..n * n).map(|ij| block(u, ij / n, ij % n, d)).collect();
    let vb: Vec<CMatrix<T>> = (0..n * n).map(|kl| block(v, kl / n, kl % n, d)).collect();
    let mut worst = T::zero();
    for a in &ub {
        for b in &vb {
            worst = worst.max(max_abs_diff(&(a * b), &(b * a)));
        }
    }
    worst
}

pub fn check_commuting<T: Real>(s: &CommutingStrategy<T>) -> T {
    commutation_violation(&s.u, &s.v, s.n, s.d)
}

fn check_sizes<T: Real>(game: &QuantumXorGame<T>, n: usize) -> Result<()> {
    if game.n() != n {
        return Err(Error::Shape(format!(
            "game has size {} but strategy/correlation has size {n}",
            game.n()
        )));
    }
    Ok(())
}

/// `Tr(M X)`.
pub fn bias_trace<T: Real>(game: &QuantumXorGame<T>, x: &Correlation<T>) -> Result<Complex<T>> {
    check_sizes(game, x.n)?;
    let m = game.matrix();
    let dim = x.n * x.n;
    let mut acc = Complex::new(T::zero(), T::zero());
    for r in 0..dim {
        for col in 0..dim {
            acc += m[(r, col)] * x.x[(col, r)];
        }
    }
    Ok(acc)
}

/// Bias of a strategy through its correlation.
pub fn bias<T: Real, S: Strategy<T>>(game: &QuantumXorGame<T>, s: &S) -> Result<Complex<T>> {
    bias_trace(game, &s.correlation())
}

/// `⟨Tr_game[(U ⊠ V)(M ⊗ I)] ψ, ψ⟩`, where `U ⊠ V` is the operator on
/// `(C^n ⊗ C^n) ⊗ (H_A ⊗ H_B)` with block `((i,k),(j,l))` equal to
/// `U_ij ⊗ V_kl`.
pub fn bias_direct<T: Real>(game: &QuantumXorGame<T>, s: &TensorStrategy<T>) -> Result<Complex<T>> {
    check_sizes(game, s.n)?;
    let (n, da, db) = (s.n, s.da, s.db);
    let big = permute_subsystems(&s.u.kronecker(&s.v), &[n, da, n, db], &[0, 2, 1, 3])?;
    let inflated = game.matrix().kronecker(&CMatrix::identity(da * db, da * db));
    let k = partial_trace_game(&(big * inflated), n * n, da * db)?;
    Ok(expectation(&k, &s.psi))
}

/// Commuting-model analogue of [`bias_direct`], built from
/// `(U ⊗ I_n)(I_n ⊗ V)` on `C^n ⊗ H ⊗ C^n`.
pub fn bias_direct_commuting<T: Real>(game: &QuantumXorGame<T>, s: &CommutingStrategy<T>) -> Result<Complex<T>> {
    check_sizes(game, s.n)?;
    let (n, d) = (s.n, s.d);
    let id_n = CMatrix::<T>::identity(n, n);
    let v_right = permute_subsystems(&s.v, &[n, d], &[1, 0])?;
    let product = s.u.kronecker(&id_n) * id_n.kronecker(&v_right);
    let big = permute_subsystems(&product, &[n, d, n], &[0, 2, 1])?;
    let inflated = game.matrix().kronecker(&CMatrix::identity(d, d));
    let k = partial_trace_game(&(big * inflated), n * n, d)?;
    Ok(expectation(&k, &s.psi))
}

/// `(1 + bias) / 2`. Biases within [`Real::default_tol`] outside `[-1, 1]`
/// are clamped.
pub fn success_probability<T: Real>(bias: T) -> Result<T> {
    let tol = T::default_tol();
    if !bias.is_finite() || bias.abs() > T::one() + tol {
        return Err(Error::InvalidArgument(format!(
            "bias {} outside [-1, 1]",
            bias.as_f64()
        )));
    }
    let p = (T::one() + bias) * T::lit(0.5);
    Ok(p.max(T::zero()).min(T::one()))
}

pub fn random_tensor_strategy_with<T: Real, R: Rng + ?Sized>(
    n: usize,
    da: usize,
    db: usize,
    rng: &mut R,
) -> Result<TensorStrategy<T>> {
    if n < 1 {
        return Err(Error::InvalidArgument("game size must be at least 1".into()));
    }
    let u = haar_unitary_with(n * da, rng)?;
    let v = haar_unitary_with(n * db, rng)?;
    let psi = random_unit_vector(da * db, rng)?;
    TensorStrategy::new(n, da, db, u, v, psi)
}

/// Haar-random `U`, `V` and a uniformly random unit `ψ`, deterministic in
/// `seed`.
pub fn random_tensor_strategy<T: Real>(n: usize, da: usize, db: usize, seed: u64) -> Result<TensorStrategy<T>> {
    random_tensor_strategy_with(n, da, db, &mut seeded_rng(seed))
}

/// Random commuting strategy on `C^{dA·dB}`: a random tensor strategy written
/// in commuting form and conjugated by a Haar-random basis change.
pub fn random_commuting_strategy_with<T: Real, R: Rng + ?Sized>(
    n: usize,
    da: usize,
    db: usize,
    rng: &mut R,
) -> Result<CommutingStrategy<T>> {
    let t = random_tensor_strategy_with(n, da, db, rng)?;
    let w = haar_unitary_with(da * db, rng)?;
    CommutingStrategy::from_tensor(&t)?.conjugated(&w)
}

/// Random commuting strategy whose blocks are all diagonal: `U` is a direct
/// sum of `d` Haar-random `n x n` unitaries (one per basis vector of `C^d`),
/// likewise `V`.
pub fn random_diagonal_commuting_strategy_with<T: Real, R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<CommutingStrategy<T>> {
    let mut u = CMatrix::zeros(n * d, n * d);
    let mut v = CMatrix::zeros(n * d, n * d);
    for a in 0..d {
        let ua = haar_unitary_with::<T, R>(n, rng)?;
        let va = haar_unitary_with::<T, R>(n, rng)?;
        for i in 0..n {
            for j in 0..n {
                u[(i * d + a, j * d + a)] = ua[(i, j)];
                v[(i * d + a, j * d + a)] = va[(i, j)];
            }
        }
    }
    let psi = random_unit_vector(d, rng)?;
    CommutingStrategy::new(n, d, u, v, psi)
}

/// Replaces `U` by `λ U`, scaling the correlation by `λ`.
pub fn scale_by_phase<T: Real, S: Strategy<T>>(s: &S, lambda: Complex<T>) -> Result<S> {
    let modulus = lambda.modulus();
    if !modulus.is_finite() || (modulus - T::one()).abs() > T::default_tol() {
        return Err(Error::InvalidArgument(format!(
            "phase must have unit modulus, got {}",
            modulus.as_f64()
        )));
    }
    s.with_unitaries(s.n(), s.alice() * lambda, s.bob().clone())
}

/// Phase making the bias real and nonnegative: `conj(b) / |b|`, or `1` when
/// the bias vanishes.
pub fn optimal_phase<T: Real>(bias: Complex<T>) -> Complex<T> {
    let m = bias.modulus();
    if m <= T::default_epsilon() {
        real(T::one())
    } else {
        bias.conj() / real(m)
    }
}

/// Rotates Alice's unitary so that the bias against `game` becomes `|bias|`.
pub fn phase_adjust<T: Real, S: Strategy<T>>(game: &QuantumXorGame<T>, s: &S) -> Result<(S, Complex<T>)> {
    let lambda = optimal_phase(bias(game, s)?);
    Ok((scale_by_phase(s, lambda)?, lambda))
}

/// Replaces `U` and `V` by their adjoints, realizing `X*`.
pub fn adjoint_strategy<T: Real, S: Strategy<T>>(s: &S) -> Result<S> {
    s.with_unitaries(s.n(), s.alice().adjoint(), s.bob().adjoint())
}

pub fn convex_combine<T: Real, S: Strategy<T>>(s1: &S, s2: &S, lambda: T) -> Result<S> {
    s1.convex_combine(s2, lambda)
}

/// Whether both big unitaries are self-adjoint within `tol`.
pub fn is_observable_strategy<T: Real, S: Strategy<T>>(s: &S, tol: T) -> bool {
    observable_violation(s) <= tol
}

/// `max(|U - U*|, |V - V*|)` entrywise.
pub fn observable_violation<T: Real, S: Strategy<T>>(s: &S) -> T {
    let a = hermitian_violation(s.alice()).unwrap_or_else(|_| T::max_value().unwrap());
    let b = hermitian_violation(s.bob()).unwrap_or_else(|_| T::max_value().unwrap());
    a.max(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{chsh_game, perfect_product_game, random_game};
    use crate::linalg::{c, haar_unitary};

    fn pauli_x() -> CMatrix<f64> {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    fn pauli_z() -> CMatrix<f64> {
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    #[test]
    fn identity_strategy_has_identity_correlation() {
        let s = TensorStrategy::<f64>::identity(3, 2, 2).unwrap();
        assert_eq!(s.correlation().matrix(), &CMatrix::identity(9, 9));
        let mut rng = seeded_rng(1);
        let psi = random_unit_vector(4, &mut rng).unwrap();
        let s = s.with_state(psi).unwrap();
        assert!(max_abs_diff(s.correlation().matrix(), &CMatrix::identity(9, 9)) < 1e-15);
    }

    #[test]
    fn scalar_strategy_correlation() {
        let u = CMatrix::from_element(1, 1, c(0.6, 0.8));
        let v = CMatrix::from_element(1, 1, c(0.0, 1.0));
        let psi = CVector::from_element(1, c(1.0, 0.0));
        let s = TensorStrategy::<f64>::new(1, 1, 1, u, v, psi).unwrap();
        let x = s.correlation();
        assert!((x.matrix()[(0, 0)] - c::<f64>(0.6, 0.8) * c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn random_correlation_matches_explicit_kron() {
        let s = random_tensor_strategy::<f64>(2, 2, 2, 5).unwrap();
        let x = s.correlation();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let op = block(s.alice(), i, j, 2).kronecker(&block(s.bob(), k, l, 2));
                        let expected = expectation(&op, s.state());
                        assert!((x.entry(i, j, k, l) - expected).norm() < 1e-14);
                        assert!(expected.norm() <= 1.0 + 1e-12);
                    }
                }
            }
        }
        assert!(x.operator_norm().unwrap() <= 1.0 + 1e-9);
    }

    #[test]
    fn strategy_validation_errors() {
        let bad_u = CMatrix::<f64>::identity(2, 2) * c(2.0, 0.0);
        let psi = CVector::from_element(1, c(1.0, 0.0));
        assert!(matches!(
            TensorStrategy::new(2, 1, 1, bad_u, CMatrix::identity(2, 2), psi.clone()),
            Err(Error::NotUnitary { .. })
        ));
        let long = CVector::from_element(1, c::<f64>(2.0, 0.0));
        assert!(matches!(
            TensorStrategy::new(2, 1, 1, CMatrix::identity(2, 2), CMatrix::identity(2, 2), long),
            Err(Error::NotUnitVector(_))
        ));
        assert!(matches!(
            TensorStrategy::new(2, 1, 1, CMatrix::identity(3, 3), CMatrix::identity(2, 2), psi),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn commuting_identity_and_tensor_agreement() {
        let s = CommutingStrategy::<f64>::identity(2, 3).unwrap();
        assert_eq!(s.correlation().matrix(), &CMatrix::identity(4, 4));

        let t = random_tensor_strategy::<f64>(2, 2, 3, 8).unwrap();
        let cs = CommutingStrategy::from_tensor(&t).unwrap();
        assert!(cs.correlation().distance(&t.correlation()) < 1e-12);
    }

    #[test]
    fn commuting_scalar_bob_matches_tensor_with_trivial_bob_space() {
        let mut rng = seeded_rng(12);
        let (n, d) = (2, 3);
        let u = haar_unitary_with::<f64, _>(n * d, &mut rng).unwrap();
        let small_v = haar_unitary_with::<f64, _>(n, &mut rng).unwrap();
        let psi = random_unit_vector(d, &mut rng).unwrap();
        let v = small_v.kronecker(&CMatrix::identity(d, d));
        let cs = CommutingStrategy::new(n, d, u.clone(), v, psi.clone()).unwrap();
        let t = TensorStrategy::new(n, d, 1, u, small_v, psi).unwrap();
        assert!(cs.correlation().distance(&t.correlation()) < 1e-12);
    }

    #[test]
    fn diagonal_commuting_matches_index_sum() {
        let mut rng = seeded_rng(3);
        let s = random_diagonal_commuting_strategy_with::<f64, _>(2, 3, &mut rng).unwrap();
        assert_eq!(check_commuting(&s), 0.0);
        let x = s.correlation();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let mut expected = c(0.0, 0.0);
                        for a in 0..3 {
                            expected += s.alice()[(i * 3 + a, j * 3 + a)]
                                * s.bob()[(k * 3 + a, l * 3 + a)]
                                * c(s.state()[a].norm_sqr(), 0.0);
                        }
                        assert!((x.entry(i, j, k, l) - expected).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn commutator_of_pauli_blocks() {
        let u = pauli_x();
        let v = pauli_z();
        assert!((commutation_violation(&u, &v, 1, 2) - 2.0).abs() < 1e-15);
        let psi = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(CommutingStrategy::new(1, 2, u, v, psi), Err(Error::Commutation(_))));
        let scalar = haar_unitary::<f64>(3, 1).unwrap();
        assert_eq!(commutation_violation(&scalar, &scalar, 3, 1), 0.0);
    }

    #[test]
    fn bias_trace_examples() {
        let perfect = perfect_product_game::<f64>(2).unwrap();
        let id = Correlation::new(2, CMatrix::identity(4, 4)).unwrap();
        assert!((bias_trace(&perfect, &id).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((bias_trace(&chsh_game(), &id).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let wrong = Correlation::new(3, CMatrix::identity(9, 9)).unwrap();
        assert!(bias_trace(&perfect, &wrong).is_err());
    }

    #[test]
    fn bias_direct_agrees_with_trace() {
        for seed in 0..20u64 {
            let n = 2 + (seed % 2) as usize;
            let g = random_game::<f64>(n, seed).unwrap();
            let s = random_tensor_strategy::<f64>(n, 1 + (seed % 3) as usize, 1 + (seed / 3 % 3) as usize, seed + 100).unwrap();
            let a = bias_direct(&g, &s).unwrap();
            let b = bias(&g, &s).unwrap();
            assert!((a - b).norm() <= 1e-10);
            assert!(b.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn bias_direct_commuting_agrees_with_trace() {
        let mut rng = seeded_rng(77);
        let g = random_game::<f64>(2, 4).unwrap();
        let s = random_commuting_strategy_with::<f64, _>(2, 2, 2, &mut rng).unwrap();
        let a = bias_direct_commuting(&g, &s).unwrap();
        let b = bias(&g, &s).unwrap();
        assert!((a - b).norm() <= 1e-10);
    }

    #[test]
    fn bias_direct_special_cases() {
        let s = TensorStrategy::<f64>::identity(2, 1, 1).unwrap();
        let perfect = perfect_product_game::<f64>(2).unwrap();
        assert!((bias_direct(&perfect, &s).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let zero = QuantumXorGame::new(CMatrix::zeros(4, 4), 2, false).unwrap();
        let r = random_tensor_strategy::<f64>(2, 2, 2, 1).unwrap();
        assert_eq!(bias_direct(&zero, &r).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn success_probability_examples() {
        assert_eq!(success_probability(1.0).unwrap(), 1.0);
        assert_eq!(success_probability(0.0).unwrap(), 0.5);
        assert_eq!(success_probability(-1.0).unwrap(), 0.0);
        assert!(success_probability(1.5).is_err());
    }

    #[test]
    fn random_strategy_is_deterministic_and_valid() {
        let a = random_tensor_strategy::<f64>(2, 2, 3, 9).unwrap();
        let b = random_tensor_strategy::<f64>(2, 2, 3, 9).unwrap();
        assert_eq!(a, b);
        assert!(unitarity_violation(a.alice()).unwrap() <= 1e-10);
        assert!(a.correlation().operator_norm().unwrap() <= 1.0 + 1e-9);
    }

    #[test]
    fn phase_scaling() {
        let g = random_game::<f64>(2, 2).unwrap();
        let s = random_tensor_strategy::<f64>(2, 2, 2, 3).unwrap();
        let b = bias(&g, &s).unwrap();
        let same = scale_by_phase(&s, c(1.0, 0.0)).unwrap();
        assert_eq!(same, s);
        let neg = scale_by_phase(&s, c(-1.0, 0.0)).unwrap();
        assert!((bias(&g, &neg).unwrap() + b).norm() < 1e-14);
        let (adj, _) = phase_adjust(&g, &s).unwrap();
        let ab = bias(&g, &adj).unwrap();
        assert!(ab.im.abs() < 1e-12 && ab.re >= 0.0);
        assert!((ab.re - b.norm()).abs() < 1e-12);
        assert!(scale_by_phase(&s, c(2.0, 0.0)).is_err());
    }

    #[test]
    fn zero_bias_phase_is_identity() {
        assert_eq!(optimal_phase(c::<f64>(0.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn adjoint_realizes_conjugate_transpose() {
        let s = random_tensor_strategy::<f64>(2, 2, 2, 4).unwrap();
        let x = s.correlation();
        let y = adjoint_strategy(&s).unwrap().correlation();
        assert!(y.distance(&x.adjoint()) <= 1e-12);
        let id = TensorStrategy::<f64>::identity(2, 1, 1).unwrap();
        assert_eq!(adjoint_strategy(&id).unwrap(), id);
    }

    #[test]
    fn convex_combinations() {
        let s1 = random_tensor_strategy::<f64>(2, 2, 1, 1).unwrap();
        let s2 = random_tensor_strategy::<f64>(2, 1, 2, 2).unwrap();
        let (x1, x2) = (s1.correlation(), s2.correlation());
        let full = s1.convex_combine(&s2, 1.0).unwrap();
        assert!(full.correlation().distance(&x1) < 1e-14);
        let mix = s1.convex_combine(&s2, 0.3).unwrap();
        let expected = x1.matrix() * c(0.3, 0.0) + x2.matrix() * c(0.7, 0.0);
        assert!(max_abs_diff(mix.correlation().matrix(), &expected) <= 1e-12);
        let sym = s1.convex_combine(&adjoint_strategy(&s1).unwrap(), 0.5).unwrap();
        assert!(sym.correlation().distance(&x1.hermitian_part()) <= 1e-12);
        assert!(s1.convex_combine(&s2, 1.5).is_err());
        let other = random_tensor_strategy::<f64>(3, 1, 1, 2).unwrap();
        assert!(s1.convex_combine(&other, 0.5).is_err());
    }

    #[test]
    fn commuting_convex_combination() {
        let mut rng = seeded_rng(5);
        let s1 = random_commuting_strategy_with::<f64, _>(2, 2, 1, &mut rng).unwrap();
        let s2 = random_diagonal_commuting_strategy_with::<f64, _>(2, 3, &mut rng).unwrap();
        let mix = s1.convex_combine(&s2, 0.25).unwrap();
        let expected = s1.correlation().matrix() * c(0.25, 0.0) + s2.correlation().matrix() * c(0.75, 0.0);
        assert!(max_abs_diff(mix.correlation().matrix(), &expected) <= 1e-12);
        assert!(check_commuting(&mix) <= 1e-12);
    }

    #[test]
    fn observable_detection() {
        let id = TensorStrategy::<f64>::identity(2, 1, 1).unwrap();
        assert!(is_observable_strategy(&id, 1e-12));
        let iu = scale_by_phase(&id, c(0.0, 1.0)).unwrap();
        assert!(!is_observable_strategy(&iu, 1e-12));
    }
}
