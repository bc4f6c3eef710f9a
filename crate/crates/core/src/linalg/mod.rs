//! Dense complex matrices and the tensor-index plumbing shared by the rest of
//! the crate.
//!
//! Matrices are nalgebra `DMatrix<Complex<T>>`. Every routine here is a pure
//! function of its inputs.

mod decomp;
mod random;
mod reindex;

pub use decomp::{
    hermitian_eigen, hermitian_sqrt, hermitian_sqrt_default, operator_norm, polar_factor,
    singular_values, svd, top_eigenvector, trace_norm, Svd,
};
pub use random::{haar_unitary, haar_unitary_with, random_unit_vector, rng_for_stream, seeded_rng, SeededRng};
pub use reindex::{canonical_shuffle, partial_trace_game, permute_subsystems};

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Eigenvalue clamp tolerance for square roots of nearly-PSD matrices.
pub const SQRT_CLAMP_TOL: f64 = 1e-9;

/// Flattening convention for correlation-shaped matrices of game size `n`.
///
/// The entry indexed by `((i, j), (k, l))` (Alice's block `(i, j)`, Bob's
/// block `(k, l)`) lives at row `i * n + k`, column `j * n + l` (0-based).
/// With this choice `sum M_{(j,i),(l,k)} X_{(i,j),(k,l)}` is the ordinary
/// matrix trace `Tr(M X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorLayout {
    pub n: usize,
}

impl TensorLayout {
    pub fn new(n: usize) -> Self {
        TensorLayout { n }
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    /// `((i, j), (k, l))` to flat `(row, col)`.
    pub fn index(&self, i: usize, j: usize, k: usize, l: usize) -> (usize, usize) {
        (i * self.n + k, j * self.n + l)
    }

    /// Inverse of [`TensorLayout::index`]: `(row, col)` to `(i, j, k, l)`.
    pub fn split(&self, row: usize, col: usize) -> (usize, usize, usize, usize) {
        (row / self.n, col / self.n, row % self.n, col % self.n)
    }
}

pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub fn real<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

pub fn require_square<T: Real>(a: &CMatrix<T>, what: &str) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Shape(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

/// Largest entry modulus.
pub fn max_abs<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |m, z| m.max(z.modulus()))
}

/// Largest entrywise modulus of `a - b`; shapes must agree.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |m, (x, y)| m.max((*x - *y).modulus()))
}

pub fn all_finite<T: Real>(a: &CMatrix<T>) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn vector_norm<T: Real>(v: &CVector<T>) -> T {
    v.iter()
        .fold(T::zero(), |s, z| s + z.modulus_squared())
        .sqrt()
}

/// `max |A*A - I|` entrywise.
pub fn unitarity_violation<T: Real>(a: &CMatrix<T>) -> Result<T> {
    let n = require_square(a, "unitarity check")?;
    let gram = a.adjoint() * a;
    Ok(max_abs_diff(&gram, &CMatrix::identity(n, n)))
}

pub fn is_unitary<T: Real>(a: &CMatrix<T>, tol: T) -> Result<bool> {
    Ok(unitarity_violation(a)? <= tol)
}

/// `max |A - A*|` entrywise.
pub fn hermitian_violation<T: Real>(a: &CMatrix<T>) -> Result<T> {
    require_square(a, "self-adjointness check")?;
    Ok(max_abs_diff(a, &a.adjoint()))
}

/// Block `(bi, bj)` of a matrix partitioned into `bs x bs` blocks.
pub fn block<T: Real>(a: &CMatrix<T>, bi: usize, bj: usize, bs: usize) -> CMatrix<T> {
    a.view((bi * bs, bj * bs), (bs, bs)).into_owned()
}

pub fn set_block<T: Real>(a: &mut CMatrix<T>, bi: usize, bj: usize, b: &CMatrix<T>) {
    let (r, c) = b.shape();
    a.view_mut((bi * r, bj * c), (r, c)).copy_from(b);
}

/// Assembles a matrix from a square grid of equally sized blocks.
pub fn from_blocks<T: Real>(blocks: &[Vec<CMatrix<T>>]) -> CMatrix<T> {
    let nb = blocks.len();
    let (r, c) = blocks[0][0].shape();
    let mut out = CMatrix::zeros(nb * r, blocks[0].len() * c);
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, b) in row.iter().enumerate() {
            set_block(&mut out, bi, bj, b);
        }
    }
    out
}

/// Direct sum `a ⊕ b`.
pub fn direct_sum<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// Applies `f` to every `bs x bs` block of an `n x n` block matrix.
pub fn map_blocks<T: Real, F>(a: &CMatrix<T>, n: usize, bs: usize, f: F) -> CMatrix<T>
where
    F: Fn(usize, usize, &CMatrix<T>) -> CMatrix<T>,
{
    let grid: Vec<Vec<CMatrix<T>>> = (0..n)
        .map(|i| (0..n).map(|j| f(i, j, &block(a, i, j, bs))).collect())
        .collect();
    from_blocks(&grid)
}

/// `⟨A ψ, ψ⟩ = ψ* A ψ`.
pub fn expectation<T: Real>(a: &CMatrix<T>, psi: &CVector<T>) -> Complex<T> {
    psi.dotc(&(a * psi))
}
