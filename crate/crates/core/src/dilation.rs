//! Constructive transforms on strategies:
//!
//! * observable dilations, turning any strategy into one with self-adjoint
//!   unitaries whose correlation is `(X + X*) / 2`;
//! * symmetrization through the adjoint strategy and a convex combination;
//! * the self-adjoint embedding of a size-`n` correlation `X` into the
//!   size-`2n` corner pattern `W` (`X` and `X*` in opposite corners);
//! * extraction of a size-`n` strategy back out of any strategy realizing
//!   such a `W`, via Halmos dilations of the corner contractions.
//!
//! Doubled local spaces put the new two-level factor directly inside the game
//! index: a block `U_ij` of an observable dilation acts on `C² ⊗ H` with the
//! `C²` index outermost, and the dilated tensor state has entries
//! `ψ̃[(x, a), (y, b)] = δ_xy ψ[a, b] / √2`. Regrouping the tensor factors as
//! `(x, y, a, b)` gives the stacked form `(ψ, 0, 0, ψ) / √2`.

use nalgebra::ComplexField;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    block, canonical_shuffle, from_blocks, operator_norm, real, require_square, set_block, svd,
    CMatrix, CVector, TensorLayout,
};
use crate::scalar::Real;
use crate::strategy::{
    adjoint_strategy, CommutingStrategy, Correlation, Strategy, TensorStrategy,
};

/// Largest entrywise deviation from the corner pattern accepted by the
/// extraction routines (raised to [`Real::default_tol`] in single precision).
pub const EMBEDDING_TOL: f64 = 1e-8;

/// Observable dilation in the tensor model. Local dimensions double; the
/// correlation becomes `(X + X*) / 2`.
pub fn observable_dilation_tensor<T: Real>(s: &TensorStrategy<T>) -> Result<TensorStrategy<T>> {
    let (n, da, db) = (s.n(), s.da(), s.db());
    let u = swap_dilation(s.alice(), n, da)?;
    let v = swap_dilation(s.bob(), n, db)?;
    let (da2, db2) = (2 * da, 2 * db);
    let w = real(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    let mut psi = CVector::zeros(da2 * db2);
    for x in 0..2 {
        for a in 0..da {
            for b in 0..db {
                psi[(x * da + a) * db2 + x * db + b] = s.state()[a * db + b] * w;
            }
        }
    }
    TensorStrategy::new(n, da2, db2, u, v, psi)
}

/// Blocks `[[0, R_ij], [R_ji*, 0]]`: the canonical shuffle of
/// `[[0, R], [R*, 0]]`.
fn swap_dilation<T: Real>(r: &CMatrix<T>, n: usize, bs: usize) -> Result<CMatrix<T>> {
    let dim = n * bs;
    let zero = CMatrix::zeros(dim, dim);
    let outer = from_blocks(&[vec![zero.clone(), r.clone()], vec![r.adjoint(), zero]]);
    canonical_shuffle(&outer, 2, n, bs)
}

/// Observable dilation in the commuting model. The space grows by a factor
/// of four, with
///
/// ```text
/// U_ij = [[0, R_ij, 0, 0], [R_ji*, 0, 0, 0], [0, 0, 0, R_ij], [0, 0, R_ji*, 0]]
/// V_kl = [[0, 0, S_kl, 0], [0, 0, 0, S_kl], [S_lk*, 0, 0, 0], [0, S_lk*, 0, 0]]
/// ```
///
/// and state `(ψ, 0, 0, ψ) / √2`.
pub fn observable_dilation_commuting<T: Real>(s: &CommutingStrategy<T>) -> Result<CommutingStrategy<T>> {
    let (n, d) = (s.n(), s.d());
    let zero = CMatrix::<T>::zeros(d, d);
    let mut u = CMatrix::zeros(4 * n * d, 4 * n * d);
    let mut v = CMatrix::zeros(4 * n * d, 4 * n * d);
    for i in 0..n {
        for j in 0..n {
            let r = block(s.alice(), i, j, d);
            let r_swap = block(s.alice(), j, i, d).adjoint();
            let z = || zero.clone();
            let uij = from_blocks(&[
                vec![z(), r.clone(), z(), z()],
                vec![r_swap.clone(), z(), z(), z()],
                vec![z(), z(), z(), r],
                vec![z(), z(), r_swap, z()],
            ]);
            set_block(&mut u, i, j, &uij);

            let b = block(s.bob(), i, j, d);
            let b_swap = block(s.bob(), j, i, d).adjoint();
            let vij = from_blocks(&[
                vec![z(), z(), b.clone(), z()],
                vec![z(), z(), z(), b],
                vec![b_swap.clone(), z(), z(), z()],
                vec![z(), b_swap, z(), z()],
            ]);
            set_block(&mut v, i, j, &vij);
        }
    }
    let w = real(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    let mut psi = CVector::zeros(4 * d);
    psi.rows_mut(0, d).copy_from(&(s.state() * w));
    psi.rows_mut(3 * d, d).copy_from(&(s.state() * w));
    CommutingStrategy::new(n, 4 * d, u, v, psi)
}

/// `½ s ⊕ ½ adjoint(s)`: realizes `(X + X*) / 2`, so the bias against any
/// self-adjoint game becomes `Re Tr(M X)`.
pub fn symmetrize_strategy<T: Real, S: Strategy<T>>(s: &S) -> Result<S> {
    s.convex_combine(&adjoint_strategy(s)?, T::lit(0.5))
}

/// A size-`n` correlation and the size-`2n` correlation claimed to carry it
/// in the corner pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingWitness<T: Real> {
    pub original: Correlation<T>,
    pub embedded: Correlation<T>,
}

impl<T: Real> EmbeddingWitness<T> {
    /// Largest deviation of `embedded` from `corner_pattern(original)`.
    pub fn deviation(&self) -> T {
        self.embedded.distance(&corner_pattern(&self.original))
    }

    /// Largest entry of `embedded` outside the two corner blocks.
    pub fn off_pattern_mass(&self) -> T {
        off_pattern_mass(&self.embedded)
    }

    pub fn holds(&self, tol: T) -> bool {
        self.deviation() <= tol
    }
}

fn in_corner(n: usize, a: usize, b: usize, c: usize, d: usize) -> bool {
    let top = a < n && b >= n && c < n && d >= n;
    let bottom = a >= n && b < n && c >= n && d < n;
    top || bottom
}

/// The size-`2n` correlation `W` with `W_{(i,j+n),(k,l+n)} = X_{(i,j),(k,l)}`,
/// `W_{(i+n,j),(k+n,l)} = X*_{(i,j),(k,l)}` and zeros elsewhere.
pub fn corner_pattern<T: Real>(x: &Correlation<T>) -> Correlation<T> {
    let n = x.n();
    let big = TensorLayout::new(2 * n);
    let adj = x.adjoint();
    let mut w = CMatrix::zeros(4 * n * n, 4 * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    w[big.index(i, j + n, k, l + n)] = x.entry(i, j, k, l);
                    w[big.index(i + n, j, k + n, l)] = adj.entry(i, j, k, l);
                }
            }
        }
    }
    Correlation::new(2 * n, w).expect("corner pattern has consistent shape")
}

/// Reads `X_{(i,j),(k,l)} = W_{(i,j+n),(k,l+n)}` out of a size-`2n`
/// correlation.
pub fn corner_block<T: Real>(w: &Correlation<T>) -> Result<Correlation<T>> {
    if !w.n().is_multiple_of(2) {
        return Err(Error::Shape(format!("embedded correlation has odd size {}", w.n())));
    }
    let n = w.n() / 2;
    let small = TensorLayout::new(n);
    let mut x = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    x[small.index(i, j, k, l)] = w.entry(i, j + n, k, l + n);
                }
            }
        }
    }
    Correlation::new(n, x)
}

/// Largest entry outside the two corner blocks of a size-`2n` correlation.
pub fn off_pattern_mass<T: Real>(w: &Correlation<T>) -> T {
    let n = w.n() / 2;
    let layout = w.layout();
    let mut worst = T::zero();
    for (r, row) in w.matrix().row_iter().enumerate() {
        for (col, z) in row.iter().enumerate() {
            let (a, b, c, d) = layout.split(r, col);
            if !in_corner(n, a, b, c, d) {
                worst = worst.max(z.modulus());
            }
        }
    }
    worst
}

/// Deviation of `w` from the corner pattern built from its own `(1,4)` corner.
pub fn embedding_deviation<T: Real>(w: &Correlation<T>) -> Result<T> {
    let x = corner_block(w)?;
    Ok(w.distance(&corner_pattern(&x)))
}

/// `[[0, A], [A*, 0]]` on the doubled game index.
fn flip_embed<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let dim = a.nrows();
    let zero = CMatrix::zeros(dim, dim);
    from_blocks(&[vec![zero.clone(), a.clone()], vec![a.adjoint(), zero]])
}

/// Single size-`2n` strategy built from `Ũ = [[0, U], [U*, 0]]` and
/// `Ṽ = [[0, V], [V*, 0]]`. Its correlation carries `X` and `X*` in the
/// corners but also `Z_{(i,j),(k,l)} = ⟨U_ij V_lk* ψ, ψ⟩` and `Z*` in the
/// middle blocks.
pub fn embed_unaveraged<T: Real, S: Strategy<T>>(s: &S) -> Result<S> {
    s.with_unitaries(2 * s.n(), flip_embed(s.alice()), flip_embed(s.bob()))
}

/// Embeds a size-`n` strategy into a size-`2n` strategy whose correlation is
/// exactly the corner pattern of the original correlation.
///
/// The unaveraged embedding is combined half-and-half with the one built from
/// `iU` and `-iV`, whose middle blocks are `-Z` and `-Z*`.
pub fn embed_self_adjoint<T: Real, S: Strategy<T>>(s: &S) -> Result<(S, EmbeddingWitness<T>)> {
    let plain = embed_unaveraged(s)?;
    let i = Complex::new(T::zero(), T::one());
    let rotated = s.with_unitaries(2 * s.n(), flip_embed(&(s.alice() * i)), flip_embed(&(s.bob() * -i)))?;
    let embedded = plain.convex_combine(&rotated, T::lit(0.5))?;
    let witness = EmbeddingWitness {
        original: s.correlation(),
        embedded: embedded.correlation(),
    };
    Ok((embedded, witness))
}

/// Which dilation [`halmos_dilation_with`] builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HalmosVariant {
    /// `[[S, √(I-SS*)], [√(I-S*S), -S*]]`.
    #[default]
    Standard,
    /// Same with `+S*` in the last corner. Not unitary; exists only so the
    /// verification suite can be checked against a known-bad construction.
    FlippedCorner,
}

/// Below this value `1 - σ²` is treated as an exact zero defect.
fn defect_floor<T: Real>() -> T {
    T::default_epsilon() * T::lit(1e3)
}

/// Halmos dilation of a contraction `S ∈ M_n(M_b)`, returned in `M_n(M_2b)`
/// form: block `(i, j)` is
/// `[[S_ij, (√(I-SS*))_ij], [(√(I-S*S))_ij, -S_ji*]]`.
///
/// Both defect operators come from one singular value decomposition of `S`,
/// which keeps `S √(I-S*S) = √(I-SS*) S` at machine precision even when
/// singular values crowd 1.
pub fn halmos_dilation<T: Real>(s: &CMatrix<T>, n: usize, block_dim: usize) -> Result<CMatrix<T>> {
    halmos_dilation_with(s, n, block_dim, HalmosVariant::Standard)
}

pub fn halmos_dilation_with<T: Real>(
    s: &CMatrix<T>,
    n: usize,
    block_dim: usize,
    variant: HalmosVariant,
) -> Result<CMatrix<T>> {
    let dim = require_square(s, "Halmos dilation argument")?;
    if dim != n * block_dim || dim == 0 {
        return Err(Error::Shape(format!(
            "contraction of dimension {dim} is not {n} x {n} blocks of size {block_dim}"
        )));
    }
    let norm = operator_norm(s)?;
    if norm > T::one() + T::default_tol() {
        return Err(Error::NotContraction(norm.as_f64()));
    }
    let (left_defect, right_defect) = defects(s)?;
    let corner = match variant {
        HalmosVariant::Standard => -s.adjoint(),
        HalmosVariant::FlippedCorner => s.adjoint(),
    };
    let outer = from_blocks(&[vec![s.clone(), left_defect], vec![right_defect, corner]]);
    canonical_shuffle(&outer, 2, n, block_dim)
}

/// `(√(I - SS*), √(I - S*S))` from `S = W Σ Z*`.
fn defects<T: Real>(s: &CMatrix<T>) -> Result<(CMatrix<T>, CMatrix<T>)> {
    let dec = svd(s)?;
    let (w, z_adj) = (dec.u, dec.v_adjoint);
    let floor = defect_floor::<T>();
    let root = dec.singular_values.map(|sigma| {
        let gap = (T::one() - sigma) * (T::one() + sigma);
        if gap <= floor {
            T::zero()
        } else {
            gap.sqrt()
        }
    });
    let mut w_scaled = w.clone();
    let mut z_scaled = z_adj.adjoint();
    for (k, r) in root.iter().enumerate() {
        let mut col = w_scaled.column_mut(k);
        col *= real(*r);
        let mut col = z_scaled.column_mut(k);
        col *= real(*r);
    }
    Ok((w_scaled * w.adjoint(), z_scaled * z_adj))
}

fn check_embedding<T: Real, S: Strategy<T>>(s: &S) -> Result<()> {
    if s.n() % 2 != 0 {
        return Err(Error::Shape(format!("embedding strategy has odd size {}", s.n())));
    }
    let deviation = embedding_deviation(&s.correlation())?;
    if deviation > T::lit(EMBEDDING_TOL).max(T::default_tol()) {
        return Err(Error::NotAnEmbedding(deviation.as_f64()));
    }
    Ok(())
}

/// Upper-right super-block `(A_{i, j+n})_{i,j}` of a `2n x 2n` block matrix.
fn corner_contraction<T: Real>(a: &CMatrix<T>, n: usize, bs: usize) -> CMatrix<T> {
    a.view((0, n * bs), (n * bs, n * bs)).into_owned()
}

/// Recovers a size-`n` tensor strategy realizing `X` from a size-`2n`
/// strategy realizing the corner pattern of `X`.
///
/// With `S = (U_{i,j+n})` and `T = (V_{k,l+n})`, both are Halmos-dilated and
/// the state becomes `ψ` in the `(0, 0)` corner of the doubled spaces.
pub fn extract_from_embedding_tensor<T: Real>(s2n: &TensorStrategy<T>) -> Result<TensorStrategy<T>> {
    extract_from_embedding_tensor_with(s2n, HalmosVariant::Standard)
}

pub fn extract_from_embedding_tensor_with<T: Real>(
    s2n: &TensorStrategy<T>,
    variant: HalmosVariant,
) -> Result<TensorStrategy<T>> {
    check_embedding(s2n)?;
    let (n, da, db) = (s2n.n() / 2, s2n.da(), s2n.db());
    let u = halmos_dilation_with(&corner_contraction(s2n.alice(), n, da), n, da, variant)?;
    let v = halmos_dilation_with(&corner_contraction(s2n.bob(), n, db), n, db, variant)?;
    let db2 = 2 * db;
    let mut psi = CVector::zeros(4 * da * db);
    for a in 0..da {
        for b in 0..db {
            psi[a * db2 + b] = s2n.state()[a * db + b];
        }
    }
    TensorStrategy::new(n, 2 * da, db2, u, v, psi)
}

/// Commuting-model extraction. Two dilation stages keep every block of
/// Alice's operator commuting with every block of Bob's:
///
/// 1. `C_ij = diag(S_ij, S_ij)` against `D = Halmos(T)`;
/// 2. `A = Halmos(C)` against `B_kl = diag(D_kl, D_kl)`.
///
/// The space grows by a factor of four and the state is `(ψ, 0, 0, 0)`.
pub fn extract_from_embedding_commuting<T: Real>(s2n: &CommutingStrategy<T>) -> Result<CommutingStrategy<T>> {
    extract_from_embedding_commuting_with(s2n, HalmosVariant::Standard)
}

pub fn extract_from_embedding_commuting_with<T: Real>(
    s2n: &CommutingStrategy<T>,
    variant: HalmosVariant,
) -> Result<CommutingStrategy<T>> {
    check_embedding(s2n)?;
    let (n, d) = (s2n.n() / 2, s2n.d());
    let s = corner_contraction(s2n.alice(), n, d);
    let t = corner_contraction(s2n.bob(), n, d);
    let id2 = CMatrix::<T>::identity(2, 2);

    let dd = halmos_dilation_with(&t, n, d, variant)?;
    let cc = crate::linalg::map_blocks(&s, n, d, |_, _, b| id2.kronecker(b));
    let a = halmos_dilation_with(&cc, n, 2 * d, variant)?;
    let b = crate::linalg::map_blocks(&dd, n, 2 * d, |_, _, blk| id2.kronecker(blk));

    let mut psi = CVector::zeros(4 * d);
    psi.rows_mut(0, d).copy_from(s2n.state());
    CommutingStrategy::new(n, 4 * d, a, b, psi)
}

/// A size-`2n` tensor strategy realizing a corner pattern whose corner
/// contractions are not unitary, unlike the output of [`embed_self_adjoint`].
///
/// Alice holds an arbitrary Haar unitary `[[P, S], [Q, R]]` and Bob the flip
/// embedding of a random strategy. Averaging the four conjugations by
/// `diag(I, aI)` (Alice) and `diag(I, a̅I)` (Bob) over the fourth roots of
/// unity `a` kills every block pair except the two corners, and
/// symmetrizing makes the result self-adjoint.
pub fn generic_corner_strategy_with<T: Real, R: rand::Rng + ?Sized>(
    n: usize,
    da: usize,
    db: usize,
    rng: &mut R,
) -> Result<TensorStrategy<T>> {
    let big_u = crate::linalg::haar_unitary_with::<T, R>(2 * n * da, rng)?;
    let small = crate::strategy::random_tensor_strategy_with::<T, R>(n, da, db, rng)?;
    let big_v = flip_embed(small.bob());
    let phased = |m: &CMatrix<T>, a: Complex<T>| {
        let half = m.nrows() / 2;
        let mut out = m.clone();
        out.view_mut((0, half), (half, half)).iter_mut().for_each(|z| *z *= a.conj());
        out.view_mut((half, 0), (half, half)).iter_mut().for_each(|z| *z *= a);
        out
    };
    let (zero, one) = (T::zero(), T::one());
    let roots = [
        Complex::new(one, zero),
        Complex::new(zero, one),
        Complex::new(-one, zero),
        Complex::new(zero, -one),
    ];
    let copies = roots
        .iter()
        .map(|&a| {
            TensorStrategy::new(2 * n, da, db, phased(&big_u, a), phased(&big_v, a.conj()), small.state().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let half = T::lit(0.5);
    let even = copies[0].convex_combine(&copies[2], half)?;
    let odd = copies[1].convex_combine(&copies[3], half)?;
    symmetrize_strategy(&even.convex_combine(&odd, half)?)
}
