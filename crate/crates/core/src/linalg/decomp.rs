//! Dense decompositions. SVD and Hermitian eigen-decompositions are computed
//! by faer in double precision whatever the scalar type; nalgebra's complex
//! SVD returns inaccurate factors on rank-deficient inputs.

use faer::{c64, Mat, MatRef, Side};
use nalgebra::DVector;
use num_complex::Complex;

use super::{hermitian_violation, real, require_square, CMatrix, CVector, SQRT_CLAMP_TOL};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn to_faer<T: Real>(a: &CMatrix<T>) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |r, col| {
        let z = a[(r, col)];
        c64::new(z.re.as_f64(), z.im.as_f64())
    })
}

fn from_faer<T: Real>(m: MatRef<'_, c64>) -> CMatrix<T> {
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, col| {
        let z = m[(r, col)];
        Complex::new(T::lit(z.re), T::lit(z.im))
    })
}

/// Singular value decomposition `A = U diag(σ) V*` with `σ` descending and
/// square unitary factors.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    pub u: CMatrix<T>,
    pub singular_values: DVector<T>,
    pub v_adjoint: CMatrix<T>,
}

pub fn svd<T: Real>(a: &CMatrix<T>) -> Result<Svd<T>> {
    let dec = to_faer(a)
        .svd()
        .map_err(|_| Error::Decomposition("singular value decomposition did not converge"))?;
    let sigma: Vec<f64> = dec.S().column_vector().iter().map(|z| z.re).collect();
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]));
    let u = from_faer::<T>(dec.U());
    let v = from_faer::<T>(dec.V());
    let k = sigma.len();
    // columns beyond min(rows, cols) keep their order
    let perm = |m: &CMatrix<T>| {
        CMatrix::from_fn(m.nrows(), m.ncols(), |r, col| {
            let src = if col < k { order[col] } else { col };
            m[(r, src)]
        })
    };
    Ok(Svd {
        u: perm(&u),
        singular_values: DVector::from_iterator(k, order.iter().map(|&i| T::lit(sigma[i]))),
        v_adjoint: perm(&v).adjoint(),
    })
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Result<DVector<T>> {
    if a.is_empty() {
        return Ok(DVector::zeros(0));
    }
    Ok(svd(a)?.singular_values)
}

/// Sum of singular values.
pub fn trace_norm<T: Real>(a: &CMatrix<T>) -> Result<T> {
    require_square(a, "trace norm argument")?;
    Ok(singular_values(a)?.sum())
}

/// Largest singular value.
pub fn operator_norm<T: Real>(a: &CMatrix<T>) -> Result<T> {
    Ok(singular_values(a)?
        .iter()
        .fold(T::zero(), |m, s| m.max(*s)))
}

/// Unitary maximizing `Re Tr(U A)`.
///
/// With `A = W Σ Z*` the maximizer is `U = Z W*` and the attained value is
/// `Tr Σ`. The full square factors are used, so a singular `A` still yields a
/// unitary.
pub fn polar_factor<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    require_square(a, "polar factor argument")?;
    let dec = svd(a)?;
    Ok(dec.v_adjoint.adjoint() * dec.u.adjoint())
}

/// Eigenvalues in ascending order with matching eigenvector columns. The
/// input is symmetrized before decomposition.
pub fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> Result<(Vec<T>, CMatrix<T>)> {
    let (values, vectors) = raw_hermitian_eigen(a)?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]));
    let sorted = order.iter().map(|&k| T::lit(values[k])).collect();
    let vectors = CMatrix::from_fn(vectors.nrows(), vectors.ncols(), |r, col| vectors[(r, order[col])]);
    Ok((sorted, vectors))
}

/// Eigenpairs of the Hermitian part in the solver's own order.
fn raw_hermitian_eigen<T: Real>(a: &CMatrix<T>) -> Result<(Vec<f64>, CMatrix<T>)> {
    require_square(a, "Hermitian eigen-decomposition argument")?;
    let half = real(T::lit(0.5));
    let sym = (a + a.adjoint()) * half;
    let eig = to_faer(&sym)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Decomposition("Hermitian eigen-decomposition did not converge"))?;
    let values = eig.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, from_faer(eig.U())))
}

/// Unit eigenvector for the largest eigenvalue of the Hermitian part of `h`,
/// together with that eigenvalue. Ties go to the first vector the
/// decomposition reports.
pub fn top_eigenvector<T: Real>(h: &CMatrix<T>) -> Result<(T, CVector<T>)> {
    let (values, vectors) = raw_hermitian_eigen(h)?;
    if values.is_empty() {
        return Err(Error::Shape("empty matrix has no eigenvector".into()));
    }
    let mut best = 0;
    for k in 1..values.len() {
        if values[k] > values[best] {
            best = k;
        }
    }
    let v = vectors.column(best).into_owned();
    let norm = super::vector_norm(&v);
    Ok((T::lit(values[best]), v / real(norm)))
}

/// Hermitian square root of a PSD matrix.
///
/// Eigenvalues in `[-tol, 0)` are clamped to zero; anything below `-tol` is
/// rejected. Self-adjointness is checked entrywise at `tol`.
pub fn hermitian_sqrt<T: Real>(p: &CMatrix<T>, tol: T) -> Result<CMatrix<T>> {
    let dev = hermitian_violation(p)?;
    if dev > tol {
        return Err(Error::NotSelfAdjoint(dev.as_f64()));
    }
    let (values, vectors) = hermitian_eigen(p)?;
    if let Some(&lowest) = values.first() {
        if lowest < -tol {
            return Err(Error::NotPsd {
                eigenvalue: lowest.as_f64(),
                tol: tol.as_f64(),
            });
        }
    }
    let mut scaled = vectors.clone();
    for (k, lambda) in values.iter().enumerate() {
        let mut col = scaled.column_mut(k);
        col *= real(lambda.max(T::zero()).sqrt());
    }
    Ok(scaled * vectors.adjoint())
}

pub fn hermitian_sqrt_default<T: Real>(p: &CMatrix<T>) -> Result<CMatrix<T>> {
    hermitian_sqrt(p, T::lit(SQRT_CLAMP_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, haar_unitary, max_abs_diff};

    fn diag(values: &[f64]) -> CMatrix<f64> {
        let n = values.len();
        CMatrix::from_fn(n, n, |r, col| if r == col { c(values[r], 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn sqrt_of_identity() {
        let id = CMatrix::<f64>::identity(3, 3);
        let q = hermitian_sqrt(&id, 1e-12).unwrap();
        assert!(max_abs_diff(&q, &id) < 1e-14);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let q = hermitian_sqrt(&diag(&[4.0, 9.0]), 1e-12).unwrap();
        assert!(max_abs_diff(&q, &diag(&[2.0, 3.0])) < 1e-13);
    }

    #[test]
    fn sqrt_of_rotated_quarter() {
        let r = haar_unitary::<f64>(5, 11).unwrap();
        let p = &r * diag(&[0.25; 5]) * r.adjoint();
        let q = hermitian_sqrt(&p, 1e-12).unwrap();
        assert!(max_abs_diff(&(&q * &q), &p) <= 1e-12);
    }

    #[test]
    fn sqrt_clamps_tiny_negative_eigenvalues() {
        let q = hermitian_sqrt(&diag(&[1.0, -1e-12]), 1e-9).unwrap();
        assert!(max_abs_diff(&q, &diag(&[1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn sqrt_rejects_negative_eigenvalue() {
        let err = hermitian_sqrt(&diag(&[1.0, -0.5]), 1e-9).unwrap_err();
        assert!(matches!(err, Error::NotPsd { .. }));
    }

    #[test]
    fn sqrt_rejects_non_hermitian() {
        let mut a = diag(&[1.0, 1.0]);
        a[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_sqrt(&a, 1e-9), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn polar_of_identity_and_minus_identity() {
        let id = CMatrix::<f64>::identity(3, 3);
        let u = polar_factor(&id).unwrap();
        assert!(max_abs_diff(&u, &id) < 1e-14);
        assert!(((&u * &id).trace().re - 3.0).abs() < 1e-14);

        let minus = -CMatrix::<f64>::identity(2, 2);
        let u = polar_factor(&minus).unwrap();
        assert!(max_abs_diff(&u, &minus) < 1e-14);
        assert!(((&u * &minus).trace().re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polar_of_singular_matrix_is_unitary() {
        let a = diag(&[1.0, 0.0, 0.0]);
        let u = polar_factor(&a).unwrap();
        assert!(crate::linalg::is_unitary(&u, 1e-12).unwrap());
        assert!(((&u * &a).trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&CMatrix::<f64>::identity(4, 4)).unwrap() - 4.0).abs() < 1e-14);
        assert!((trace_norm(&diag(&[0.5, -0.5])).unwrap() - 1.0).abs() < 1e-14);
        let phi = CVector::<f64>::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let proj = &phi * phi.adjoint();
        assert!((trace_norm(&proj).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn top_eigenvector_picks_largest() {
        let (value, v) = top_eigenvector(&diag(&[0.1, 0.7, -2.0])).unwrap();
        assert!((value - 0.7).abs() < 1e-14);
        assert!((v[1].norm() - 1.0).abs() < 1e-14);
    }
}
