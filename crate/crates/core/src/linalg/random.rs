use nalgebra::linalg::QR;
use nalgebra::ComplexField;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{real, vector_norm, CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// Generator behind every seeded routine in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent deterministic stream `stream` derived from `seed`.
pub fn rng_for_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re * scale), T::lit(im * scale))
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_unitary_with<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix<T>> {
    if dim < 1 {
        return Err(Error::InvalidArgument("unitary dimension must be at least 1".into()));
    }
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian::<T, R>(rng));
    let qr = QR::new(g);
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let d = r[(k, k)];
        let m = d.modulus();
        let phase = if m > T::zero() { d / real(m) } else { real(T::one()) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    Ok(q)
}

pub fn haar_unitary<T: Real>(dim: usize, seed: u64) -> Result<CMatrix<T>> {
    haar_unitary_with(dim, &mut seeded_rng(seed))
}

/// Uniformly distributed unit vector in `C^dim`.
pub fn random_unit_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CVector<T>> {
    if dim < 1 {
        return Err(Error::InvalidArgument("vector dimension must be at least 1".into()));
    }
    let v = CVector::from_fn(dim, |_, _| gaussian::<T, R>(rng));
    let norm = vector_norm(&v);
    Ok(v / real(norm))
}
