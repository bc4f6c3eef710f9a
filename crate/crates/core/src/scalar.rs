//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point type the library computes over (`f32` or `f64`).
///
/// Decompositions are delegated to nalgebra, hence the `RealField` bound;
/// conversions to and from `f64` go through num-traits so that file formats
/// and reports can stay in double precision regardless of the working type.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    /// Entrywise tolerance used when a caller does not pass one explicitly.
    fn default_tol() -> Self;

    /// Converts an `f64` literal into the working type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in working precision")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn default_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn default_tol() -> Self {
        1e-4
    }
}
