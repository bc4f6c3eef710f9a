//! Quantum XOR games: game matrices, strategies in the tensor and commuting
//! models, the dilation transforms between them, and see-saw lower bounds on
//! the entangled bias.
//!
//! Everything is generic over the real scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` and `*32` aliases below fix it.

pub mod dilation;
pub mod error;
pub mod game;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod scalar;
pub mod strategy;

pub use error::{Error, ErrorKind, Result};
pub use scalar::Real;

pub use game::QuantumXorGame;
pub use io::AnyStrategy;
pub use strategy::{CommutingStrategy, Correlation, Model, Strategy, TensorStrategy};

pub type Complex64 = num_complex::Complex<f64>;
pub type CMatrix64 = linalg::CMatrix<f64>;
pub type CVector64 = linalg::CVector<f64>;
pub type Game64 = QuantumXorGame<f64>;
pub type TensorStrategy64 = TensorStrategy<f64>;
pub type CommutingStrategy64 = CommutingStrategy<f64>;
pub type Correlation64 = Correlation<f64>;
pub type AnyStrategy64 = AnyStrategy<f64>;
pub type SeesawResult64 = optimize::SeesawResult<f64>;

pub type Game32 = QuantumXorGame<f32>;
pub type TensorStrategy32 = TensorStrategy<f32>;
pub type CommutingStrategy32 = CommutingStrategy<f32>;
