//! Construction, verification and evaluation of single-symbol decodable
//! space-time block codes with unitary weight matrices on 2^a antennas.
//!
//! The algebra is generic over the scalar type: Gaussian-integer matrices
//! (`CMatrix<i64>`) keep every construction and condition check exact, while
//! `CMatrix<f64>` carries rotated constellations and channel simulation.

pub mod clifford;
pub mod codinggain;
pub mod error;
pub mod gaussian;
pub mod matrix;
pub mod rank;
pub mod scalar;
pub mod simulator;
pub mod stbc;
pub mod verifier;

pub use error::{Error, Result};
pub use gaussian::{GaussianMatrix, Mode};
pub use matrix::{CMatrix, Unit};
pub use scalar::{RealField, Scalar};

/// Gaussian-integer matrix; all arithmetic is bit-exact.
pub type ExactMatrix = CMatrix<i64>;
/// Double-precision complex matrix.
pub type FloatMatrix = CMatrix<f64>;
/// Single-precision complex matrix.
pub type FloatMatrix32 = CMatrix<f32>;
