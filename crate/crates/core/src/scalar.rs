//! Scalar types the matrix algebra is generic over.
//!
//! Gaussian-integer matrices use a signed integer scalar (`i64`) and every
//! operation on them is bit-exact. Floating matrices use `f64` (or `f32`).
//! Checks that compare against zero go through [`Scalar::is_negligible`], which
//! ignores the tolerance for exact scalars.

use std::fmt::{Debug, Display};

use num_traits::{NumAssign, NumCast, Signed, ToPrimitive};

pub trait Scalar:
    NumAssign + Signed + NumCast + ToPrimitive + PartialOrd + Copy + Debug + Display + Send + Sync + 'static
{
    /// True when arithmetic on this type never rounds.
    const EXACT: bool;

    /// `|self| <= tol` for floats, `self == 0` for exact types.
    fn is_negligible(self, tol: f64) -> bool;

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! exact_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            const EXACT: bool = true;

            #[inline]
            fn is_negligible(self, _tol: f64) -> bool {
                self == 0
            }
        }
    )*};
}

macro_rules! float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            const EXACT: bool = false;

            #[inline]
            fn is_negligible(self, tol: f64) -> bool {
                (self as f64).abs() <= tol
            }
        }
    )*};
}

exact_scalar!(i32, i64, i128);
float_scalar!(f32, f64);

/// Scalars that support rounding-sensitive numerics (LU, square roots).
pub trait RealField: Scalar + num_traits::Float {}

impl RealField for f32 {}
impl RealField for f64 {}
