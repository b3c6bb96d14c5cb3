//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the library computes in.
///
/// Implemented for `f32` and `f64`. Text formats use `Display`/`FromStr`,
/// which round-trip losslessly for both.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + LinalgScalar
    + ScalarOperand
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`. Never fails for finite input.
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 converts to every Real")
    }

    fn of_usize(x: usize) -> Self {
        <Self as FromPrimitive>::from_usize(x).expect("usize converts to every Real")
    }

    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("Real converts to f64")
    }

    /// Standard normal density.
    fn std_normal_pdf(self) -> Self {
        let half = Self::of(0.5);
        (-(self * self) * half).exp() / (Self::TAU()).sqrt()
    }

    /// Standard normal cumulative distribution, evaluated in `f64`.
    fn std_normal_cdf(self) -> Self {
        if self == Self::infinity() {
            return Self::one();
        }
        if self == Self::neg_infinity() {
            return Self::zero();
        }
        Self::of(0.5 * libm::erfc(-self.as_f64() / std::f64::consts::SQRT_2))
    }
}

impl Real for f32 {}
impl Real for f64 {}
