//! Scalar abstractions.
//!
//! Geometry and quadrature are written against [`Real`] (implemented for
//! `f32` and `f64`). Space coefficients only need [`Coefficient`], which is
//! also implemented for exact rationals so that products of integer spaces
//! stay exact.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, DivAssign, Mul, MulAssign, SubAssign};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FloatConst, FromPrimitive, One, ToPrimitive, Zero};

/// Squared metric coefficient of a space.
pub trait Coefficient:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Strictly positive and finite.
    fn is_valid_weight(&self) -> bool;

    fn to_f64(&self) -> f64;

    /// Whether the value is an integer (exact fast path detection).
    fn is_integral(&self) -> bool;
}

macro_rules! impl_float_coefficient {
    ($($t:ty)*) => ($(
        impl Coefficient for $t {
            fn is_valid_weight(&self) -> bool {
                self.is_finite() && *self > 0.0
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn is_integral(&self) -> bool {
                self.is_finite() && self.fract() == 0.0
            }
        }
    )*)
}

impl_float_coefficient!(f32 f64);

impl Coefficient for Ratio<i64> {
    fn is_valid_weight(&self) -> bool {
        *self > Ratio::zero()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

impl Coefficient for BigRational {
    fn is_valid_weight(&self) -> bool {
        *self > BigRational::zero()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

/// Floating point scalar used by the geometric and numerical code.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Coefficient
    + Display
    + LowerExp
    + Sum
    + Product
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Default
{
    /// Literal conversion, `T::lit(0.5)` instead of `T::from_f64(0.5).unwrap()`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact conversion of an integer into a big rational.
pub fn big_rational(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}
