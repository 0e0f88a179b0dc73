//! Scalar abstraction for the numeric engine.
//!
//! Everything in the crate is generic over [`Real`] with `f64` as the
//! default. [`f256`] (237-bit significand) is supported for runs whose
//! per-step improvements fall far below double precision, such as long
//! best-response spirals around a marginal-sharing equilibrium.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub use f256::f256;

pub trait Real:
    Copy
    + PartialOrd
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn powf(self, exponent: Self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;
    /// Machine epsilon of the representation.
    fn epsilon() -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn recip(self) -> Self {
        Self::one() / self
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }

    #[inline]
    fn powf(self, exponent: Self) -> Self {
        f64::powf(self, exponent)
    }

    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }

    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    #[inline]
    fn epsilon() -> Self {
        f64::EPSILON
    }
}

impl Real for f256 {
    fn from_f64(x: f64) -> Self {
        f256::from(x)
    }

    fn to_f64(self) -> f64 {
        // f256 offers no narrowing conversion; its shortest decimal form
        // round-trips through the f64 parser with correct rounding.
        format!("{:e}", self).parse().unwrap_or(f64::NAN)
    }

    fn powf(self, exponent: Self) -> Self {
        if self == f256::ZERO {
            return f256::ZERO;
        }
        f256::powf(&self, &exponent)
    }

    fn sqrt(self) -> Self {
        f256::sqrt(self)
    }

    fn abs(self) -> Self {
        f256::abs(&self)
    }

    fn is_finite(self) -> bool {
        f256::is_finite(self)
    }

    fn epsilon() -> Self {
        f256::EPSILON
    }
}

/// Shorthand for converting an `f64` constant into `T`.
#[inline]
pub(crate) fn c<T: Real>(x: f64) -> T {
    T::from_f64(x)
}
