//! Scalar abstractions.
//!
//! Path algebra (interpolation, signatures, Chen products) only needs field
//! operations, so it is written against [`Scalar`] and works for `f32`, `f64`
//! and exact rationals alike. Anything that takes square roots or compares
//! against tolerances (regression, simulation) requires [`Real`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// A field element usable as a path coordinate or signature coefficient.
pub trait Scalar: Clone + Debug + PartialOrd + NumAssign + FromPrimitive + Send + Sync + 'static {
    /// `false` for NaN and infinities; always `true` for exact types.
    fn is_finite_value(&self) -> bool;

    /// Nearest `f64`, used for reporting only.
    fn to_f64_lossy(&self) -> f64;

    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable in every scalar type")
    }
}

/// Floating-point scalars.
pub trait Real: Scalar + Float {
    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts to any float")
    }
}

impl<T: Scalar + Float> Real for T {}

macro_rules! float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }
            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
        }
    )*};
}

float_scalar!(f32, f64);

impl Scalar for Ratio<i64> {
    fn is_finite_value(&self) -> bool {
        true
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for BigRational {
    fn is_finite_value(&self) -> bool {
        true
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Exact rational from a numerator/denominator pair.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
