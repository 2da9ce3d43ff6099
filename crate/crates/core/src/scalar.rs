//! Scalar abstractions.
//!
//! The plaintext estimators are rational functions of integer counts, so they
//! are written against [`Scalar`] and can be evaluated in `f32`, `f64` or exact
//! [`BigRational`](num_rational::BigRational) arithmetic. The hashed estimators
//! solve a fixed-point equation by bisection and need a real [`RealScalar`].

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like numeric type the plaintext estimators are evaluated in.
pub trait Scalar: Num + Clone + Debug + PartialOrd + FromPrimitive + ToPrimitive {
    /// Lossless-as-possible conversion of a non-negative count.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }
}

impl<T> Scalar for T where T: Num + Clone + Debug + PartialOrd + FromPrimitive + ToPrimitive {}

/// Floating point scalar: f32 or f64.
pub trait RealScalar: Scalar + Float {}

impl<T> RealScalar for T where T: Scalar + Float {}

/// Converts a finite `f64` parameter (lambda, tolerances) into `T`.
pub(crate) fn real<T: RealScalar>(x: f64) -> T {
    T::from_f64(x).expect("finite parameter")
}
