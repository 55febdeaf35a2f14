//! Floating-point bound shared by the numerical core.
//!
//! Every generic routine in this crate is written against [`Scalar`] rather
//! than `f64` directly, so the same code runs in single precision when memory
//! bandwidth matters more than the last few digits. Tolerances that are tied
//! to double precision go through [`Scalar::tol`], which clamps them to a few
//! machine epsilons of the active type.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type usable by the estimators.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Send
    + Sync
    + Debug
    + Display
    + 'static
{
    /// Converts an `f64` literal. Every value used in this crate is
    /// representable (possibly rounded) in both `f32` and `f64`.
    #[inline(always)]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count.
    #[inline(always)]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Widening conversion used for reporting and serialization.
    #[inline(always)]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// A tolerance requested at double precision, clamped from below to
    /// `mult` machine epsilons of `Self`.
    #[inline]
    fn tol(requested: f64, mult: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(mult);
        Self::lit(requested).max(floor)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over a [`Scalar`].
pub type Cx<F> = Complex<F>;

#[inline(always)]
pub(crate) fn cx<F: Scalar>(re: F, im: F) -> Cx<F> {
    Complex::new(re, im)
}

#[inline(always)]
pub(crate) fn real<F: Scalar>(re: F) -> Cx<F> {
    Complex::new(re, F::zero())
}

#[inline]
pub(crate) fn is_finite_cx<F: Scalar>(z: Cx<F>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
