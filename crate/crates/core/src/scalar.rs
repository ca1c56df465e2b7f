//! Floating-point abstraction shared by every evaluator.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar usable by the kernel: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Determinants (and conditional variances, relative to the prior
    /// variance) below this value are treated as exactly zero.
    fn singular_eps() -> Self;

    /// Slack used by every feasibility check.
    fn feas_tol() -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn singular_eps() -> Self {
        1e-12
    }
    fn feas_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn singular_eps() -> Self {
        1e-6
    }
    fn feas_tol() -> Self {
        1e-5
    }
}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cre<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn log2<T: Real>(x: T) -> T {
    x.log2()
}
