//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Display, LowerExp};

use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Real floating-point scalar: `f32` or `f64`.
///
/// All grids, fields and solvers are generic over this trait. Tolerances quoted
/// throughout the documentation refer to `f64`.
pub trait Real: FftNum + Float + FloatConst + Default + Display + LowerExp {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count or index into the scalar type.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Japanese bracket `(1 + x^2)^{1/2}`.
    #[inline]
    fn bracket(self) -> Self {
        (Self::one() + self * self).sqrt()
    }
}

impl Real for f32 {}
impl Real for f64 {}
