//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the simulation is generic over.
///
/// Blanket-implemented for `f32` and `f64`. Complex quantities are always
/// `num_complex::Complex<T>` over this type.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// A tolerance no tighter than what the type can resolve.
    ///
    /// Returns `max(requested, 64·ε)`, so `f64` keeps the requested value and
    /// `f32` degrades gracefully.
    #[inline]
    fn tol(requested: f64) -> Self {
        let floor = Self::epsilon() * Self::of(64.0);
        Self::of(requested).max(floor)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}

#[inline]
pub(crate) fn sech<T: Real>(x: T) -> T {
    // cosh overflows near |x| ~ 710 in f64; sech is zero there anyway.
    let c = x.cosh();
    if c.is_infinite() {
        T::zero()
    } else {
        c.recip()
    }
}
