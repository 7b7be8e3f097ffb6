//! Floating-point abstraction shared by every numerical routine.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the simulator is generic over: `f32` or `f64`.
///
/// Atomic energies are differences of numbers near 10^6 GHz, so physics-level
/// work needs `f64`; `f32` is supported for the self-contained numerics.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Machine epsilon as `f64`, handy for tolerance bookkeeping.
    const EPS: f64;

    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    const EPS: f64 = f32::EPSILON as f64;
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for f64 {
    const EPS: f64 = f64::EPSILON;
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
}

/// Shorthand for `T::lit`.
#[inline]
pub fn c<T: Scalar>(x: f64) -> T {
    T::lit(x)
}
