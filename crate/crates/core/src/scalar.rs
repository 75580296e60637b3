//! Scalar abstraction shared by every module.
//!
//! All numerical routines are written against [`Real`], which is implemented
//! for `f32` and `f64`. The special function that `num-traits` does not
//! provide (`erfc`) is routed to `libm` for each concrete type.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Complementary error function.
    fn erfc(self) -> Self;

    /// Converts an `f64` literal, rounding to the nearest representable value.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal converts to every Real type")
    }

    /// Converts a sample count.
    #[inline]
    fn count(n: u64) -> Self {
        Self::from_u64(n).expect("sample counts convert to every Real type")
    }

    /// Lossy conversion used for error payloads and formatting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

impl Real for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}
