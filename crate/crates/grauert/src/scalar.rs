//! Scalar abstraction: the numeric core is generic over the floating type.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating scalar the whole crate is generic over.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, for literals and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal converts to any Scalar")
    }

    /// Conversion from `usize` counters.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to any Scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
