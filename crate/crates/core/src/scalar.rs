use num_traits::{Float, FloatConst, FromPrimitive, NumCast};
use std::fmt::{Debug, Display};

/// Floating-point coordinate type for the geometry core.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant, panicking only on types that cannot hold it.
    fn lit(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("scalar literal out of range")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
