use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, NumAssign};

/// Element precision of matrices, factors and preconditioners.
///
/// Exactly two instantiations exist: `f64` (working precision) and `f32`
/// (the reduced precision a preconditioner may be built and applied in).
pub trait Scalar:
    Float + NumAssign + Default + Sum + Debug + Display + Send + Sync + 'static
{
    const NAME: &'static str;

    fn of_f64(v: f64) -> Self;
    fn as_f64(self) -> f64;
}

impl Scalar for f64 {
    const NAME: &'static str = "double";

    #[inline]
    fn of_f64(v: f64) -> Self {
        v
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    const NAME: &'static str = "single";

    #[inline]
    fn of_f64(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}
