use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

use crate::symexpr::Rational;

/// Floating-point type used when expressions are evaluated at a point.
///
/// Symbolic work is always exact over [`Rational`]; a `Scalar` only enters
/// at evaluation time.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn from_rational(r: &Rational) -> Self {
        Self::from_f64(r.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(Self::nan)
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::nan)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
