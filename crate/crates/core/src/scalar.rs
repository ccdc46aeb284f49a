//! Floating-point scalar abstraction shared by the model, the simplex and
//! branch-and-bound.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Numeric type the MILP machinery is generic over. Implemented for `f32`
/// and `f64`; tolerances scale with the type's precision.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Default primal feasibility tolerance.
    const FEAS_TOL: f64;
    /// Default reduced-cost (dual) tolerance.
    const OPT_TOL: f64;
    /// Smallest magnitude accepted as a pivot element.
    const PIVOT_TOL: f64;

    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("scalar conversion")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const FEAS_TOL: f64 = 1e-6;
    const OPT_TOL: f64 = 1e-9;
    const PIVOT_TOL: f64 = 1e-9;
}

impl Scalar for f32 {
    const FEAS_TOL: f64 = 1e-4;
    const OPT_TOL: f64 = 1e-5;
    const PIVOT_TOL: f64 = 1e-5;
}
