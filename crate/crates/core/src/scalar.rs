//! Scalar abstraction shared by the finite-space modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating point type the geometry is computed in: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance used when checking exact identities (normalization, centering).
    fn identity_tol() -> Self;

    /// Converts an `f64` literal; every literal used in this crate is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Scalar for f64 {
    #[inline]
    fn identity_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    #[inline]
    fn identity_tol() -> Self {
        1e-5
    }
}
