//! Scalar abstraction for the numerical kernels.
//!
//! Everything in this crate is generic over a real scalar type. The bound
//! combines `nalgebra`'s [`RealField`] (elementary functions, linear algebra)
//! with `num-traits`' [`FromPrimitive`] (literal conversion), and is satisfied
//! by `f32` and `f64`.

use nalgebra::RealField;
use num_traits::FromPrimitive;

/// Real scalar type usable throughout the crate.
///
/// The blanket impl makes any qualifying type (in practice `f32`/`f64`) a
/// [`Scalar`] automatically.
pub trait Scalar: RealField + FromPrimitive + Copy + Default + Send + Sync {
    /// Convert an `f64` literal into this scalar type.
    ///
    /// Panics only if the conversion is unrepresentable, which cannot happen
    /// for finite literals with `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal must convert")
    }

    /// Convert back to `f64` (used for reporting and serialization).
    fn to_f64(self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}
