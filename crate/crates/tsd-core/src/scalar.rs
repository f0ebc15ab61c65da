//! Real scalar abstraction underlying the whole simulator.
//!
//! Everything numeric is generic over [`Scalar`]; `f64` is the type used by
//! the CLI and the concrete aliases at the crate root. `f32` is supported and
//! exercised in tests, but the tight tolerances of the acceptance checks
//! require `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the core math is generic over.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` constant into the scalar type.
    fn cst(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    /// Lossy view as `f64`, for diagnostics and error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the generic scalar.
pub type C<T> = Complex<T>;

/// `exp(i phi)` for a real phase.
pub fn cis<T: Scalar>(phi: T) -> C<T> {
    C::new(phi.cos(), phi.sin())
}

/// Squared modulus of a complex amplitude.
pub fn norm_sqr<T: Scalar>(z: C<T>) -> T {
    z.re * z.re + z.im * z.im
}
