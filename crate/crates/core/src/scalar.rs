//! Scalar types the modularity core is generic over.
//!
//! All graph aggregates (edge counts, side-degree sums) are integers; a
//! scalar only enters when they are divided by `L` and scaled by the
//! resolution. `f64` is the production choice, `f32` is supported for
//! memory-constrained sweeps, and [`Exact`] gives bit-exact rational
//! modularity for small fixtures.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

/// Arbitrary-precision rational.
pub type Exact = BigRational;

pub trait Scalar:
    Num + Neg<Output = Self> + Clone + Debug + PartialOrd + Send + Sync + 'static
{
    /// Default acceptance threshold for a move.
    fn default_epsilon() -> Self;

    fn from_count(n: i128) -> Self;

    /// Lossy conversion from a user-supplied real (resolution, tolerance).
    fn from_real(x: f64) -> Option<Self>;

    fn to_real(&self) -> f64;
}

impl Scalar for f64 {
    fn default_epsilon() -> Self {
        1e-12
    }

    fn from_count(n: i128) -> Self {
        n as f64
    }

    fn from_real(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_real(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    // f32 cannot resolve 1e-12; anything below ~1e-7 relative is noise.
    fn default_epsilon() -> Self {
        1e-6
    }

    fn from_count(n: i128) -> Self {
        n as f32
    }

    fn from_real(x: f64) -> Option<Self> {
        x.is_finite().then_some(x as f32)
    }

    fn to_real(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for Exact {
    fn default_epsilon() -> Self {
        Exact::zero()
    }

    fn from_count(n: i128) -> Self {
        Exact::from_integer(BigInt::from(n))
    }

    fn from_real(x: f64) -> Option<Self> {
        Exact::from_f64(x)
    }

    fn to_real(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_from_real_is_exact_for_dyadics() {
        let half = Exact::from_real(2.5).unwrap();
        assert_eq!(half, Exact::new(BigInt::from(5), BigInt::from(2)));
        assert_eq!(half.to_real(), 2.5);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(f64::from_real(f64::NAN).is_none());
        assert!(f32::from_real(f64::INFINITY).is_none());
    }
}
