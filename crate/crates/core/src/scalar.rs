//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the numerics are generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts an integer into the working scalar.
#[inline]
pub fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("integer representable in scalar type")
}

/// Below this argument `coth` switches to its Laurent expansion.
pub const COTH_SERIES_CUTOFF: f64 = 1e-4;

/// Hyperbolic cotangent, accurate near the pole at zero.
///
/// Uses `1/x + x/3 - x^3/45` for `|x| < 1e-4`; the truncation error there is
/// below `2x^5/945`, far under one ulp of `1/x`.
pub fn coth<T: Scalar>(x: T) -> T {
    if x.abs() < lit(COTH_SERIES_CUTOFF) {
        let x2 = x * x;
        x.recip() + x / lit(3.0) - x * x2 / lit(45.0)
    } else {
        x.tanh().recip()
    }
}

/// `b * coth(b r)`, continuous at `b = 0` where it equals `1/r`.
pub fn scaled_coth<T: Scalar>(b: T, r: T) -> T {
    if b == T::zero() {
        r.recip()
    } else {
        b * coth(b * r)
    }
}

/// Positive part `max(x, 0)`.
#[inline]
pub fn pos<T: Scalar>(x: T) -> T {
    x.max(T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coth_series_matches_closed_form_at_cutoff() {
        let x = 1e-4_f64;
        let series = 1.0 / x + x / 3.0 - x.powi(3) / 45.0;
        let closed = 1.0 / x.tanh();
        assert!(((series - closed) / closed).abs() < 1e-12);
        assert_eq!(coth(x * 0.999), {
            let y = x * 0.999;
            1.0 / y + y / 3.0 - y.powi(3) / 45.0
        });
    }

    #[test]
    fn scaled_coth_flat_limit() {
        assert_eq!(scaled_coth(0.0_f64, 0.5), 2.0);
        assert!((scaled_coth(1e-9_f64, 0.5) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let c: f32 = coth(1.0_f32);
        assert!((c - 1.313_035_3).abs() < 1e-6);
    }
}
