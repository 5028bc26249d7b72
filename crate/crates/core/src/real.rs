//! Scalar abstraction for the simulation core.
//!
//! Everything numeric in this crate is generic over [`Real`], so the same
//! code runs in `f32` or `f64`. The crate root exports `f64` aliases, which
//! is what the CLI and the test suites use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Display
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal must be representable")
}

/// 2π in the working scalar.
#[inline]
pub fn tau<T: Real>() -> T {
    lit(std::f64::consts::TAU)
}

/// π in the working scalar.
#[inline]
pub fn pi<T: Real>() -> T {
    lit(std::f64::consts::PI)
}

/// Wraps an angle into `[0, 2π)`.
#[inline]
pub fn wrap_angle<T: Real>(a: T) -> T {
    let t = tau::<T>();
    let r = a % t;
    if r < T::zero() {
        r + t
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_range() {
        for &a in &[-10.0f64, -0.1, 0.0, 0.1, 6.2, 6.3, 100.0] {
            let w = wrap_angle(a);
            assert!((0.0..std::f64::consts::TAU).contains(&w), "{a} -> {w}");
        }
        assert_eq!(wrap_angle(0.0f64), 0.0);
        assert!((wrap_angle(std::f64::consts::TAU + 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lit_is_exact_for_f64() {
        assert_eq!(lit::<f64>(9.81), 9.81);
        assert_eq!(lit::<f32>(0.5), 0.5f32);
    }
}
