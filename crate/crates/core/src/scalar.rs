//! Scalar abstraction for the mass-function side of the library.
//!
//! Probability mass functions, convolution, pushforward and the brute-force
//! conditional tables only need ring operations, so they are written once over
//! [`Scalar`] and run in floating point or exact rational arithmetic.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

pub trait Scalar:
    Num + Neg<Output = Self> + Clone + Debug + PartialOrd + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `|self| <= tol`; exact types ignore `tol` and test for zero.
    fn within(&self, tol: f64) -> bool;

    fn is_exact() -> bool {
        false
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn abs_f64(&self) -> f64 {
        self.to_f64_lossy().abs()
    }

    fn from_ratio(num: i64, den: i64) -> Self;
}

impl Scalar for f64 {
    fn within(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for f32 {
    fn within(&self, tol: f64) -> bool {
        (self.abs() as f64) <= tol
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
}

impl Scalar for BigRational {
    fn within(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn is_exact() -> bool {
        true
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl Scalar for Ratio<i64> {
    fn within(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn is_exact() -> bool {
        true
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_types_ignore_tolerance() {
        let tiny = BigRational::from_ratio(1, 1_000_000_000_000_000);
        assert!(!tiny.within(1.0));
        assert!(BigRational::zero().within(0.0));
        assert!(1e-13f64.within(1e-12));
        assert!(!Ratio::<i64>::new(1, 3).within(0.5));
    }

    #[test]
    fn abs_f64_of_negative() {
        assert_eq!((-2.5f64).abs_f64(), 2.5);
        assert_eq!(Ratio::<i64>::new(-1, 2).abs_f64(), 0.5);
        assert_eq!(BigRational::from_ratio(-3, 4).abs_f64(), 0.75);
    }
}
