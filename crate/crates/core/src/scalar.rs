use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

/// Number type that belief masses are computed in.
///
/// Floating point types compare against small tolerances; exact rationals use
/// zero for both, so every check is exact.
pub trait Scalar: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static {
    /// Slack for "sums to one" and "is not negative" checks.
    fn tolerance() -> Self;

    /// Magnitudes at or below this are treated as zero.
    fn negligible() -> Self;

    fn abs_diff(&self, other: &Self) -> Self {
        if *self >= *other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn negligible() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }

    fn negligible() -> Self {
        1e-7
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn negligible() -> Self {
        BigRational::zero()
    }
}

/// Exact rational from a numerator and denominator.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Sums values in ascending order, so the result does not depend on the order
/// the terms were produced in.
pub(crate) fn ordered_sum<S: Scalar>(mut values: Vec<S>) -> S {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    values.into_iter().fold(S::zero(), |acc, v| acc + v)
}
