use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field the simplex runs over.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + ToPrimitive {
    /// Values within this distance of zero count as zero.
    fn tolerance() -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Converts an `f64` coefficient (exactly, for rational scalars).
    fn from_f64_value(x: f64) -> Self;

    fn is_positive_tol(&self) -> bool {
        *self > Self::tolerance()
    }

    fn is_negative_tol(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn is_zero_tol(&self) -> bool {
        !self.is_positive_tol() && !self.is_negative_tol()
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64_value(x: f64) -> Self {
        x
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }

    fn from_f64_value(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64_value(x: f64) -> Self {
        BigRational::from_f64(x).expect("finite coefficient")
    }
}
