use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

/// Field element the linear algebra runs over.
///
/// Exact types (`BigRational`) compare with `==`; floating types treat
/// values within a small absolute tolerance as equal.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn is_negligible(&self) -> bool;

    fn near(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_negligible()
    }

    /// 2^{-k}.
    fn pow2_inv(k: u32) -> Self {
        let mut out = Self::one();
        let half = Self::from_ratio(1, 2);
        for _ in 0..k {
            out = out * half.clone();
        }
        out
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn near(&self, other: &Self) -> bool {
        self == other
    }

    fn pow2_inv(k: u32) -> Self {
        BigRational::new(BigInt::one(), BigInt::one() << k)
    }
}

const FLOAT_TOLERANCE: f64 = 1e-9;

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn is_negligible(&self) -> bool {
        self.abs() < FLOAT_TOLERANCE
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f32 / denom as f32
    }

    fn is_negligible(&self) -> bool {
        f64::from(self.abs()) < 1e-5
    }
}

/// Lossy conversion out of the exact type, used to run exact machines in
/// floating point.
pub trait FromRational: Scalar {
    fn from_rational(r: &BigRational) -> Self;
}

impl FromRational for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

impl FromRational for f64 {
    fn from_rational(r: &BigRational) -> Self {
        num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
}

impl FromRational for f32 {
    fn from_rational(r: &BigRational) -> Self {
        num_traits::ToPrimitive::to_f32(r).unwrap_or(f32::NAN)
    }
}

/// Generic helper: `T::from_usize` without the `Option`.
pub fn from_usize<T: Scalar>(n: usize) -> T {
    let mut out = T::zero();
    let one = T::one();
    // small counts only; avoids requiring FromPrimitive on every scalar
    if n <= 64 {
        for _ in 0..n {
            out = out + one.clone();
        }
        out
    } else {
        let half = from_usize::<T>(n / 2);
        let twice = half.clone() + half;
        if n % 2 == 1 {
            twice + one
        } else {
            twice
        }
    }
}

/// Exact rational from a usize, for counting arguments.
pub fn rational_from_usize(n: usize) -> BigRational {
    BigRational::from_usize(n).expect("usize fits a BigRational")
}
