//! Scalar abstraction shared by every matrix, measure and lumping routine.
//!
//! Exact work runs over [`BigRational`]; the same code paths accept `f64`
//! (and `f32`) with tolerance-based comparisons.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// `true` when equality comparisons are exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn to_f64(&self) -> f64;

    /// Equality used by every stochasticity and lumpability check.
    fn approx_eq(&self, other: &Self) -> bool;

    /// Zero test used when deciding whether a projected function vanishes.
    fn is_negligible(&self) -> bool;

    /// Text form used by the JSON formats ("num/den" for exact scalars).
    fn to_repr(&self) -> String;

    fn parse_repr(s: &str) -> Option<Self>;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn to_repr(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_repr(s: &str) -> Option<Self> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().ok()?;
        let den: BigInt = den.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    }
}

macro_rules! float_scalar {
    ($t:ty, $eq_tol:expr, $zero_tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn approx_eq(&self, other: &Self) -> bool {
                let scale = <$t>::one().max(self.abs()).max(other.abs());
                (self - other).abs() <= $eq_tol * scale
            }

            fn is_negligible(&self) -> bool {
                self.abs() < $zero_tol
            }

            fn to_repr(&self) -> String {
                format!("{}", self)
            }

            fn parse_repr(s: &str) -> Option<Self> {
                let s = s.trim();
                if let Some((n, d)) = s.split_once('/') {
                    let n: $t = n.trim().parse().ok()?;
                    let d: $t = d.trim().parse().ok()?;
                    return Some(n / d);
                }
                s.parse().ok()
            }
        }
    };
}

float_scalar!(f64, 1e-9, 1e-10);
float_scalar!(f32, 1e-5, 1e-5);

/// Sum of a slice of scalars.
pub fn sum<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, v| acc + v.clone())
}

/// `q^e` for small non-negative exponents.
pub fn pow_usize<T: Scalar>(base: usize, exp: usize) -> T {
    (0..exp).fold(T::one(), |acc, _| acc * T::from_usize(base))
}
