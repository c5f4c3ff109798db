//! Coefficient rings.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. Two instances are
//! provided: [`Rational`] (exact, arbitrary precision) and `f64`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

/// Exact rational numbers.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for rings where `==` is exact equality of real numbers.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    /// `n / d`; panics on `d == 0`.
    fn ratio(n: i64, d: i64) -> Self;
    /// Exact conversion for rationals (every finite double is a dyadic rational).
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    /// Real n-th root, `None` when it does not exist in the ring.
    fn nth_root(&self, n: u32) -> Option<Self>;
    fn parse(s: &str) -> Option<Self>;
    fn to_json(&self) -> Value;

    fn sqrt(&self) -> Option<Self> {
        self.nth_root(2)
    }

    fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if *self > Self::zero() {
            1
        } else {
            -1
        }
    }

    /// Exact zero test for exact rings, `|x| <= tol` otherwise.
    fn is_negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.abs().to_f64() <= tol
        }
    }

    fn powi(&self, n: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..n {
            r = r * self.clone();
        }
        r
    }

    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Some(Self::from_i64(i))
                } else {
                    n.as_f64().and_then(Self::from_f64)
                }
            }
            Value::String(s) => Self::parse(s),
            _ => None,
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        n as f64 / d as f64
    }
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn nth_root(&self, n: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        if *self < 0.0 {
            if n % 2 == 0 {
                return None;
            }
            return Some(-(-self).powf(1.0 / n as f64));
        }
        if n == 2 {
            return Some(f64::sqrt(*self));
        }
        Some(self.powf(1.0 / n as f64))
    }
    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: f64 = n.trim().parse().ok()?;
                let d: f64 = d.trim().parse().ok()?;
                (d != 0.0).then(|| n / d)
            }
            None => s.parse().ok(),
        }
    }
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

fn exact_int_root(x: &BigInt, n: u32) -> Option<BigInt> {
    if x.is_negative() {
        if n % 2 == 0 {
            return None;
        }
        return exact_int_root(&-x, n).map(|r| -r);
    }
    let r = x.nth_root(n);
    (num_traits::pow(r.clone(), n as usize) == *x).then_some(r)
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        BigRational::new(n.into(), d.into())
    }
    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn nth_root(&self, n: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        let num = exact_int_root(self.numer(), n)?;
        let den = exact_int_root(self.denom(), n)?;
        Some(BigRational::new(num, den))
    }
    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().ok()?;
                let d: BigInt = d.trim().parse().ok()?;
                (!Zero::is_zero(&d)).then(|| BigRational::new(n, d))
            }
            None => {
                if let Ok(i) = s.parse::<BigInt>() {
                    return Some(BigRational::from_integer(i));
                }
                s.parse::<f64>().ok().and_then(BigRational::from_float)
            }
        }
    }
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

/// Convert between rings through `f64` (lossy) or exactly when the target is exact.
pub fn convert<A: Scalar, B: Scalar>(x: &A) -> B {
    B::from_f64(x.to_f64()).expect("finite value")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn rational_roots() {
        assert_eq!(q(4, 9).sqrt(), Some(q(2, 3)));
        assert_eq!(q(2, 1).sqrt(), None);
        assert_eq!(q(-8, 27).nth_root(3), Some(q(-2, 3)));
        assert_eq!(q(-4, 1).sqrt(), None);
        assert_eq!(q(512, 1).nth_root(9), Some(q(2, 1)));
    }

    #[test]
    fn parse_and_json() {
        assert_eq!(Rational::parse("-3/6"), Some(q(-1, 2)));
        assert_eq!(Rational::parse("7"), Some(q(7, 1)));
        assert_eq!(Rational::parse("1/0"), None);
        assert_eq!(<f64 as Scalar>::parse("1/4"), Some(0.25));
        assert_eq!(q(1, 2).to_json(), Value::String("1/2".into()));
        assert_eq!(Rational::from_json(&serde_json::json!(3)), Some(q(3, 1)));
        assert_eq!(Rational::from_json(&serde_json::json!("2/4")), Some(q(1, 2)));
    }

    #[test]
    fn float_roots() {
        assert!((Scalar::nth_root(&-8.0f64, 3).unwrap() + 2.0).abs() < 1e-15);
        assert_eq!(Scalar::sqrt(&-1.0f64), None);
    }
}
