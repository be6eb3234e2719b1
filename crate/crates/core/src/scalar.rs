//! Scalar fields: exact rationals and binary64 floats.
//!
//! Every algebra, form and pencil carries a single scalar kind. There is no
//! mixed arithmetic; a rational object is promoted explicitly with
//! [`Scalar::to_f64`] or the `to_float` helpers on the containers.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Exact rational numbers.
pub type Q = BigRational;

/// Relative equality tolerance used by float predicates.
pub const EPS_EQ: f64 = 1e-9;

/// Float coefficients below this magnitude are dropped from sparse storage.
pub const FLOAT_DROP: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Rational,
    Float,
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::Rational => f.write_str("rational"),
            ScalarKind::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const KIND: ScalarKind;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn to_f64(&self) -> f64;

    /// Whether the value is dropped from sparse storage.
    fn negligible(&self) -> bool;

    /// Zero test relative to `scale`; exact for rationals.
    fn near_zero(&self, tol: f64, scale: f64) -> bool;

    /// Equality; exact for rationals, relative `tol` for floats.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// Square root when it exists in the field (perfect squares for rationals).
    fn sqrt_exact(&self) -> Option<Self>;

    fn abs(&self) -> Self;

    /// Sign as -1, 0 or 1 (exact for rationals).
    fn sign(&self) -> i32 {
        let v = self.to_f64();
        if self.is_zero() {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    }

    fn powi(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    /// Basis of the right null space of `a`, one vector per element.
    fn nullspace(a: &Matrix<Self>) -> Vec<Vec<Self>>;

    fn rank(a: &Matrix<Self>) -> usize;

    /// Parses `"p/q"`, integers and decimals.
    fn parse(text: &str) -> Result<Self>;

    /// Conversion from a float; `None` when it cannot be represented faithfully.
    fn from_f64(v: f64) -> Option<Self>;

    /// Exact rational value; floats go through their shortest decimal form.
    fn to_rational(&self) -> Option<Q>;
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn negligible(&self) -> bool {
        f64::abs(*self) < FLOAT_DROP
    }

    fn near_zero(&self, tol: f64, scale: f64) -> bool {
        f64::abs(*self) <= tol * scale.max(f64::MIN_POSITIVE)
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = 1f64.max(f64::abs(*self)).max(f64::abs(*other));
        f64::abs(self - other) <= tol * scale
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(f64::sqrt(*self))
        }
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn nullspace(a: &Matrix<Self>) -> Vec<Vec<Self>> {
        linalg::svd_nullspace(a, linalg::SVD_REL_THRESHOLD)
    }

    fn rank(a: &Matrix<Self>) -> usize {
        linalg::svd_rank(a, linalg::SVD_REL_THRESHOLD)
    }

    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((p, q)) = text.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad number `{text}`")))?;
            let q: f64 = q.trim().parse().map_err(|_| Error::Parse(format!("bad number `{text}`")))?;
            if q == 0.0 {
                return Err(Error::Parse(format!("zero denominator in `{text}`")));
            }
            Ok(p / q)
        } else {
            text.parse().map_err(|_| Error::Parse(format!("bad number `{text}`")))
        }
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_rational(&self) -> Option<Q> {
        <Q as Scalar>::from_f64(*self)
    }
}

impl Scalar for Q {
    const KIND: ScalarKind = ScalarKind::Rational;

    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Q::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn negligible(&self) -> bool {
        self.is_zero()
    }

    fn near_zero(&self, _tol: f64, _scale: f64) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer();
        let d = self.denom();
        let rn = n.sqrt();
        let rd = d.sqrt();
        (&rn * &rn == *n && &rd * &rd == *d).then(|| Q::new(rn, rd))
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn sign(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }

    fn nullspace(a: &Matrix<Self>) -> Vec<Vec<Self>> {
        linalg::rref_nullspace(a)
    }

    fn rank(a: &Matrix<Self>) -> usize {
        linalg::rref_rank(a)
    }

    fn parse(text: &str) -> Result<Self> {
        parse_rational(text)
    }

    fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        // Round-trip through the shortest decimal representation so that
        // 0.1 becomes 1/10 rather than its binary expansion.
        parse_rational(&format!("{v}")).ok()
    }

    fn to_rational(&self) -> Option<Q> {
        Some(self.clone())
    }
}

/// Parses an exact rational from `"p/q"`, an integer, or a decimal literal
/// (optionally with exponent).
pub fn parse_rational(text: &str) -> Result<Q> {
    let text = text.trim();
    let bad = || Error::Parse(format!("bad rational `{text}`"));
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{text}`")));
        }
        return Ok(Q::new(p, q));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(bad());
    }
    let value = BigInt::from_str(&digits).map_err(|_| bad())?;
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Q::from_integer(value * num_traits::pow(ten, shift as usize))
    } else {
        Q::new(value, num_traits::pow(ten, (-shift) as usize))
    })
}

/// Converts a rational to the `"p/q"` text used in JSON files.
pub fn rational_text(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6").unwrap(), Q::from_ratio(1, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), Q::from_ratio(-1, 8));
        assert_eq!(parse_rational("12").unwrap(), Q::from_i64(12));
        assert_eq!(parse_rational("1.5e2").unwrap(), Q::from_i64(150));
        assert_eq!(parse_rational("25e-2").unwrap(), Q::from_ratio(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn rational_denominators_are_reduced_and_positive() {
        let q = Q::from_ratio(4, -6);
        assert_eq!(q.denom(), &BigInt::from(3));
        assert_eq!(q.numer(), &BigInt::from(-2));
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(Q::from_ratio(9, 4).sqrt_exact(), Some(Q::from_ratio(3, 2)));
        assert_eq!(Q::from_i64(2).sqrt_exact(), None);
        assert_eq!(Q::from_i64(-4).sqrt_exact(), None);
        assert_eq!(Q::from_i64(0).sqrt_exact(), Some(Q::zero()));
    }

    #[test]
    fn float_from_decimal_is_exact_decimal() {
        assert_eq!(<Q as Scalar>::from_f64(0.1).unwrap(), Q::from_ratio(1, 10));
        assert_eq!(rational_text(&Q::from_ratio(-7, 3)), "-7/3");
        assert_eq!(rational_text(&Q::from_i64(5)), "5");
    }

    #[test]
    fn float_tolerance_is_relative() {
        assert!(1e6f64.approx_eq(&(1e6 + 1e-4), EPS_EQ));
        assert!(!1e6f64.approx_eq(&(1e6 + 1.0), EPS_EQ));
        assert!(1e-15f64.negligible());
        assert!(!1e-13f64.negligible());
    }
}
