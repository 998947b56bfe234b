//! Exact rational numbers used for every distance value.
//!
//! Values are stored in canonical reduced form and printed as `"3"` or
//! `"1/2"`. Parsing accepts integers, `p/q` fractions and finite decimals,
//! the latter converted exactly (`"0.5"` becomes `1/2`).

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// An arbitrary-precision rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(value: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(value)))
    }

    /// Builds `numer / denom`, reducing to canonical form.
    ///
    /// Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Exactly half of this value.
    pub fn half(&self) -> Self {
        Rational(&self.0 / BigRational::from_integer(BigInt::from(2)))
    }

    /// Scales by an integer factor.
    pub fn scale(&self, factor: i64) -> Self {
        Rational(&self.0 * BigRational::from_integer(BigInt::from(factor)))
    }

    /// Midpoint of `self` and `other`.
    pub fn midpoint(&self, other: &Rational) -> Self {
        Rational(&self.0 + &other.0).half()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// Lossy conversion for display purposes only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<BigRational> for Rational {
    fn from(value: BigRational) -> Self {
        Rational(value)
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::from_integer(value)
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_integer(digits: &str, original: &str) -> Result<BigInt, ParseRationalError> {
    let body = digits.strip_prefix(['+', '-']).unwrap_or(digits);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Invalid(original.to_string()));
    }
    digits
        .trim_start_matches('+')
        .parse::<BigInt>()
        .map_err(|_| ParseRationalError::Invalid(original.to_string()))
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        if text.is_empty() {
            return Err(ParseRationalError::Empty);
        }

        if let Some((numer, denom)) = text.split_once('/') {
            let numer = parse_integer(numer.trim(), s)?;
            let denom = parse_integer(denom.trim(), s)?;
            if denom.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            return Ok(Rational(BigRational::new(numer, denom)));
        }

        if let Some((whole, frac)) = text.split_once('.') {
            let negative = whole.starts_with('-');
            let whole_digits = whole.trim_start_matches(['+', '-']);
            if (whole_digits.is_empty() && frac.is_empty())
                || !whole_digits.bytes().all(|b| b.is_ascii_digit())
                || !frac.bytes().all(|b| b.is_ascii_digit())
                || whole.len() - whole_digits.len() > 1
            {
                return Err(ParseRationalError::Invalid(s.to_string()));
            }
            let combined = format!("{}{}", whole_digits, frac);
            let numer: BigInt = combined
                .parse()
                .map_err(|_| ParseRationalError::Invalid(s.to_string()))?;
            let denom = num_traits::pow(BigInt::from(10), frac.len());
            let value = BigRational::new(numer, denom);
            return Ok(Rational(if negative { -value } else { value }));
        }

        Ok(Rational(BigRational::from_integer(parse_integer(text, s)?)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Accepts strings and JSON integers; floats are refused since they are
/// not exact.
struct RationalVisitor;

impl serde::de::Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a rational as a string (\"3\", \"1/2\", \"0.25\") or an integer")
    }

    fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Rational, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(Rational::from_integer(v))
    }

    fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Rational, E> {
        Ok(Rational(BigRational::from_integer(BigInt::from(v))))
    }

    fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Rational, E> {
        Err(E::custom(format!("float {v} is not exact; write it as a string such as \"{v}\"")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(r("3"), Rational::from_integer(3));
        assert_eq!(r("2/4"), Rational::new(1, 2));
        assert_eq!(r("0.5"), Rational::new(1, 2));
        assert_eq!(r("1.25"), Rational::new(5, 4));
        assert_eq!(r(".5"), Rational::new(1, 2));
        assert_eq!(r("-0.75"), Rational::new(-3, 4));
        assert_eq!(r("6/-4"), Rational::new(-3, 2));
        assert_eq!(r(" 7 "), Rational::from_integer(7));
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!("".parse::<Rational>(), Err(ParseRationalError::Empty));
        assert!(matches!("1/0".parse::<Rational>(), Err(ParseRationalError::ZeroDenominator(_))));
        for bad in ["abc", "1.2.3", "1/", "--1", "1e3", ".", "0x10", "1/2/3"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn displays_canonically() {
        assert_eq!(Rational::new(6, 4).to_string(), "3/2");
        assert_eq!(Rational::new(-6, 3).to_string(), "-2");
        assert_eq!(Rational::zero().to_string(), "0");
    }

    #[test]
    fn arithmetic_is_exact() {
        let third = Rational::new(1, 3);
        let sum = &(&third + &third) + &third;
        assert_eq!(sum, Rational::one());
        assert_eq!(&Rational::one() - &third, Rational::new(2, 3));
        assert_eq!(Rational::from_integer(3).half(), Rational::new(3, 2));
        assert_eq!(Rational::new(1, 2).midpoint(&Rational::one()), Rational::new(3, 4));
        assert!(Rational::new(1, 3) < Rational::new(1, 2));
    }

    #[test]
    fn serde_uses_strings() {
        let json = serde_json::to_string(&Rational::new(1, 2)).unwrap();
        assert_eq!(json, "\"1/2\"");
        let back: Rational = serde_json::from_str("\"0.25\"").unwrap();
        assert_eq!(serde_json::from_str::<Rational>("4").unwrap(), Rational::from_integer(4));
        assert!(serde_json::from_str::<Rational>("0.5").is_err());
        assert_eq!(back, Rational::new(1, 4));
    }
}
