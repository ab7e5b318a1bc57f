//! Points of the extended real line `ℝ̄ = ℝ ∪ {−∞, +∞}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of `ℝ̄`. Finite points are exact rationals, so equality and
/// ordering never need a tolerance.
///
/// The derived ordering is the natural one: `−∞ < every finite < +∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedReal {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl ExtendedReal {
    pub fn from_int(v: i64) -> Self {
        ExtendedReal::Finite(BigRational::from_integer(v.into()))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        ExtendedReal::Finite(BigRational::new(numer.into(), denom.into()))
    }

    /// Exact rational value of a finite float. Returns `None` for NaN.
    pub fn from_f64(x: f64) -> Option<Self> {
        if x.is_nan() {
            None
        } else if x == f64::INFINITY {
            Some(ExtendedReal::PosInf)
        } else if x == f64::NEG_INFINITY {
            Some(ExtendedReal::NegInf)
        } else {
            BigRational::from_float(x).map(ExtendedReal::Finite)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::PosInf => f64::INFINITY,
            ExtendedReal::Finite(v) => v.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Translate a finite point; infinities are fixed.
    pub fn shifted(&self, by: &BigRational) -> Self {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(v + by),
            other => other.clone(),
        }
    }

    /// `|x|` on `ℝ̄`, with `|±∞| = +∞`.
    pub fn abs(&self) -> Self {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(v.abs()),
            _ => ExtendedReal::PosInf,
        }
    }
}

impl From<BigRational> for ExtendedReal {
    fn from(v: BigRational) -> Self {
        ExtendedReal::Finite(v)
    }
}

impl From<i64> for ExtendedReal {
    fn from(v: i64) -> Self {
        ExtendedReal::from_int(v)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => f.write_str("-inf"),
            ExtendedReal::PosInf => f.write_str("+inf"),
            ExtendedReal::Finite(v) => f.write_str(&format_rational(v)),
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "∞" | "+∞" | "Infinity" | "+Infinity" => Ok(ExtendedReal::PosInf),
            "-inf" | "-∞" | "−∞" | "-Infinity" => Ok(ExtendedReal::NegInf),
            other => parse_rational(other).map(ExtendedReal::Finite),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse `"p/q"`, an integer, or a plain decimal such as `"-0.125"` into an
/// exact rational. Decimals are read digit by digit, never through `f64`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::parse("empty number"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad numerator in {s:?}")))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(Error::parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }

    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::parse(format!("not a number: {s:?}")));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(format!("not a number: {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| Error::parse(format!("not a number: {s:?}")))?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = BigRational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Integers print bare, terminating decimals print as decimals, everything
/// else prints as `p/q`.
pub fn format_rational(v: &BigRational) -> String {
    if v.is_integer() {
        return v.numer().to_string();
    }
    let mut den = v.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", v.numer(), v.denom());
    }
    let places = twos.max(fives);
    let scale = num_traits::pow(BigInt::from(10u32), places);
    let scaled = (v * BigRational::from_integer(scale)).to_integer();
    let negative = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    format!("{}{int_part}.{frac_part}", if negative { "-" } else { "" })
}

/// `serialize_with` helper writing a rational through [`format_rational`].
pub fn serialize_rational<S: Serializer>(v: &BigRational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(&format_rational(v))
}
