//! Digit prefixes and the uncertain intervals they pin down.
//!
//! Knowing only the first `m` digits `a₁…a_m` of a number places it in the
//! half-open interval `[0.a₁…a_m, 0.a₁…a_m + base^{−m})`. Endpoints are exact
//! rationals. The one floating-point step is [`transmission_range`], which
//! maps an angle prefix through `cos²` and pads the result outward.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreal::serialize_rational;

pub const DEFAULT_BASE: u32 = 10;

/// Outward pad applied to each float endpoint of a transmission range.
pub const COS2_PAD: f64 = 4.0 * f64::EPSILON;

/// `integer_part . a₁ a₂ … a_m` in a given base.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitPrefix {
    base: u32,
    integer_part: u64,
    digits: Vec<u32>,
}

impl DigitPrefix {
    pub fn new(base: u32, integer_part: u64, digits: Vec<u32>) -> Result<Self> {
        if base < 2 {
            return Err(Error::param(format!("base must be at least 2, got {base}")));
        }
        if digits.is_empty() {
            return Err(Error::param("a prefix needs at least one digit"));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::param(format!("digit {d} out of range for base {base}")));
        }
        Ok(DigitPrefix {
            base,
            integer_part,
            digits,
        })
    }

    /// Fractional digits in base 10, integer part 0.
    pub fn decimal(digits: &[u32]) -> Result<Self> {
        DigitPrefix::new(DEFAULT_BASE, 0, digits.to_vec())
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn integer_part(&self) -> u64 {
        self.integer_part
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Number of fractional digits `m`.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// The prefix extended by one more digit.
    pub fn refine(&self, next_digit: u32) -> Result<Self> {
        if next_digit >= self.base {
            return Err(Error::param(format!(
                "digit {next_digit} out of range for base {}",
                self.base
            )));
        }
        let mut digits = self.digits.clone();
        digits.push(next_digit);
        Ok(DigitPrefix { digits, ..self.clone() })
    }

    /// `base^{−m}`.
    pub fn width(&self) -> BigRational {
        BigRational::new(
            BigInt::one(),
            num_traits::pow(BigInt::from(self.base), self.digits.len()),
        )
    }

    /// `[β, ψ)` with `β = integer_part.a₁…a_m` and `ψ = β + base^{−m}`.
    pub fn interval(&self) -> UncertainInterval {
        let base = BigInt::from(self.base);
        let numer = self
            .digits
            .iter()
            .fold(BigInt::from(self.integer_part), |acc, &d| acc * &base + BigInt::from(d));
        let denom = num_traits::pow(base, self.digits.len());
        let lo = BigRational::new(numer, denom);
        let hi = &lo + self.width();
        UncertainInterval { lo, hi }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.interval().contains(x)
    }
}

impl fmt::Display for DigitPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.", self.integer_part)?;
        for &d in &self.digits {
            match char::from_digit(d, self.base.min(36)) {
                Some(c) if self.base <= 36 => write!(f, "{c}")?,
                _ => write!(f, "[{d}]")?,
            }
        }
        if self.base != DEFAULT_BASE {
            write!(f, " (base {})", self.base)?;
        }
        Ok(())
    }
}

/// Parses decimal prefixes such as `"0.141"` or `"2.5"`.
impl FromStr for DigitPrefix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (int, frac) = s
            .split_once('.')
            .ok_or_else(|| Error::parse(format!("prefix {s:?} has no fractional digits")))?;
        let integer_part = if int.is_empty() {
            0
        } else {
            int.parse::<u64>()
                .map_err(|_| Error::parse(format!("bad integer part in prefix {s:?}")))?
        };
        let digits = frac
            .chars()
            .map(|c| {
                c.to_digit(DEFAULT_BASE)
                    .ok_or_else(|| Error::parse(format!("bad digit {c:?} in prefix {s:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        DigitPrefix::new(DEFAULT_BASE, integer_part, digits)
    }
}

/// Free function form of [`DigitPrefix::interval`].
pub fn uncertain_interval(prefix: &DigitPrefix) -> UncertainInterval {
    prefix.interval()
}

/// The half-open interval `[lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UncertainInterval {
    #[serde(serialize_with = "serialize_rational")]
    pub lo: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub hi: BigRational,
}

impl UncertainInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.lo <= *x && *x < self.hi
    }

    /// `self ⊆ other`, both half-open.
    pub fn is_within(&self, other: &UncertainInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

impl fmt::Display for UncertainInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::extreal::format_rational;
        write!(f, "[{}, {})", format_rational(&self.lo), format_rational(&self.hi))
    }
}

/// Probabilities `(lo, hi]` covering `cos²θ` for every angle `θ` of a prefix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbabilityRange {
    pub lo: f64,
    pub hi: f64,
}

impl ProbabilityRange {
    pub fn contains(&self, p: f64) -> bool {
        self.lo < p && p <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl fmt::Display for ProbabilityRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}]", self.lo, self.hi)
    }
}

/// Image of the angle interval `[β, ψ)` (radians) under `θ ↦ cos²θ`.
///
/// `cos²` decreases on `[0, π/2]`, so the image is `(cos²ψ, cos²β]`. Each
/// endpoint is moved outward by [`COS2_PAD`] to cover float rounding, then
/// clamped to `[0, 1]`.
pub fn transmission_range(theta: &DigitPrefix) -> Result<ProbabilityRange> {
    let iv = theta.interval();
    let beta = iv.lo.to_f64().unwrap_or(f64::NAN);
    let psi = iv.hi.to_f64().unwrap_or(f64::NAN);
    if iv.lo < BigRational::zero() || !(psi <= std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "angle interval {iv} leaves [0, pi/2] radians"
        )));
    }
    let cos2 = |t: f64| t.cos().powi(2);
    Ok(ProbabilityRange {
        lo: (cos2(psi) - COS2_PAD).max(0.0),
        hi: (cos2(beta) + COS2_PAD).min(1.0),
    })
}
