//! Exact times, lengths and speeds.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};

use super::ModelError;

/// Arbitrary-precision rational in canonical form.
pub type Rational = BigRational;

/// A travel or delivery time: either a finite rational or unreachable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Time {
    Finite(Rational),
    Infinite,
}

impl Time {
    pub fn zero() -> Self {
        Time::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Time::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Time::Finite(r) => Some(r),
            Time::Infinite => None,
        }
    }

    pub fn into_finite(self) -> Option<Rational> {
        match self {
            Time::Finite(r) => Some(r),
            Time::Infinite => None,
        }
    }

    /// Lossy decimal rendering for display only.
    pub fn to_f64(&self) -> f64 {
        match self {
            Time::Finite(r) => rational_to_f64(r),
            Time::Infinite => f64::INFINITY,
        }
    }
}

impl From<Rational> for Time {
    fn from(r: Rational) -> Self {
        Time::Finite(r)
    }
}

impl From<Option<Rational>> for Time {
    fn from(r: Option<Rational>) -> Self {
        r.map_or(Time::Infinite, Time::Finite)
    }
}

impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Time {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Time::Finite(a), Time::Finite(b)) => a.cmp(b),
            (Time::Finite(_), Time::Infinite) => Ordering::Less,
            (Time::Infinite, Time::Finite(_)) => Ordering::Greater,
            (Time::Infinite, Time::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for &Time {
    type Output = Time;

    fn add(self, rhs: &Time) -> Time {
        match (self, rhs) {
            (Time::Finite(a), Time::Finite(b)) => Time::Finite(a + b),
            _ => Time::Infinite,
        }
    }
}

impl Add for Time {
    type Output = Time;

    fn add(self, rhs: Time) -> Time {
        &self + &rhs
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::Finite(r) => write!(f, "{}", format_rational(r)),
            Time::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Time {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Time::Infinite),
            other => parse_rational(other).map(Time::Finite),
        }
    }
}

/// `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"3"`, `"-2"`, `"1.25"`, `"7/2"` and exponent-free decimals exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ModelError> {
    let bad = || ModelError::BadRational(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).map_err(|_| bad())?;
    let denom = num::pow(BigInt::from(10u32), frac_part.len());
    let value = Rational::new(numer, denom);
    Ok(if neg { -value } else { value })
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
