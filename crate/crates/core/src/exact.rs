//! Exact rational helpers and the serialized form of masses.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// `2^-e` as an exact rational.
pub fn pow2_neg(e: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << e as usize)
}

pub fn pow2(e: u32) -> Q {
    Q::from_integer(BigInt::one() << e as usize)
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of a finite float, via continued fractions.
/// Decimal inputs such as `0.05` come back as `1/20`.
pub fn from_f64(v: f64) -> Option<Q> {
    if !v.is_finite() {
        return None;
    }
    // Denominators up to 10^12 recover every short decimal and simple fraction.
    match num_rational::Ratio::<i64>::approximate_float(v) {
        Some(r) if *r.denom() <= 1_000_000_000_000 => Some(q(*r.numer(), *r.denom())),
        _ => Q::from_float(v),
    }
}

/// Parses `"3/4"`, `"2"`, or a decimal string.
pub fn parse_q(text: &str) -> Option<Q> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Ok(i) = text.parse::<BigInt>() {
        return Some(Q::from_integer(i));
    }
    text.parse::<f64>().ok().and_then(from_f64)
}

pub fn format_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn abs_diff(a: &Q, b: &Q) -> Q {
    (a - b).abs()
}

/// A rational that (de)serializes as a fraction string; numbers are also accepted on input.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(pub Q);

impl Fraction {
    pub fn value(&self) -> &Q {
        &self.0
    }
}

impl From<Q> for Fraction {
    fn from(v: Q) -> Self {
        Fraction(v)
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(&self.0))
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => parse_q(&t)
                .map(Fraction)
                .ok_or_else(|| de::Error::custom(format!("not a rational number: {t:?}"))),
            Raw::Int(i) => Ok(Fraction(q_int(i))),
            Raw::Float(f) => from_f64(f)
                .map(Fraction)
                .ok_or_else(|| de::Error::custom("non-finite number")),
        }
    }
}

/// A set mass: exact when the measure representation is rational, approximate otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Mass {
    Exact(Q),
    Approx(f64),
}

impl Mass {
    pub fn zero() -> Self {
        Mass::Exact(Q::zero())
    }

    pub fn one() -> Self {
        Mass::Exact(Q::one())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Mass::Exact(v) => to_f64(v),
            Mass::Approx(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&Q> {
        match self {
            Mass::Exact(v) => Some(v),
            Mass::Approx(_) => None,
        }
    }

    pub fn add(&self, other: &Mass) -> Mass {
        match (self, other) {
            (Mass::Exact(a), Mass::Exact(b)) => Mass::Exact(a + b),
            _ => Mass::Approx(self.to_f64() + other.to_f64()),
        }
    }

    /// Natural log; `-inf` for a zero mass.
    pub fn ln(&self) -> f64 {
        match self {
            Mass::Exact(v) if v.is_zero() => f64::NEG_INFINITY,
            // log of numerator and denominator separately survives masses below f64 range
            Mass::Exact(v) => big_ln(v.numer()) - big_ln(v.denom()),
            Mass::Approx(v) => v.ln(),
        }
    }
}

fn big_ln(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        return v.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (v >> shift as usize).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Display for Mass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mass::Exact(v) => f.write_str(&format_q(v)),
            Mass::Approx(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Mass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Mass::Exact(v) => s.serialize_str(&format_q(v)),
            Mass::Approx(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Mass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => parse_q(&t)
                .map(Mass::Exact)
                .ok_or_else(|| de::Error::custom(format!("not a fraction: {t:?}"))),
            Raw::Float(f) => Ok(Mass::Approx(f)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_become_short_fractions() {
        assert_eq!(from_f64(0.05).unwrap(), q(1, 20));
        assert_eq!(from_f64(0.25).unwrap(), q(1, 4));
        assert_eq!(parse_q("1/9").unwrap(), q(1, 9));
        assert_eq!(parse_q(" 3 / 4 ").unwrap(), q(3, 4));
        assert!(parse_q("1/0").is_none());
    }

    #[test]
    fn mass_serializes_exact_as_fraction() {
        let m = Mass::Exact(q(1, 8));
        assert_eq!(serde_json::to_string(&m).unwrap(), "\"1/8\"");
        let back: Mass = serde_json::from_str("\"1/8\"").unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn ln_of_tiny_exact_mass() {
        let m = Mass::Exact(pow2_neg(3000));
        assert!((m.ln() + 3000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }
}
