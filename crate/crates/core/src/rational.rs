//! Exact rational carrier plus the handful of conversions the rest of the
//! crate needs: `p/q` text form, dyadic rounding of floats, and integer
//! roots for rational exponents.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Canonical reduced fraction of arbitrary-precision integers.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn from_biguint(value: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(value.clone()))
}

/// Always emits `p/q`, including integers (`3/1`).
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Accepts `p/q` or a bare integer `p`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::ParseRational(text.to_string());
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(text)
            .map(Rational::from_integer)
            .map_err(|_| bad()),
    }
}

/// Nearest double. Handles numerators and denominators far outside the
/// `f64` range by shifting both to 64 significant bits first.
pub fn to_f64(value: &Rational) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (value.numer().to_f64(), value.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    let sign = if value.is_negative() { -1.0 } else { 1.0 };
    let n = value.numer().abs();
    let d = value.denom().clone();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift_n = (nb - 64).max(0);
    let shift_d = (db - 64).max(0);
    let n_top = (&n >> shift_n as usize).to_f64().unwrap_or(f64::INFINITY);
    let d_top = (&d >> shift_d as usize).to_f64().unwrap_or(f64::INFINITY);
    let exp = shift_n - shift_d;
    sign * (n_top / d_top) * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Round a positive double to the nearest multiple of `2^-bits`, never to zero.
pub fn dyadic(x: f64, bits: u32) -> Rational {
    let scale = 2f64.powi(bits as i32);
    let n = (x * scale).round().max(1.0);
    let denom = BigInt::one() << bits as usize;
    Rational::new(BigInt::from(n as u128), denom)
}

pub fn is_integer(value: &Rational) -> bool {
    value.denom().is_one()
}

/// `floor(base^(a/b))` for a nonnegative rational exponent `a/b`.
pub fn pow_floor(base: &BigUint, exponent: &Rational) -> BigUint {
    let (a, b) = exponent_parts(exponent);
    base.pow(a).nth_root(b)
}

/// `ceil(base^(a/b))` for a nonnegative rational exponent `a/b`.
pub fn pow_ceil(base: &BigUint, exponent: &Rational) -> BigUint {
    let (a, b) = exponent_parts(exponent);
    let target = base.pow(a);
    let root = target.nth_root(b);
    if root.pow(b) == target {
        root
    } else {
        root + 1u32
    }
}

fn exponent_parts(exponent: &Rational) -> (u32, u32) {
    assert!(!exponent.is_negative(), "negative exponent");
    let a = exponent.numer().to_u32().expect("exponent numerator fits u32");
    let b = exponent.denom().to_u32().expect("exponent denominator fits u32");
    (a, b)
}

pub fn lcm_of_denominators<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// An exponent `p` in `[1, ∞]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational),
    Infinite,
}

impl Exponent {
    pub fn finite(p: Rational) -> Result<Self> {
        if p < Rational::one() {
            return Err(Error::InvalidParams(format!(
                "exponent p = {} must be at least 1",
                format_rational(&p)
            )));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn integer(p: i64) -> Self {
        Exponent::Finite(int(p))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => to_f64(p),
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// The exponent as a small `u32` when it is an integer.
    pub fn as_integer(&self) -> Option<u32> {
        match self {
            Exponent::Finite(p) if is_integer(p) => p.numer().to_u32(),
            _ => None,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{}", format_rational(p)),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            other => Exponent::finite(parse_rational(other)?),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "...")]` adapters storing rationals as `"p/q"` strings.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            value: &Option<Rational>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match value {
                Some(v) => s.serialize_some(&format_rational(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            values: &[Rational],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(values.iter().map(format_rational))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod vec2 {
        use super::*;

        pub fn serialize<S: Serializer>(
            rows: &[Vec<Rational>],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(
                rows.iter()
                    .map(|row| row.iter().map(format_rational).collect::<Vec<_>>()),
            )
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            Vec::<Vec<String>>::deserialize(d)?
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}
