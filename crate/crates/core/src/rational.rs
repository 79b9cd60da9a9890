//! Exact rational numbers and their string encoding.
//!
//! Every numeric quantity that feeds a preference comparison is an exact
//! rational so that outcome equality, and therefore partition induction, never
//! depends on floating-point rounding. Rationals travel as strings such as
//! `"3"`, `"-2/5"` or `"1.25"`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational.
pub type Rational = BigRational;

/// Builds `numer / denom`. Panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"a"`, `"a/b"` or a finite decimal like `"-1.25"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut numer: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(numer, denom));
    }
    let value: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(value))
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite float.
pub fn from_f64(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}

/// Best rational approximation of `value` with denominator at most `max_denom`,
/// by continued-fraction convergents and semiconvergents.
pub fn approximate(value: f64, max_denom: u64) -> Option<Rational> {
    if !value.is_finite() {
        return None;
    }
    let exact = from_f64(value)?;
    let max_denom = BigInt::from(max_denom.max(1));
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut rest = exact.clone();
    loop {
        let a = rest.floor().to_integer();
        let q2 = &q0 + &a * &q1;
        if q2 > max_denom {
            // largest semiconvergent that still fits
            let k = (&max_denom - &q0).div_floor(&q1);
            let candidate_semi = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
            let candidate_conv = Rational::new(p1.clone(), q1.clone());
            let err_semi = (&candidate_semi - &exact).abs();
            let err_conv = (&candidate_conv - &exact).abs();
            return Some(if err_semi < err_conv {
                candidate_semi
            } else {
                candidate_conv
            });
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            return Some(Rational::new(p1, q1));
        }
        rest = frac.recip();
    }
}

/// Serde adapter for a single rational carried as a string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = RationalText::deserialize(d)?;
        text.into_rational().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a vector of rationals carried as strings.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        values: &[Rational],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let texts: Vec<String> = values.iter().map(format_rational).collect();
        texts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let texts = Vec::<RationalText>::deserialize(d)?;
        texts
            .into_iter()
            .map(|t| t.into_rational().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for an optional rational (serialize only).
pub mod serde_option_rational {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        value.as_ref().map(format_rational).serialize(s)
    }
}

/// Accepts either a string (`"1/3"`) or a JSON integer.
#[derive(Deserialize)]
#[serde(untagged)]
enum RationalText {
    Text(String),
    Int(i64),
}

impl RationalText {
    fn into_rational(self) -> Result<Rational> {
        match self {
            RationalText::Text(t) => parse_rational(&t),
            RationalText::Int(i) => Ok(int(i)),
        }
    }
}

/// Display wrapper printing the canonical text form.
pub struct Show<'a>(pub &'a Rational);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}
