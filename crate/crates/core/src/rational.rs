//! Exact rational numbers and their text forms.
//!
//! Every breakpoint of the velocity law is rational whenever the parameters
//! are, so the whole crate works over `Ratio<i128>`. Text input accepts
//! `p/q`, integers and base-10 decimals (converted exactly, never through a
//! float); text output is always `p/q`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Tolerance used when a float has to be snapped onto the rational grid.
pub const FLOAT_SNAP_TOLERANCE: f64 = 1e-12;

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn frac(p: i128, q: i128) -> Rational {
    Rational::new(p, q)
}

/// Parse `p/q`, an integer, or a decimal such as `-0.125` or `2.5e-3`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_decimal(p.trim())?;
        let q = parse_decimal(q.trim())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(p / q);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a number: '{s}'"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, fractional) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fractional.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(fractional.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{whole}{fractional}");
    let trimmed = all.trim_start_matches('0');
    if trimmed.len() > 36 {
        return Err(Error::Parse(format!("too many digits in '{s}'")));
    }
    let numer: i128 = if trimmed.is_empty() { 0 } else { trimmed.parse().map_err(|_| bad())? };
    let scale = exponent - fractional.len() as i32;
    if scale.abs() > 36 {
        return Err(Error::Parse(format!("exponent out of range in '{s}'")));
    }
    let ten = 10i128.pow(scale.unsigned_abs());
    let value = if scale >= 0 {
        Rational::from_integer(numer.checked_mul(ten).ok_or_else(bad)?)
    } else {
        Rational::new(numer, ten)
    };
    Ok(if negative { -value } else { value })
}

/// Exact base-10 conversion of the shortest decimal that round-trips `x`.
pub fn from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite value {x}")));
    }
    parse_decimal(&format!("{x}"))
}

/// Always `p/q`, including integers (`2/1`).
pub fn fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn floor_i128(r: &Rational) -> i128 {
    Integer::div_floor(r.numer(), r.denom())
}

pub fn ceil_i128(r: &Rational) -> i128 {
    -Integer::div_floor(&-r.numer(), r.denom())
}

pub fn min(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn abs(r: Rational) -> Rational {
    r.abs()
}

/// Serde adapter writing rationals as `p/q` strings.
pub mod serde_fraction {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fraction_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

pub mod serde_fraction_vec {
    use super::*;
    use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&fraction_string(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        items
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod serde_fraction_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        r: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&fraction_string(r)),
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

/// Unbounded rational for quantities that accumulate over many events.
pub type BigRational = num_rational::BigRational;

pub fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Exact narrowing; `None` when numerator or denominator exceed `i128`.
pub fn small(r: &BigRational) -> Option<Rational> {
    Some(Rational::new(r.numer().to_i128()?, r.denom().to_i128()?))
}

pub fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn big_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub mod serde_big {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&big_string(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/4").unwrap(), frac(1, 4));
        assert_eq!(parse_rational(" -3/6 ").unwrap(), frac(-1, 2));
        assert_eq!(parse_rational("0.49").unwrap(), frac(49, 100));
        assert_eq!(parse_rational("2").unwrap(), int(2));
        assert_eq!(parse_rational("2.5e-3").unwrap(), frac(1, 400));
        assert_eq!(parse_rational(".5").unwrap(), frac(1, 2));
        assert_eq!(parse_rational("1.5/0.5").unwrap(), int(3));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "a", "1/0", "1..2", "-", "1e", "0x10"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn floats_convert_through_decimal() {
        assert_eq!(from_f64(0.1).unwrap(), frac(1, 10));
        assert_eq!(from_f64(-1.25).unwrap(), frac(-5, 4));
        assert!(from_f64(f64::NAN).is_err());
    }

    #[test]
    fn fraction_strings() {
        assert_eq!(fraction_string(&frac(5, 8)), "5/8");
        assert_eq!(fraction_string(&int(2)), "2/1");
        assert_eq!(fraction_string(&frac(-7, 2)), "-7/2");
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(floor_i128(&frac(-1, 2)), -1);
        assert_eq!(ceil_i128(&frac(-1, 2)), 0);
        assert_eq!(floor_i128(&frac(7, 2)), 3);
        assert_eq!(ceil_i128(&frac(7, 2)), 4);
        assert_eq!(ceil_i128(&int(3)), 3);
    }
}
