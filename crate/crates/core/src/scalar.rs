//! Scalar field abstraction shared by the exact and floating-point paths.
//!
//! Every tensor, profile and model in the crate is generic over [`Scalar`].
//! `Rational` (arbitrary-precision) is used for identities that must hold
//! with zero residual; `f64` carries sampling and optimization campaigns.
//! Mixing the two is a type error; documents deserialized with the wrong
//! mode tag are rejected with [`Error::ModeMismatch`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

pub use crate::rational::Rational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Denominator used when a random draw is snapped onto the rational lattice.
pub const RATIONAL_QUANTUM: i64 = 32;

/// Largest decimal exponent accepted by [`parse_rational`].
const MAX_EXPONENT: u32 = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Rational,
    Float,
}

impl fmt::Display for Arithmetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arithmetic::Rational => "rational",
            Arithmetic::Float => "float",
        })
    }
}

impl FromStr for Arithmetic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" | "exact" => Ok(Arithmetic::Rational),
            "float" | "f64" => Ok(Arithmetic::Float),
            _ => Err(Error::ParseNumber {
                input: s.to_owned(),
                reason: "arithmetic must be \"rational\" or \"float\"",
            }),
        }
    }
}

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const MODE: Arithmetic;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    /// Snap a sampled real onto this field (identity for floats).
    fn quantize(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    /// Zero exactly, or within `rel_tol * max(1, scale)` for floats.
    fn is_negligible(&self, scale: f64, rel_tol: f64) -> bool;

    /// `self >= 0` exactly, or `self >= -rel_tol * max(1, scale)` for floats.
    fn is_nonneg_within(&self, scale: f64, rel_tol: f64) -> bool;
}

impl Scalar for f64 {
    const MODE: Arithmetic = Arithmetic::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn quantize(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(self.to_string()))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(num) => num.as_f64().ok_or_else(|| Error::ParseNumber {
                input: num.to_string(),
                reason: "not representable as f64",
            }),
            Value::String(s) => {
                let r = parse_rational(s)?;
                Ok(Self::from_rational(&r))
            }
            other => Err(Error::ParseNumber {
                input: other.to_string(),
                reason: "expected a number",
            }),
        }
    }

    fn is_negligible(&self, scale: f64, rel_tol: f64) -> bool {
        self.abs() <= rel_tol * scale.abs().max(1.0)
    }

    fn is_nonneg_within(&self, scale: f64, rel_tol: f64) -> bool {
        *self >= -rel_tol * scale.abs().max(1.0)
    }
}

impl Scalar for Rational {
    const MODE: Arithmetic = Arithmetic::Rational;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num, den)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn quantize(x: f64) -> Self {
        let q = RATIONAL_QUANTUM as f64;
        Rational::new((x * q).round() as i64, RATIONAL_QUANTUM)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(num) => parse_rational(&num.to_string()),
            other => Err(Error::ParseNumber {
                input: other.to_string(),
                reason: "expected a \"p/q\" string",
            }),
        }
    }

    fn is_negligible(&self, _scale: f64, _rel_tol: f64) -> bool {
        self.is_zero()
    }

    fn is_nonneg_within(&self, _scale: f64, _rel_tol: f64) -> bool {
        !self.is_negative()
    }
}

/// A rational carried through configs and reports as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational);

impl Exact {
    pub fn ratio(num: i64, den: i64) -> Self {
        Exact(Rational::from_ratio(num, den))
    }

    pub fn get<T: Scalar>(&self) -> T {
        T::from_rational(&self.0)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl FromStr for Exact {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Exact)
    }
}

impl Serialize for Exact {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(de)?;
        Rational::from_json(&v).map(Exact).map_err(serde::de::Error::custom)
    }
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Exact parse of `"p/q"`, integer, or decimal (`"-0.125"`, `"1e-3"`) input.
///
/// Decimals are converted exactly; nothing is rounded.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let err = |reason| Error::ParseNumber {
        input: input.to_owned(),
        reason,
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err("empty"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_integer(p.trim()).ok_or_else(|| err("bad numerator"))?;
        let q = parse_integer(q.trim()).ok_or_else(|| err("bad denominator"))?;
        if q.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::from_big(BigRational::new(p, q)));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| err("bad exponent"))?;
            if exp.unsigned_abs() > u64::from(MAX_EXPONENT) {
                return Err(err("exponent out of range"));
            }
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, body) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err("unexpected character"));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(
        BigInt::from_str_radix(&digits, 10).map_err(|_| err("bad digits"))?,
    );
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > u64::from(MAX_EXPONENT) + 4096 {
        return Err(err("exponent out of range"));
    }
    let ten = BigInt::from(10u32);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= BigRational::from_integer(pow);
    } else {
        value /= BigRational::from_integer(pow);
    }
    if negative {
        value = -value;
    }
    Ok(Rational::from_big(value))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str_radix(s.strip_prefix('+').unwrap_or(s), 10).ok()
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    BigRational::from_f64(x).map(Rational::from_big)
}

/// `1 / (n (n - 1))`, the pinching constant at which `R̄` vanishes.
pub fn degenerate_pinching<T: Scalar>(n: usize) -> T {
    T::from_ratio(1, (n * (n - 1)) as i64)
}

/// Rejects `eps >= 1/(n(n-1))`.
pub fn check_pinching_bound<T: Scalar>(n: usize, eps: &T) -> Result<()> {
    if *eps >= degenerate_pinching::<T>(n) {
        return Err(Error::DegeneratePinching {
            eps: eps.to_string(),
            n,
            bound: n * (n - 1),
        });
    }
    Ok(())
}

pub fn max_abs<'a, T: Scalar>(values: impl IntoIterator<Item = &'a T>) -> T {
    values
        .into_iter()
        .fold(T::zero(), |acc, v| if v.abs() > acc { v.abs() } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("1/24").unwrap(), q(1, 24));
        assert_eq!(parse_rational("-3/6").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("-0.1").unwrap(), q(-1, 10));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), q(250, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
    }

    #[test]
    fn rejects_malformed_numbers() {
        for bad in ["", "1/0", "abc", "1/2/3", "--1", "1e", "1e99999", ".", "1.2.3", "0x10"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn rational_json_is_p_over_q() {
        assert_eq!(q(1, 3).to_json(), Value::String("1/3".into()));
        assert_eq!(Rational::from_json(&Value::String("1/3".into())).unwrap(), q(1, 3));
        assert_eq!(Rational::from_json(&serde_json::json!(2)).unwrap(), q(2, 1));
    }

    #[test]
    fn pinching_bound_rejects_degenerate_eps() {
        assert!(check_pinching_bound(4, &q(1, 12)).is_err());
        assert!(check_pinching_bound(4, &q(1, 24)).is_ok());
        assert!(check_pinching_bound(6, &q(1, 24)).is_err());
        assert!(check_pinching_bound(4, &(1.0 / 12.0)).is_err());
    }

    #[test]
    fn quantize_lands_on_lattice() {
        let r = Rational::quantize(0.3);
        assert_eq!(r, q(10, 32));
    }
}
