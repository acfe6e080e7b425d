//! Numbers carried in two forms at once: a 64-bit float for fast numeric
//! work and an exact rational for certification.
//!
//! Decimal text is parsed straight into a rational (`0.971239` becomes
//! `971239/1000000`); the float is the correctly rounded image of that
//! rational, never the other way round.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arithmetic mode of a computation or certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Exact,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Float => "float",
            Mode::Exact => "exact",
        })
    }
}

/// A number held as both `f64` and an exact rational.
///
/// Equality and ordering use the exact form only.
#[derive(Clone, Debug)]
pub struct DualNum {
    value: f64,
    exact: BigRational,
}

impl DualNum {
    pub fn from_ratio(exact: BigRational) -> Self {
        let value = ratio_to_f64(&exact);
        DualNum { value, exact }
    }

    pub fn from_integers(numer: i64, denom: i64) -> Self {
        Self::from_ratio(BigRational::new(numer.into(), denom.into()))
    }

    /// The exact binary rational of a finite float.
    pub fn from_f64(value: f64) -> Option<Self> {
        BigRational::from_float(value).map(|exact| DualNum { value, exact })
    }

    /// Rounds `value` half-away-from-zero to `places` decimal places.
    pub fn round_decimal(value: f64, places: u32) -> Self {
        let scale = BigInt::from(10u32).pow(places);
        let exact = BigRational::from_float(value).unwrap_or_else(BigRational::zero)
            * BigRational::from_integer(scale.clone());
        Self::from_ratio(BigRational::new(exact.round().to_integer(), scale))
    }

    pub fn zero() -> Self {
        Self::from_ratio(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_ratio(BigRational::one())
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[inline]
    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    /// Terminating decimal text when the rational has one, `p/q` otherwise.
    pub fn to_text(&self) -> String {
        ratio_to_text(&self.exact)
    }
}

impl PartialEq for DualNum {
    fn eq(&self, other: &Self) -> bool {
        self.exact == other.exact
    }
}

impl Eq for DualNum {}

impl PartialOrd for DualNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DualNum {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exact.cmp(&other.exact)
    }
}

impl FromStr for DualNum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Self::from_ratio)
    }
}

impl fmt::Display for DualNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses `[-+]digits[.digits][e[-+]digits]` or `[-]p/q` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let err = || Error::ParseNumber(text.to_string());
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let numer = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let denom = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if denom.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(numer, denom));
    }

    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = body[i + 1..].parse().map_err(|_| err())?;
            (&body[..i], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty())
        || !all_digits(int_part)
        || !all_digits(frac_part)
    {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str_radix(&digits, 10).map_err(|_| err())?;
    if negative {
        numer = -numer;
    }
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    Ok(if shift >= 0 {
        BigRational::from_integer(numer * ten.pow(shift as u32))
    } else {
        BigRational::new(numer, ten.pow(shift.unsigned_abs()))
    })
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

pub fn ratio_to_text(r: &BigRational) -> String {
    let denom = r.denom();
    let mut rest = denom.clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", r.numer(), denom);
    }
    let places = twos.max(fives);
    let scaled = r.numer() * BigInt::from(10u32).pow(places) / denom;
    let negative = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let places = places as usize;
    let text = if places == 0 {
        digits
    } else if digits.len() > places {
        let (i, f) = digits.split_at(digits.len() - places);
        format!("{i}.{f}")
    } else {
        format!("0.{}{}", "0".repeat(places - digits.len()), digits)
    };
    if negative {
        format!("-{text}")
    } else {
        text
    }
}

/// Formats `x` with at most `digits` significant digits, trailing zeros
/// trimmed; plain notation for moderate magnitudes, scientific otherwise.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let mantissa_digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };
    if !(-5..=15).contains(&exp) {
        let m = trim_fraction(&format!(
            "{}.{}",
            &mantissa_digits[..1],
            &mantissa_digits[1..]
        ));
        return format!("{sign}{m}e{exp}");
    }
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), mantissa_digits)
    } else {
        let int_len = exp as usize + 1;
        if mantissa_digits.len() <= int_len {
            format!(
                "{}{}",
                mantissa_digits,
                "0".repeat(int_len - mantissa_digits.len())
            )
        } else {
            format!(
                "{}.{}",
                &mantissa_digits[..int_len],
                &mantissa_digits[int_len..]
            )
        }
    };
    format!("{sign}{}", trim_fraction(&body))
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Field operations shared by the float and exact code paths.
pub trait Scalar: Clone + fmt::Debug + PartialOrd + Send + Sync + Num + Signed + 'static {
    const MODE: Mode;

    fn from_dual(n: &DualNum) -> Self;
    fn from_int(n: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_json(&self) -> serde_json::Value;

    fn half() -> Self {
        Self::one() / Self::from_int(2)
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_dual(n: &DualNum) -> Self {
        n.value()
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format!("{:.14e}", self))
    }
}

impl Scalar for BigRational {
    const MODE: Mode = Mode::Exact;

    fn from_dual(n: &DualNum) -> Self {
        n.exact().clone()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "num": self.numer().to_string(),
            "den": self.denom().to_string(),
        })
    }
}
