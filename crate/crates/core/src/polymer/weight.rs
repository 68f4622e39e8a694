use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Scalar type carried by polymer weights: `f64` for integral-backed
/// systems, [`BigRational`] where cancellations must be exact.
pub trait Weight:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    fn is_finite(&self) -> bool;
    /// Accepts `p/q`, integers and decimals.
    fn parse_weight(text: &str) -> Result<Self>;
    fn is_exact() -> bool;

    fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc * self.clone())
    }
}

impl Weight for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn parse_weight(text: &str) -> Result<Self> {
        let text = text.trim();
        let value = if text.contains('/') {
            ToPrimitive::to_f64(&parse_rational(text)?).unwrap_or(f64::NAN)
        } else {
            text.parse::<f64>()
                .map_err(|_| Error::invalid("weight", format!("`{text}` is not a number")))?
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::invalid("weight", format!("`{text}` is not finite")))
        }
    }

    fn is_exact() -> bool {
        false
    }

    fn pow(&self, k: u32) -> Self {
        self.powi(k as i32)
    }
}

impl Weight for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn parse_weight(text: &str) -> Result<Self> {
        parse_rational(text)
    }

    fn is_exact() -> bool {
        true
    }
}

const MAX_DIGITS: usize = 4096;

/// Parses an exact rational from `p/q`, an integer, or a decimal with an
/// optional exponent (`-1.25e-3`).
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::invalid("rational", format!("cannot parse `{text}`"));
    if text.is_empty() || text.len() > MAX_DIGITS {
        return Err(bad());
    }
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::invalid("rational", "zero denominator"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(k) => {
            let e: i32 = text[k + 1..].parse().map_err(|_| bad())?;
            (&text[..k], e)
        }
        None => (text, 0),
    };
    if exponent.unsigned_abs() > 1000 {
        return Err(bad());
    }
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !all_digits(int_part) || !all_digits(frac_part) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let numer: BigInt = if joined.is_empty() { BigInt::zero() } else { joined.parse().map_err(|_| bad())? };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Absolute value as `f64`, shared by the bounds.
pub(crate) fn abs_f64<W: Weight>(w: &W) -> f64 {
    w.to_f64().abs()
}
