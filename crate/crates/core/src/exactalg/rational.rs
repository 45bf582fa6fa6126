//! Exact rationals and their text forms.
//!
//! The wire format is either a fraction `p/q` or a finite decimal such as
//! `-1.25` or `3e-2`. Both convert exactly; nothing goes through `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Arbitrary-precision fraction, always normalized (lowest terms, positive denominator).
pub type Rational = BigRational;

pub fn rational_from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q` or a finite decimal into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num.trim()).ok_or_else(|| ParseError::Invalid(s.to_string()))?;
        let den = parse_integer(den.trim()).ok_or_else(|| ParseError::Invalid(s.to_string()))?;
        if den.is_zero() {
            return Err(ParseError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    parse_decimal(s).ok_or_else(|| ParseError::Invalid(s.to_string()))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let (negative, body) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    if negative {
        num = -num;
    }
    let mut scale: i64 = -(frac_part.len() as i64);
    if let Some(exp) = exponent {
        let e: i64 = parse_integer(exp)?.to_i64()?;
        if e.abs() > 100_000 {
            return None;
        }
        scale += e;
    }
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Lowest-terms `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Nearest `f64`; saturates to ±inf only for values beyond the `f64` range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Least common multiple of the denominators.
pub(crate) fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    values.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}
