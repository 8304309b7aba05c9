//! Exact rational quantities and their text forms.
//!
//! Every power, allocation, and utility value is a [`Rational`]. Input text may
//! be an integer (`"8"`), a decimal (`"0.25"`, `"-1.5"`), or a fraction
//! (`"3/4"`). Output always uses the canonical `"num/den"` form with a positive
//! denominator, including for integers (`"8/1"`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{text}`: {reason}")]
pub struct RationalParseError {
    pub text: String,
    pub reason: &'static str,
}

pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let fail = |reason| RationalParseError {
        text: text.to_string(),
        reason,
    };
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(fail("empty"));
    }
    if let Some((num, den)) = trimmed.split_once('/') {
        let num = parse_integer(num.trim()).ok_or_else(|| fail("bad numerator"))?;
        let den = parse_integer(den.trim()).ok_or_else(|| fail("bad denominator"))?;
        if den.is_zero() {
            return Err(fail("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match trimmed.as_bytes()[0] {
        b'-' => (true, &trimmed[1..]),
        b'+' => (false, &trimmed[1..]),
        _ => (false, trimmed),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(fail("no digits"));
    }
    let all_digits = |s: &str| s.bytes().all(|c| c.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(fail("expected decimal digits"));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits
            .parse()
            .map_err(|_| fail("expected decimal digits"))?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

fn parse_integer(text: &str) -> Option<BigInt> {
    let body = text.strip_prefix(['-', '+']).unwrap_or(text);
    if body.is_empty() || !body.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Canonical `"num/den"` text.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn rational_from_json(value: &serde_json::Value) -> Result<Rational, RationalParseError> {
    match value {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        other => Err(RationalParseError {
            text: other.to_string(),
            reason: "expected an integer or a string",
        }),
    }
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Least common multiple of the denominators of `values` (1 for an empty input).
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// `value * scale` as an `i64`, provided the product is integral and fits.
pub fn scaled_i64(value: &Rational, scale: &BigInt) -> Option<i64> {
    let scaled = value * Rational::from_integer(scale.clone());
    if !scaled.is_integer() {
        return None;
    }
    i64::try_from(scaled.to_integer()).ok()
}

pub fn scaled_i128(value: &Rational, scale: &BigInt) -> Option<i128> {
    let scaled = value * Rational::from_integer(scale.clone());
    if !scaled.is_integer() {
        return None;
    }
    i128::try_from(scaled.to_integer()).ok()
}

pub fn is_nonnegative(value: &Rational) -> bool {
    !value.is_negative()
}
