//! Helpers on arbitrary-precision rationals: logs, heights, decimal I/O.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::BigRat;

/// `ln |n|` from the top 64 bits and the bit length.
pub fn bigint_log_abs(n: &BigInt) -> Result<f64> {
    if n.is_zero() {
        return Err(Error::LogOfZero);
    }
    let bits = n.bits();
    let mag = n.magnitude();
    if bits <= 64 {
        return Ok((mag.to_u64().expect("fits") as f64).ln());
    }
    let shift = bits - 64;
    let top = (mag >> shift).to_u64().expect("64 bits");
    Ok((top as f64).ln() + shift as f64 * std::f64::consts::LN_2)
}

/// Natural log of |x| without converting full integers to floating point.
///
/// Close to 1 the difference num − den is used so the result keeps its
/// relative accuracy.
pub fn rat_log_abs(x: &BigRat) -> Result<f64> {
    if x.is_zero() {
        return Err(Error::LogOfZero);
    }
    let num = x.numer().abs();
    let den = x.denom();
    let ln = bigint_log_abs(&num)? - bigint_log_abs(den)?;
    if ln.abs() < 0.5 {
        let diff = &num - den;
        if diff.is_zero() {
            return Ok(0.0);
        }
        let r = (bigint_log_abs(&diff)? - bigint_log_abs(den)?).exp();
        let r = if diff.is_negative() { -r } else { r };
        return Ok(r.ln_1p());
    }
    Ok(ln)
}

/// Naive height max(|num|, den) of a reduced fraction.
pub fn height(x: &BigRat) -> BigInt {
    let n = x.numer().abs();
    if &n > x.denom() {
        n
    } else {
        x.denom().clone()
    }
}

/// Number of decimal digits of |n| (1 for zero).
pub fn decimal_digits(n: &BigInt) -> usize {
    if n.is_zero() {
        return 1;
    }
    n.magnitude().to_str_radix(10).len()
}

/// Parses `a`, `-a`, or `a/b` with integer a, b.
pub fn parse_rational(s: &str) -> Result<BigRat> {
    let s = s.trim();
    let bad = || Error::InvalidNumber(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(BigRat::new(n, d))
}

/// Parses a comma-separated list of exact rationals.
pub fn parse_rational_list(s: &str) -> Result<Vec<BigRat>> {
    s.split(',').map(parse_rational).collect()
}

/// Parses a decimal string such as `-0.6931471805599453094` exactly.
/// Trailing ellipses (`...` or `…`) are ignored.
pub fn parse_decimal(s: &str) -> Result<BigRat> {
    let t = s.trim().trim_end_matches('…').trim_end_matches("...");
    let bad = || Error::InvalidNumber(s.to_string());
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10u32), frac.len());
    let v = BigRat::new(n, d);
    Ok(if neg { -v } else { v })
}

/// Decimal expansion of x rounded to `digits` places after the point.
pub fn to_decimal(x: &BigRat, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), digits);
    let scaled = x.numer().abs() * &scale;
    let (q, r) = scaled.div_rem(x.denom());
    let q = if &r * 2 >= *x.denom() { q + 1 } else { q };
    let (ip, fp) = q.div_rem(&scale);
    let neg = x.is_negative() && !q.is_zero();
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{ip}");
    }
    format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = digits)
}

/// Unit in the last place of a decimal string (10^-fraction_digits).
pub fn decimal_ulp(s: &str) -> BigRat {
    let t = s.trim().trim_end_matches('…').trim_end_matches("...");
    let frac = t.split_once('.').map(|(_, f)| f.len()).unwrap_or(0);
    BigRat::new(BigInt::one(), num_traits::pow(BigInt::from(10u32), frac))
}
