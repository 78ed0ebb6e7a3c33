//! Exact rational parsing and formatting.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `3`, `0.25` or `1/4` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parameter(format!("not a rational number: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let negative = int.starts_with('-');
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let int_digits = int.trim_start_matches(['-', '+']);
    if !(digits(int_digits) || (int_digits.is_empty() && digits(frac))) || !(frac.is_empty() || digits(frac)) {
        return Err(bad());
    }
    let whole: BigInt = format!("{int_digits}{frac}").parse().map_err(|_| bad())?;
    let scale = BigInt::from(10u32).pow(frac.len() as u32);
    let r = BigRational::new(whole, scale);
    Ok(if negative { -r } else { r })
}

/// Parses into a `u64` ratio, for quantities known to be small and
/// nonnegative.
pub fn parse_ratio_u64(s: &str) -> Result<Ratio<u64>> {
    let r = parse_rational(s)?;
    match (r.numer().to_u64(), r.denom().to_u64()) {
        (Some(n), Some(d)) => Ok(Ratio::new(n, d)),
        _ => Err(Error::Parameter(format!("`{s}` must be a nonnegative rational of modest size"))),
    }
}

pub fn big(r: Ratio<u64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `n/d`, or `n` when the denominator is one.
pub fn format_ratio(r: &BigRational) -> String {
    r.to_string()
}
