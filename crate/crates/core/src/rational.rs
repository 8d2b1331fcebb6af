//! Exact rational helpers shared by the procedures and the harness.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

/// Parses `a/b` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `ceil(r * n)`, clamped below at zero.
pub fn ceil_mul(r: &Rational, n: u32) -> u32 {
    let v = (r * Rational::from_integer(n as i128)).ceil().to_integer();
    v.max(0) as u32
}

/// `floor(r * n)`, clamped below at zero.
pub fn floor_mul(r: &Rational, n: u32) -> u32 {
    let v = (r * Rational::from_integer(n as i128)).floor().to_integer();
    v.max(0) as u32
}

pub fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Compares `value` with `base^exponent` exactly, for a non-negative rational exponent.
/// Returns `value.cmp(base^exponent)` in the sense of real numbers.
pub fn cmp_with_power(value: u128, base: u64, exponent: &Rational) -> std::cmp::Ordering {
    assert!(!exponent.is_negative(), "negative exponent");
    // value ? base^(a/b)  <=>  value^b ? base^a
    let a = exponent.numer().to_u32().expect("exponent numerator too large");
    let b = exponent.denom().to_u32().expect("exponent denominator too large");
    let lhs = BigUint::from(value).pow(b);
    let rhs = BigUint::from(base).pow(a);
    lhs.cmp(&rhs)
}

/// Smallest integer `n >= 0` with `n >= base^exponent`.
pub fn ceil_power(base: u64, exponent: &Rational) -> u128 {
    if exponent.is_zero() {
        return 1;
    }
    let approx = (base as f64).powf(to_f64(exponent)).ceil().max(0.0) as u128;
    let mut n = approx.saturating_sub(2);
    while cmp_with_power(n, base, exponent) == std::cmp::Ordering::Less {
        n += 1;
    }
    n
}

pub fn lcm_u128(a: u128, b: u128) -> Result<u128> {
    if a.is_zero() || b.is_zero() {
        return Ok(0);
    }
    (a / a.gcd(&b)).checked_mul(b).ok_or(Error::Overflow("lcm"))
}

/// Serde adapter writing a rational as a `[numerator, denominator]` pair.
pub mod pair {
    use super::Rational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        [*r.numer() as i64, *r.denom() as i64].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let [n, den] = <[i64; 2]>::deserialize(d)?;
        if den == 0 {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Rational::new(n as i128, den as i128))
    }
}

pub fn is_unit_interval_open(r: &Rational) -> bool {
    r > &Rational::zero() && r < &Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("4").unwrap(), rat(4, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat(2, 4)), "1/2");
    }

    #[test]
    fn floors_and_ceils() {
        assert_eq!(ceil_mul(&rat(1, 3), 4), 2);
        assert_eq!(floor_mul(&rat(1, 3), 4), 1);
        assert_eq!(ceil_mul(&rat(0, 1), 9), 0);
        assert_eq!(floor_mul(&rat(1, 2), 3), 1);
    }

    #[test]
    fn power_comparisons() {
        // 5 vs 5^(1/2)
        assert_eq!(cmp_with_power(5, 5, &rat(1, 2)), Ordering::Greater);
        assert_eq!(cmp_with_power(1, 5, &rat(1, 4)), Ordering::Less);
        assert_eq!(cmp_with_power(4, 2, &rat(2, 1)), Ordering::Equal);
        assert_eq!(ceil_power(2, &rat(5, 2)), 6); // 2^2.5 = 5.65..
        assert_eq!(ceil_power(4, &rat(1, 2)), 2);
        assert_eq!(ceil_power(7, &rat(0, 1)), 1);
    }
}
