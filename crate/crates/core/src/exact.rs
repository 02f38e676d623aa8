//! Rendering and parsing of exact rationals.
//!
//! Machine-readable output always carries rationals as `p/q` (with `q = 1`
//! for integers) and decimals with an explicit number of significant digits.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_SIG_DIGITS: usize = 30;

/// `p/q` with `q > 0`, always including the denominator.
pub fn format_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("{s:?}: zero denominator")));
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// Decimal rendering with `digits` significant digits, rounded half away
/// from zero, in plain notation when the exponent is moderate and
/// scientific notation otherwise. Computed exactly from the rational.
pub fn format_decimal(r: &BigRational, digits: usize) -> String {
    let digits = digits.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();

    // Find e with 10^e <= |r| < 10^(e+1).
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    let ten = BigInt::from(10u32);
    let pow10 = |k: i64| ten.pow(k.unsigned_abs() as u32);
    let cmp_ge = |k: i64| {
        // |r| >= 10^k
        if k >= 0 {
            num >= &den * pow10(k)
        } else {
            &num * pow10(k) >= den
        }
    };
    while !cmp_ge(e) {
        e -= 1;
    }
    while cmp_ge(e + 1) {
        e += 1;
    }

    // Scale so that the integer part has exactly `digits` digits.
    let shift = digits as i64 - 1 - e;
    let (n, d) = if shift >= 0 {
        (&num * pow10(shift), den)
    } else {
        (num, den * pow10(-shift))
    };
    let (mut q, rem) = n.div_rem(&d);
    if rem * 2 >= d {
        q += BigInt::one();
    }
    let mut mantissa = q.to_string();
    if mantissa.len() > digits {
        // Rounding carried into a new leading digit.
        mantissa.truncate(digits);
        e += 1;
    }

    let sign = if negative { "-" } else { "" };
    if (-7..=40).contains(&e) {
        let m = mantissa.as_bytes();
        let body = if e >= 0 {
            let int_len = e as usize + 1;
            if int_len >= m.len() {
                let mut s = mantissa.clone();
                s.extend(std::iter::repeat_n('0', int_len - m.len()));
                s
            } else {
                format!("{}.{}", &mantissa[..int_len], &mantissa[int_len..])
            }
        } else {
            let zeros = "0".repeat((-e - 1) as usize);
            format!("0.{zeros}{mantissa}")
        };
        format!("{sign}{body}")
    } else {
        format!("{sign}{}.{}e{}", &mantissa[..1], &mantissa[1..], e)
    }
}

/// Serde adapter rendering a `BigRational` as a `"p/q"` string.
pub mod serde_ratio {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_ratio(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_ratio(&text).map_err(serde::de::Error::custom)
    }
}

/// Lossy conversion used only for diagnostics and tolerance checks.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    let (n, d) = (r.numer(), r.denom());
    let kn = n.bits().saturating_sub(62);
    let kd = d.bits().saturating_sub(62);
    let top = (n >> kn).to_f64().unwrap_or(f64::NAN);
    let bottom = (d >> kd).to_f64().unwrap_or(f64::NAN);
    top / bottom * 2f64.powi(kn as i32 - kd as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn ratio_round_trip() {
        for r in [q(5, 3), q(-7, 2), q(4, 1), q(0, 1)] {
            assert_eq!(parse_ratio(&format_ratio(&r)).unwrap(), r);
        }
        assert_eq!(format_ratio(&q(10, 6)), "5/3");
        assert_eq!(format_ratio(&q(2, 1)), "2/1");
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn decimals() {
        assert_eq!(format_decimal(&q(5, 3), 30), "1.66666666666666666666666666667");
        assert_eq!(format_decimal(&q(1, 8), 5), "0.12500");
        assert_eq!(format_decimal(&q(-2, 3), 3), "-0.667");
        assert_eq!(format_decimal(&q(999, 1000), 2), "1.0");
        assert_eq!(format_decimal(&q(123456, 1), 3), "123000");
        assert_eq!(format_decimal(&q(1, 1000), 2), "0.0010");
    }

    #[test]
    fn f64_of_huge_ratio() {
        let big = BigInt::from(3u32).pow(2000);
        let r = BigRational::new(&big * 5, &big * 3);
        assert!((to_f64(&r) - 5.0 / 3.0).abs() < 1e-15);
    }
}
