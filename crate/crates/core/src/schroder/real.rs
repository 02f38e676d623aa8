//! Thin layer over `astro-float` for evaluating asymptotic formulas.

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::surd::QuadSurd;
use crate::error::{domain, Result};

pub const DEFAULT_PRECISION_BITS: usize = 256;
pub const MIN_PRECISION_BITS: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision plus the constant cache that `π` needs.
pub struct RealContext {
    bits: usize,
    consts: Consts,
}

impl RealContext {
    pub fn new(bits: usize) -> Result<Self> {
        if bits < MIN_PRECISION_BITS {
            return Err(domain(format!(
                "working precision must be at least {MIN_PRECISION_BITS} bits, got {bits}"
            )));
        }
        let consts = Consts::new().map_err(|e| domain(format!("constant cache: {e:?}")))?;
        Ok(Self { bits, consts })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn int(&self, x: &BigInt) -> BigFloat {
        if x.is_zero() {
            return BigFloat::from_word(0, self.bits);
        }
        // Normalized mantissa: the top bit of the last word is set and the
        // value is 0.mantissa × 2^bits.
        let len = x.magnitude().to_u64_digits().len() as u64;
        let words: Vec<Word> = (x.magnitude() << (64 * len - x.bits())).to_u64_digits();
        let sign = if x.is_negative() { Sign::Neg } else { Sign::Pos };
        let exact = BigFloat::from_words(&words, sign, x.bits() as i32);
        self.round(exact)
    }

    pub fn small(&self, x: i64) -> BigFloat {
        self.int(&BigInt::from(x))
    }

    pub fn ratio(&self, r: &BigRational) -> BigFloat {
        self.int(r.numer()).div(&self.int(r.denom()), self.bits, RM)
    }

    pub fn sqrt2(&self) -> BigFloat {
        self.small(2).sqrt(self.bits, RM)
    }

    pub fn surd(&self, x: &QuadSurd) -> BigFloat {
        let q = self.ratio(&x.irrational).mul(&self.sqrt2(), self.bits, RM);
        self.ratio(&x.rational).add(&q, self.bits, RM)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.consts.pi(self.bits, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, RM)
    }

    fn round(&self, mut x: BigFloat) -> BigFloat {
        // Inputs wider than the working precision are rounded once here.
        let _ = x.set_precision(self.bits, RM);
        x
    }
}

/// Exact value of a finite `BigFloat`.
pub fn to_rational(x: &BigFloat) -> Option<BigRational> {
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    let (words, _, sign, exponent, _) = x.as_raw_parts()?;
    let mantissa = BigInt::from(BigUint::new(
        words.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect(),
    ));
    // value = 0.mantissa × 2^exponent
    let shift = exponent as i64 - 64 * words.len() as i64;
    let magnitude = if shift >= 0 {
        BigRational::from_integer(mantissa << shift as u64)
    } else {
        BigRational::new(mantissa, BigInt::one() << (-shift) as u64)
    };
    Some(if sign == Sign::Neg { -magnitude } else { magnitude })
}

pub fn to_f64(x: &BigFloat) -> f64 {
    to_rational(x).map_or(f64::NAN, |r| crate::exact::to_f64(&r))
}
