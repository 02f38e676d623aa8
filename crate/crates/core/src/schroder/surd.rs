//! Exact arithmetic in the quadratic field `Q(√2)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// `rational + irrational·√2`.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadSurd {
    pub rational: BigRational,
    pub irrational: BigRational,
}

impl QuadSurd {
    pub fn new(rational: BigRational, irrational: BigRational) -> Self {
        Self { rational, irrational }
    }

    /// `p/d + (q/d)√2`.
    pub fn from_ints(p: i64, q: i64, d: i64) -> Self {
        let d = BigInt::from(d);
        Self::new(
            BigRational::new(p.into(), d.clone()),
            BigRational::new(q.into(), d),
        )
    }

    pub fn sqrt2() -> Self {
        Self::from_ints(0, 1, 1)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0, 1)
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.rational.clone(), -&self.irrational)
    }

    /// Field norm `x · conj(x)`, a rational.
    pub fn norm(&self) -> BigRational {
        &self.rational * &self.rational - BigRational::from_integer(2.into()) * &self.irrational * &self.irrational
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.irrational.is_zero()
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(&self.rational * k, &self.irrational * k)
    }

    /// Double-precision value, for tolerances on small constants only.
    pub fn to_f64(&self) -> f64 {
        crate::exact::to_f64(&self.rational) + crate::exact::to_f64(&self.irrational) * std::f64::consts::SQRT_2
    }
}

impl Add for &QuadSurd {
    type Output = QuadSurd;
    fn add(self, o: &QuadSurd) -> QuadSurd {
        QuadSurd::new(&self.rational + &o.rational, &self.irrational + &o.irrational)
    }
}

impl Sub for &QuadSurd {
    type Output = QuadSurd;
    fn sub(self, o: &QuadSurd) -> QuadSurd {
        QuadSurd::new(&self.rational - &o.rational, &self.irrational - &o.irrational)
    }
}

impl Mul for &QuadSurd {
    type Output = QuadSurd;
    fn mul(self, o: &QuadSurd) -> QuadSurd {
        let two = BigRational::from_integer(2.into());
        QuadSurd::new(
            &self.rational * &o.rational + two * &self.irrational * &o.irrational,
            &self.rational * &o.irrational + &self.irrational * &o.rational,
        )
    }
}

impl Neg for &QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd::new(-&self.rational, -&self.irrational)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt(2)", self.rational, self.irrational)
    }
}

impl fmt::Debug for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadSurd({self})")
    }
}

/// Algebraic constants governing the growth of the sequences, all exact.
#[derive(Clone, Debug)]
pub struct AsymptoticConstants {
    /// `3 − 2√2`, the smaller root of `t² − 6t + 1` and the radius of convergence.
    pub r1: QuadSurd,
    /// `3 + 2√2`.
    pub r2: QuadSurd,
    /// `2 − √2`, the growth rate of the mean.
    pub mean_slope: QuadSurd,
    /// `(3 − 2√2)/4`.
    pub quarter_r1: QuadSurd,
    /// `3(3 − 2√2)/4`.
    pub three_quarter_r1: QuadSurd,
    /// `(16 − 11√2)/2`, the growth rate of the variance.
    pub variance_slope: QuadSurd,
}

impl Default for AsymptoticConstants {
    fn default() -> Self {
        Self {
            r1: QuadSurd::from_ints(3, -2, 1),
            r2: QuadSurd::from_ints(3, 2, 1),
            mean_slope: QuadSurd::from_ints(2, -1, 1),
            quarter_r1: QuadSurd::from_ints(3, -2, 4),
            three_quarter_r1: QuadSurd::from_ints(9, -6, 4),
            variance_slope: QuadSurd::from_ints(16, -11, 2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn root_relations() {
        let k = AsymptoticConstants::default();
        assert_eq!(&k.r1 * &k.r2, QuadSurd::one());
        assert_eq!(&k.r1 + &k.r2, QuadSurd::from_ints(6, 0, 1));
        assert_eq!(k.r1.conjugate(), k.r2);
        // r1 is a root of t² − 6t + 1.
        let six = QuadSurd::from_ints(6, 0, 1);
        let lhs = &(&k.r1 * &k.r1) - &(&six * &k.r1);
        assert!((&lhs + &QuadSurd::one()).is_zero());
        assert!(k.r1.to_f64() < k.r2.to_f64());
        assert!((k.variance_slope.to_f64() - 0.221825).abs() < 1e-6);
        assert!((k.quarter_r1.to_f64() - 0.042893).abs() < 1e-6);
    }

    #[test]
    fn powers() {
        let r2 = QuadSurd::from_ints(3, 2, 1);
        assert_eq!(r2.pow(0), QuadSurd::one());
        assert_eq!(r2.pow(2), QuadSurd::from_ints(17, 12, 1));
        assert_eq!(r2.pow(57).norm(), BigRational::one());
        let sqrt2 = QuadSurd::sqrt2();
        assert_eq!(sqrt2.pow(2), QuadSurd::from_ints(2, 0, 1));
    }
}
