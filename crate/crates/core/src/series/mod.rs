//! Exact truncated power series over the rationals.
//!
//! A [`TruncatedSeries`] of order `N` holds `c_0, …, c_N` and all
//! arithmetic is exact modulo `t^{N+1}`. On top of it sit the
//! generating-function catalog, exact moment extraction at large `n`, and
//! coefficientwise verification of algebraic identities.

mod catalog;
mod identities;
mod poly;

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use catalog::{build_catalog, exact_moments, Catalog, ExactMoments, SeriesName, DEFAULT_ORDER};
pub use identities::{verify_identities, verify_with_catalog, IdentityReport};

use crate::error::{domain, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    /// Pads with zeros or truncates to exactly `order + 1` coefficients.
    pub fn new(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::from_ints(&[1], order)
    }

    /// A polynomial given by small integer coefficients, lowest degree first.
    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(), order)
    }

    pub fn from_integers(coeffs: Vec<BigInt>, order: usize) -> Self {
        Self::new(coeffs.into_iter().map(BigRational::from_integer).collect(), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec(), order)
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut c = vec![BigRational::zero(); k];
        c.extend_from_slice(&self.coeffs);
        Self::new(c, self.order())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Whether every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(BigRational::is_integer)
    }

    /// Lowest index where the two series differ, up to the smaller order.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .position(|(a, b)| a != b)
    }

    /// Integer coefficients and their common denominator.
    fn to_scaled_integers(&self) -> (Vec<BigInt>, BigInt) {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| if c.denom().is_one() { acc } else { acc.lcm(c.denom()) });
        let ints = self
            .coeffs
            .iter()
            .map(|c| {
                if c.denom().is_one() {
                    c.numer() * &lcm
                } else {
                    c.numer() * (&lcm / c.denom())
                }
            })
            .collect();
        (ints, lcm)
    }

    fn with_order(&self, order: usize) -> Self {
        self.truncate(order)
    }

    /// Product truncated to `order`, whatever the operand orders.
    fn mul_to(&self, other: &Self, order: usize) -> Self {
        let (a, da) = self.to_scaled_integers();
        let (b, db) = other.to_scaled_integers();
        let prod = poly::mul_truncated(&a, &b, order + 1);
        let denom = da * db;
        let coeffs = if denom.is_one() {
            prod.into_iter().map(BigRational::from_integer).collect()
        } else {
            prod.into_iter().map(|c| BigRational::new(c, denom.clone())).collect()
        };
        Self::new(coeffs, order)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.order()), |acc, _| &acc * self)
    }

    /// Multiplicative inverse by Newton iteration `g ← g (2 − f g)`.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(domain("series inverse needs a nonzero constant term"));
        }
        let order = self.order();
        let mut g = Self::new(vec![c0.recip()], 0);
        let mut prec = 0;
        while prec < order {
            prec = (2 * prec + 1).min(order);
            let f = self.with_order(prec);
            let fg = f.mul_to(&g, prec);
            let correction = &Self::from_ints(&[2], prec) - &fg;
            g = g.mul_to(&correction, prec);
        }
        Ok(g.with_order(order))
    }

    /// `f^{−1/2}` with constant term 1, by Newton iteration
    /// `g ← g + g (1 − f g²) / 2`.
    pub fn inv_sqrt(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(domain("series square root needs constant term 1"));
        }
        let order = self.order();
        let half = BigRational::new(1.into(), 2.into());
        let mut g = Self::one(0);
        let mut prec = 0;
        while prec < order {
            prec = (2 * prec + 1).min(order);
            let f = self.with_order(prec);
            let g2 = g.mul_to(&g, prec);
            let residual = &Self::one(prec) - &f.mul_to(&g2, prec);
            g = &g.with_order(prec) + &g.mul_to(&residual, prec).scale(&half);
        }
        Ok(g.with_order(order))
    }

    /// `f^{1/2}` on the branch with constant term 1.
    pub fn sqrt(&self) -> Result<Self> {
        Ok(self * &self.inv_sqrt()?)
    }

    /// Exact `f / g` where `g` has a nonzero constant term.
    pub fn div(&self, g: &Self) -> Result<Self> {
        Ok(self * &g.inverse()?)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, o: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(o.order());
        TruncatedSeries {
            coeffs: self.coeffs[..=order].iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, o: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(o.order());
        TruncatedSeries {
            coeffs: self.coeffs[..=order].iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, o: &TruncatedSeries) -> TruncatedSeries {
        self.mul_to(o, self.order().min(o.order()))
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

/// Newton square root; see [`TruncatedSeries::sqrt`].
pub fn series_sqrt(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    f.sqrt()
}

/// Newton inverse; see [`TruncatedSeries::inverse`].
pub fn series_inverse(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    f.inverse()
}

/// Whether every coefficient is a nonnegative integer.
pub fn is_nonnegative_integral(f: &TruncatedSeries) -> bool {
    f.coeffs().iter().all(|c| c.is_integer() && !c.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn geometric_inverse() {
        let inv = TruncatedSeries::from_ints(&[1, -1], 20).inverse().unwrap();
        assert_eq!(inv, TruncatedSeries::from_ints(&[1; 21], 20));
        assert!(TruncatedSeries::from_ints(&[0, 1], 5).inverse().is_err());
        let third = TruncatedSeries::from_ints(&[3], 4).inverse().unwrap();
        assert_eq!(third.coeff(0), &q(1, 3));
    }

    #[test]
    fn sqrt_of_defining_quadratic() {
        let f = TruncatedSeries::from_ints(&[1, -6, 1], 6);
        let x = f.sqrt().unwrap();
        assert_eq!(x, TruncatedSeries::from_ints(&[1, -3, -4, -12, -44, -180, -788], 6));
        assert!(TruncatedSeries::from_ints(&[2, 1], 4).sqrt().is_err());
    }

    /// Oracle: binomial series `(1 − 4u)^{−1/2} = Σ C(2n, n) u^n`.
    #[test]
    fn inv_sqrt_matches_central_binomials() {
        let g = TruncatedSeries::from_ints(&[1, -4], 40).inv_sqrt().unwrap();
        let mut binom = BigInt::one();
        for n in 0..=40u32 {
            assert_eq!(g.coeff(n as usize), &BigRational::from_integer(binom.clone()));
            binom = binom * (2 * (2 * n + 1)) / (n + 1);
        }
    }

    #[test]
    fn shift_scale_and_truncate() {
        let f = TruncatedSeries::from_ints(&[1, 2, 3], 4);
        assert_eq!(f.shift(2), TruncatedSeries::from_ints(&[0, 0, 1, 2, 3], 4));
        assert_eq!(f.scale(&q(1, 2)).coeff(1), &q(1, 1));
        assert_eq!(f.truncate(1).order(), 1);
        assert_eq!(f.first_difference(&f.shift(1)), Some(0));
        assert_eq!(f.first_difference(&f), None);
        assert!(f.is_integral());
        assert_eq!(f.pow(2).coeff(2), &q(10, 1));
    }

    fn arb_series(order: usize) -> impl Strategy<Value = TruncatedSeries> {
        prop::collection::vec((-50i64..50, 1i64..9), order).prop_map(move |v| {
            let mut c = vec![BigRational::one()];
            c.extend(v.into_iter().map(|(p, d)| q(p, d)));
            TruncatedSeries::new(c, order)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sqrt_squares_back(f in arb_series(64)) {
            let g = f.sqrt().unwrap();
            prop_assert_eq!(&g * &g, f);
        }

        #[test]
        fn inverse_multiplies_to_one(f in arb_series(64)) {
            let g = f.inverse().unwrap();
            prop_assert_eq!(&g * &f, TruncatedSeries::one(64));
        }

        #[test]
        fn multiplication_commutes(f in arb_series(30), g in arb_series(30)) {
            prop_assert_eq!(&f * &g, &g * &f);
        }
    }
}
