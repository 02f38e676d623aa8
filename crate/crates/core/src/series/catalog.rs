//! The generating functions of the first and second conditional moments.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::TruncatedSeries;
use crate::error::{domain, Error, Result};
use crate::exact::serde_ratio;

pub const DEFAULT_ORDER: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesName {
    /// `√(t² − 6t + 1)`.
    X,
    /// `1/√(t² − 6t + 1)`.
    XInv,
    /// Counting series of separable permutations.
    S,
    /// `Σ s_n c_n^{+,−} t^n`.
    GPm,
    /// `Σ s_n c_n^{−,−} t^n`.
    GMm,
    /// `Σ s_n C_n^{+,−} t^n`.
    HPm,
    /// `Σ s_n C_n^{−,−} t^n`.
    HMm,
}

impl SeriesName {
    pub const ALL: [SeriesName; 7] = [
        SeriesName::X,
        SeriesName::XInv,
        SeriesName::S,
        SeriesName::GPm,
        SeriesName::GMm,
        SeriesName::HPm,
        SeriesName::HMm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeriesName::X => "X",
            SeriesName::XInv => "Xinv",
            SeriesName::S => "s",
            SeriesName::GPm => "G_pm",
            SeriesName::GMm => "G_mm",
            SeriesName::HPm => "H_pm",
            SeriesName::HMm => "H_mm",
        }
    }
}

impl fmt::Display for SeriesName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeriesName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                domain(format!("unknown series {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub order: usize,
    pub x: TruncatedSeries,
    pub x_inv: TruncatedSeries,
    pub s: TruncatedSeries,
    pub g_pm: TruncatedSeries,
    pub g_mm: TruncatedSeries,
    pub h_pm: TruncatedSeries,
    pub h_mm: TruncatedSeries,
}

impl Catalog {
    pub fn get(&self, name: SeriesName) -> &TruncatedSeries {
        match name {
            SeriesName::X => &self.x,
            SeriesName::XInv => &self.x_inv,
            SeriesName::S => &self.s,
            SeriesName::GPm => &self.g_pm,
            SeriesName::GMm => &self.g_mm,
            SeriesName::HPm => &self.h_pm,
            SeriesName::HMm => &self.h_mm,
        }
    }

    /// `t² − 6t + 1` at the catalog's order.
    pub fn quadratic(&self) -> TruncatedSeries {
        TruncatedSeries::from_ints(&[1, -6, 1], self.order)
    }

    pub fn poly(&self, coeffs: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_ints(coeffs, self.order)
    }

    /// Numerator and denominator of the rational expression for `H_pm` in
    /// terms of `s`, `G_pm` and `G_mm`.
    pub fn h_pm_fraction(&self) -> (TruncatedSeries, TruncatedSeries) {
        let n = self.order;
        let t = TruncatedSeries::from_ints(&[0, 1], n);
        let s2 = &self.s * &self.s;
        let s_g = &self.s * &self.g_pm;
        let two = BigRational::from_integer(2.into());
        let mut numer = &t + &s2.shift(1);
        numer = &numer + &(&self.g_mm * &self.g_pm).scale(&two);
        numer = &numer + &s_g.shift(1).scale(&two);
        numer = &numer + &(&s_g * &self.g_pm).scale(&two);
        (numer, self.pm_denominator(&s2))
    }

    /// `1 − t − s − 2s² − ts`, shared by `G_pm` and `H_pm`.
    pub fn pm_denominator(&self, s2: &TruncatedSeries) -> TruncatedSeries {
        let two = BigRational::from_integer(2.into());
        let mut d = &self.poly(&[1, -1]) - &self.s;
        d = &d - &s2.scale(&two);
        &d - &self.s.shift(1)
    }
}

/// Builds every series to order `order`.
///
/// `X` comes from a Newton inverse square root; `G_mm` and `H_mm` are
/// assembled from their linear relations to `G_pm` and `H_pm`, and `H_pm`
/// from its rational expression in the lower-order series.
pub fn build_catalog(order: usize) -> Result<Catalog> {
    if order < 4 {
        return Err(domain("the catalog needs order >= 4"));
    }
    let poly = |c: &[i64]| TruncatedSeries::from_ints(c, order);
    let half = BigRational::new(1.into(), 2.into());
    let two = BigRational::from_integer(2.into());

    let f = poly(&[1, -6, 1]);
    let x_inv = f.inv_sqrt()?;
    let x = &f * &x_inv;
    let s = (&poly(&[1, -1]) - &x).scale(&half);
    let g_pm = &poly(&[0, 1, -1]) * &x_inv;
    let two_s_plus_t = &s.scale(&two) + &poly(&[0, 1]);
    let g_mm = &(&two_s_plus_t * &g_pm) + &s.shift(1);

    let mut cat = Catalog {
        order,
        x,
        x_inv,
        s,
        g_pm,
        g_mm,
        h_pm: TruncatedSeries::zero(order),
        h_mm: TruncatedSeries::zero(order),
    };
    let (numer, denom) = cat.h_pm_fraction();
    cat.h_pm = numer.div(&denom)?;
    let mut h_mm = &two_s_plus_t * &cat.h_pm;
    h_mm = &h_mm + &cat.s.shift(1);
    h_mm = &h_mm + &cat.g_pm.shift(1).scale(&two);
    h_mm = &h_mm + &(&cat.g_pm * &cat.g_pm).scale(&two);
    cat.h_mm = h_mm;
    Ok(cat)
}

/// Exact moments at one size, read off the catalog.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactMoments {
    pub n: usize,
    /// Mean of the `(+,−)` length; conditioning does not change it.
    #[serde(with = "serde_ratio")]
    pub mean_pm: BigRational,
    /// Mean of the `(−,−)` length given plus-indecomposable.
    #[serde(with = "serde_ratio")]
    pub c_mm: BigRational,
    /// Second moment of the `(+,−)` length.
    #[serde(with = "serde_ratio")]
    pub secmom_pm: BigRational,
    /// Second moment of the `(−,−)` length given plus-indecomposable.
    #[serde(rename = "C_mm", with = "serde_ratio")]
    pub big_c_mm: BigRational,
    #[serde(with = "serde_ratio")]
    pub var_pm: BigRational,
}

pub fn exact_moments(n: usize, catalog: &Catalog) -> Result<ExactMoments> {
    if n == 0 {
        return Err(domain("moments are defined for n >= 1"));
    }
    if n > catalog.order {
        return Err(Error::Capacity { what: "exact_moments", n, cap: catalog.order });
    }
    let s_n = catalog.s.coeff(n);
    let mean_pm = catalog.g_pm.coeff(n) / s_n;
    let secmom_pm = catalog.h_pm.coeff(n) / s_n;
    Ok(ExactMoments {
        n,
        c_mm: catalog.g_mm.coeff(n) / s_n,
        big_c_mm: catalog.h_mm.coeff(n) / s_n,
        var_pm: &secmom_pm - &mean_pm * &mean_pm,
        mean_pm,
        secmom_pm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::las::moment_table;
    use crate::schroder::schroder_numbers;
    use crate::series::is_nonnegative_integral;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn low_order_coefficients() {
        let cat = build_catalog(16).unwrap();
        let s: Vec<BigRational> = schroder_numbers(16).into_iter().map(BigRational::from_integer).collect();
        assert_eq!(&cat.s.coeffs()[1..], &s[..]);
        assert_eq!(cat.s.coeff(0), &int(0));
        assert_eq!(&cat.g_pm.coeffs()[1..4], &[int(1), int(2), int(10)]);
        assert_eq!(cat.g_mm.coeff(2), &int(4));
        assert_eq!(cat.h_pm.coeff(2), &int(2));
        for f in [&cat.s, &cat.g_pm, &cat.g_mm, &cat.h_pm, &cat.h_mm] {
            assert!(is_nonnegative_integral(f));
        }
        assert!(build_catalog(3).is_err());
    }

    #[test]
    fn coefficients_match_enumeration() {
        let cat = build_catalog(16).unwrap();
        for n in 1..=7 {
            let t = moment_table(n).unwrap();
            let m = exact_moments(n, &cat).unwrap();
            assert_eq!(m.mean_pm, t.pm.c, "n = {n}");
            assert_eq!(m.c_mm, t.mm.c, "n = {n}");
            assert_eq!(m.secmom_pm, t.pm.big_c, "n = {n}");
            assert_eq!(m.big_c_mm, t.mm.big_c, "n = {n}");
        }
    }

    #[test]
    fn small_moments() {
        let cat = build_catalog(8).unwrap();
        assert_eq!(exact_moments(2, &cat).unwrap().mean_pm, int(1));
        assert_eq!(
            exact_moments(3, &cat).unwrap().mean_pm,
            BigRational::new(5.into(), 3.into())
        );
        assert!(matches!(exact_moments(9, &cat), Err(Error::Capacity { .. })));
        assert!(exact_moments(0, &cat).is_err());
    }

    #[test]
    fn names_round_trip() {
        for k in SeriesName::ALL {
            assert_eq!(k.name().parse::<SeriesName>().unwrap(), k);
        }
        assert!("G".parse::<SeriesName>().is_err());
    }
}
