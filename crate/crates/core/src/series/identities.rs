//! Coefficientwise checks of the algebraic identities between the series.
//!
//! Every identity is brought to the form `lhs = rhs` with both sides
//! polynomial in the catalog series; divisions happen only by series with
//! a nonzero constant term.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::catalog::{build_catalog, Catalog};
use super::TruncatedSeries;
use crate::error::{domain, Result};
use crate::las::Status;
use crate::schroder::{coeff_sequence, CoeffKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub order: usize,
    pub status: Status,
    /// Lowest coefficient index where the two sides differ.
    pub first_mismatch: Option<usize>,
    /// Informational lines record how the literal closed forms compare;
    /// they do not count towards the overall verdict.
    pub informational: bool,
}

impl IdentityReport {
    fn compare(identity: &str, lhs: &TruncatedSeries, rhs: &TruncatedSeries, informational: bool) -> Self {
        let first_mismatch = lhs.first_difference(rhs);
        Self {
            identity: identity.to_string(),
            order: lhs.order().min(rhs.order()),
            status: Status::from_bool(first_mismatch.is_none()),
            first_mismatch,
            informational,
        }
    }
}

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

/// Verifies every identity to order `order`; builds its own catalog.
pub fn verify_identities(order: usize) -> Result<Vec<IdentityReport>> {
    if order < 16 {
        return Err(domain("identity verification needs order >= 16"));
    }
    verify_with_catalog(&build_catalog(order)?)
}

pub fn verify_with_catalog(cat: &Catalog) -> Result<Vec<IdentityReport>> {
    let n = cat.order;
    let p = |c: &[i64]| cat.poly(c);
    let f = cat.quadratic();
    let (x, xi, s) = (&cat.x, &cat.x_inv, &cat.s);
    let (g_pm, g_mm, h_pm, h_mm) = (&cat.g_pm, &cat.g_mm, &cat.h_pm, &cat.h_mm);
    let s2 = s * s;
    let denom = cat.pm_denominator(&s2);
    let two_s_plus_t = &s.scale(&q(2, 1)) + &p(&[0, 1]);
    let t_minus_3_inv = p(&[-3, 1]).inverse()?;
    let mut out = Vec::new();
    let mut check = |name: &str, lhs: TruncatedSeries, rhs: TruncatedSeries| {
        out.push(IdentityReport::compare(name, &lhs, &rhs, false));
    };

    check("X^2 = t^2-6t+1", x * x, f.clone());
    check("X * Xinv = 1", x * xi, p(&[1]));
    check("2s+t = 1-X", two_s_plus_t.clone(), &p(&[1]) - x);

    let sequence = TruncatedSeries::from_integers(
        std::iter::once(BigInt::from(0))
            .chain(crate::schroder::schroder_numbers(n))
            .collect(),
        n,
    );
    check("s = counting series", s.clone(), sequence);

    // s² = ½(t² − 4t + 1 − (1 − t)X)
    let rhs = (&p(&[1, -4, 1]) - &(&p(&[1, -1]) * x)).scale(&q(1, 2));
    check("s^2", s2.clone(), rhs);

    // 1 − t − s − 2s² − ts = −½(t² − 6t + 1) − ½(t − 3)X
    let rhs = (&f + &(&p(&[-3, 1]) * x)).scale(&q(-1, 2));
    check("G_pm denominator", denom.clone(), rhs);

    // s² + 1 = 3/2 − 2t + ½t² − ½(1 − t)X
    let rhs = (&p(&[3, -4, 1]) - &(&p(&[1, -1]) * x)).scale(&q(1, 2));
    check("s^2 + 1", &s2 + &p(&[1]), rhs);

    // G_pm (1 − t − s − 2s² − ts) = t (1 + s²)
    check("G_pm rational form", g_pm * &denom, (&p(&[1]) + &s2).shift(1));
    check("G_pm closed form", g_pm * x, p(&[0, 1, -1]));

    // G_mm = G_pm − t(1 − t)/2 − (t/2) X
    let rhs = &(g_pm - &p(&[0, 1, -1]).scale(&q(1, 2))) - &x.shift(1).scale(&q(1, 2));
    check("G_mm closed form", g_mm.clone(), rhs);
    check("G_mm from G_pm", g_mm.clone(), &(&two_s_plus_t * g_pm) + &s.shift(1));

    // t(−3 + 4t − t² + (1 − t)X) = G_pm (t² − 6t + 1 + (t − 3)X)
    let lhs = (&p(&[-3, 4, -1]) + &(&p(&[1, -1]) * x)).shift(1);
    let rhs = g_pm * &(&f + &(&p(&[-3, 1]) * x));
    check("G_pm cleared form", lhs, rhs);

    let a = coeff_sequence(CoeffKind::A, n);
    let mut from_a = vec![BigInt::from(0), BigInt::from(1)];
    from_a.extend((2..=n).map(|k| &a[k - 1] - &a[k - 2]));
    check("G_pm from a_n differences", g_pm.clone(), TruncatedSeries::from_integers(from_a, n));

    let (numer, _) = cat.h_pm_fraction();
    check("H_pm rational form", h_pm * &denom, numer.clone());

    // Numerator times X²: (5/2 t³ − 4t² + 3/2 t) X² − ½ t(1−t) X³ − t²(1−t)² X − t²(1−t)²(t−3)
    let t1mt = p(&[0, 1, -1]);
    let t1mt_sq = &t1mt * &t1mt;
    let mut rhs = &p(&[0, 3, -8, 5]).scale(&q(1, 2)) * &f;
    rhs = &rhs - &(&(&t1mt * &f) * x).scale(&q(1, 2));
    rhs = &rhs - &(&t1mt_sq * x);
    rhs = &rhs - &(&t1mt_sq * &p(&[-3, 1]));
    check("H_pm numerator", &numer * &f, rhs);

    // (X² + (t−3)X) (1/((t−3)X) − 1/8 + X/(8(t−3))) = 1
    let y = p(&[-3, 1]);
    let r = &(&(&t_minus_3_inv * xi) - &p(&[1]).scale(&q(1, 8))) + &(x * &t_minus_3_inv).scale(&q(1, 8));
    check("inverse of X^2 + (t-3)X", &(&f + &(&y * x)) * &r, p(&[1]));

    // Fully expanded form before the final simplification.
    let cubic = p(&[0, -3, 8, -5]);
    let cubic_over = &cubic * &t_minus_3_inv;
    let mut explicit = &cubic_over * xi;
    explicit = &explicit - &cubic.scale(&q(1, 8));
    explicit = &explicit + &(&cubic_over * x).scale(&q(1, 8));
    explicit = &explicit + &(&t1mt * &t_minus_3_inv);
    explicit = &explicit - &(&t1mt * x).scale(&q(1, 8));
    explicit = &explicit + &(&(&t1mt * &t_minus_3_inv) * &f).scale(&q(1, 8));
    let xi3 = &(xi * xi) * xi;
    explicit = &explicit + &(&t1mt_sq * &xi3).scale(&q(2, 1));
    check("H_pm expanded form", h_pm.clone(), explicit);

    // Closed form with the ½t²(1−t)X term carrying its 1/(t−3) factor.
    let t2_1mt = p(&[0, 0, 1, -1]);
    let closed_core = &(&t1mt_sq * &xi3).scale(&q(2, 1)) + &(&cubic_over * xi);
    let mut corrected = &closed_core + &(&(&t2_1mt * x) * &t_minus_3_inv).scale(&q(1, 2));
    corrected = &corrected - &t2_1mt.scale(&q(1, 2));
    check("H_pm closed form (corrected)", h_pm.clone(), corrected);

    check(
        "H_mm from H_pm",
        h_mm.clone(),
        &(&(&(&two_s_plus_t * h_pm) + &s.shift(1)) + &g_pm.shift(1).scale(&q(2, 1))) + &(g_pm * g_pm).scale(&q(2, 1)),
    );

    // Closed forms taken literally, without the correction.
    let mut literal_h_pm = &closed_core + &(&t2_1mt * x).scale(&q(1, 2));
    literal_h_pm = &literal_h_pm - &t2_1mt.scale(&q(1, 2));
    out.push(IdentityReport::compare("H_pm closed form (literal)", h_pm, &literal_h_pm, true));
    out.push(IdentityReport::compare(
        "H_mm closed form (literal)",
        h_mm,
        &literal_h_mm(cat, h_pm),
        true,
    ));
    out.push(IdentityReport::compare(
        "H_mm closed form (literal, literal H_pm)",
        h_mm,
        &literal_h_mm(cat, &literal_h_pm),
        true,
    ));
    Ok(out)
}

/// The literal closed form for `H_mm`, reading the ambiguous factor
/// `½t²(1−t)^(t²−6t+1)` as the product `½t²(1−t)(t²−6t+1)`.
pub fn literal_h_mm(cat: &Catalog, h_pm: &TruncatedSeries) -> TruncatedSeries {
    let p = |c: &[i64]| cat.poly(c);
    let f = cat.quadratic();
    let t_minus_3_inv = p(&[-3, 1]).inverse().expect("t - 3 is a unit");
    let t1mt = p(&[0, 1, -1]);
    let t2_1mt = p(&[0, 0, 1, -1]);
    let mut h = h_pm - &(&p(&[0, -3, 8, -5]) * &t_minus_3_inv);
    h = &h - &(&t2_1mt * &f).scale(&q(1, 2));
    h = &h + &(&t2_1mt * &cat.x).scale(&q(1, 2));
    h = &h + &t1mt.scale(&q(1, 2));
    h = &h - &f.shift(1).scale(&q(1, 2));
    &h + &(&t2_1mt * &cat.x_inv).scale(&q(2, 1))
}
