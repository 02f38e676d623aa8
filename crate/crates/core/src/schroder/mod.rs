//! Big Schröder numbers, the coefficients of `(t² − 6t + 1)^{m/2}`, and
//! high-precision evaluation of their asymptotic expansions.

mod real;
mod surd;

use std::fmt;
use std::str::FromStr;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use real::{to_f64 as real_to_f64, to_rational as real_to_rational, RealContext};
pub use real::{DEFAULT_PRECISION_BITS, MIN_PRECISION_BITS};
pub use surd::{AsymptoticConstants, QuadSurd};

use crate::error::{domain, Error, Result};

/// `s_1, …, s_count` from the first-block recursion
/// `s_n = 2 s_{n−1} + Σ_{j=2}^{n−1} s_j s_{n−j}`.
pub fn schroder_numbers(count: usize) -> Vec<BigInt> {
    let mut s = indexed_schroder(count);
    s.remove(0);
    s
}

/// Same as [`schroder_numbers`] with a leading `s_0 = 0`, so that `v[k] = s_k`.
pub(crate) fn indexed_schroder(count: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); count + 1];
    if count >= 1 {
        s[1] = BigInt::one();
    }
    for n in 2..=count {
        // j = 1 and j = n−1 contribute 2 s_{n−1} and s_{n−1}; the inner
        // terms are symmetric in j ↔ n−j.
        let mut acc = &s[n - 1] * if n >= 3 { 3u32 } else { 2u32 };
        let mut pairs = BigInt::zero();
        for j in 2..=(n - 1) / 2 {
            pairs += &s[j] * &s[n - j];
        }
        acc += pairs * 2u32;
        if n >= 4 && n % 2 == 0 {
            acc += &s[n / 2] * &s[n / 2];
        }
        s[n] = acc;
    }
    s
}

/// Exact law of the first plus-indecomposable block length, `j = 1..=n`.
pub fn block_distribution(n: usize) -> Result<Vec<BigRational>> {
    if n < 2 {
        return Err(domain("the block-length law is stated for n >= 2"));
    }
    let s = indexed_schroder(n);
    let half = BigRational::new(1.into(), 2.into());
    Ok((1..=n)
        .map(|j| match j {
            1 => BigRational::new(&s[1] * &s[n - 1], s[n].clone()),
            j if j == n => half.clone(),
            j => &half * BigRational::new(&s[j] * &s[n - j], s[n].clone()),
        })
        .collect())
}

/// Which power of `t² − 6t + 1` to expand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffKind {
    /// `(t² − 6t + 1)^{−1/2}`.
    A,
    /// `(t² − 6t + 1)^{1/2}`.
    B,
    /// `(t² − 6t + 1)^{−3/2}`.
    Alpha,
}

impl CoeffKind {
    /// Twice the exponent.
    pub fn doubled_exponent(self) -> i64 {
        match self {
            CoeffKind::A => -1,
            CoeffKind::B => 1,
            CoeffKind::Alpha => -3,
        }
    }
}

impl FromStr for CoeffKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(CoeffKind::A),
            "b" => Ok(CoeffKind::B),
            "alpha" => Ok(CoeffKind::Alpha),
            other => Err(domain(format!("unknown coefficient sequence {other:?}"))),
        }
    }
}

/// Coefficients `y_0, …, y_max` of `(t² − 6t + 1)^{m/2}`.
///
/// `y = f^{m/2}` satisfies `(t² − 6t + 1) y′ = m (t − 3) y`, which gives
/// `(n+1) y_{n+1} = (6n − 3m) y_n − (n − 1 − m) y_{n−1}`.
pub fn coeff_sequence(kind: CoeffKind, max: usize) -> Vec<BigInt> {
    let m = kind.doubled_exponent();
    let mut y = Vec::with_capacity(max + 1);
    y.push(BigInt::one());
    if max >= 1 {
        y.push(BigInt::from(-3 * m));
    }
    for n in 1..max {
        let ni = n as i64;
        let num = &y[n] * (6 * ni - 3 * m) - &y[n - 1] * (ni - 1 - m);
        let (q, r) = num.div_rem(&BigInt::from(ni + 1));
        debug_assert!(r.is_zero(), "non-integral coefficient at {}", n + 1);
        y.push(q);
    }
    y
}

/// Asymptotic formulas that can be evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticKind {
    SLead,
    SRefined,
    ALead,
    ARefined,
    BLead,
    /// Twice the negated refined Schröder expansion, since `b_n = −2 s_n`.
    BRefined,
    AlphaLead,
    AlphaRefined,
}

impl AsymptoticKind {
    pub const ALL: [AsymptoticKind; 8] = [
        AsymptoticKind::SLead,
        AsymptoticKind::SRefined,
        AsymptoticKind::ALead,
        AsymptoticKind::ARefined,
        AsymptoticKind::BLead,
        AsymptoticKind::BRefined,
        AsymptoticKind::AlphaLead,
        AsymptoticKind::AlphaRefined,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AsymptoticKind::SLead => "s_lead",
            AsymptoticKind::SRefined => "s_refined",
            AsymptoticKind::ALead => "a_lead",
            AsymptoticKind::ARefined => "a_refined",
            AsymptoticKind::BLead => "b_lead",
            AsymptoticKind::BRefined => "b_refined",
            AsymptoticKind::AlphaLead => "alpha_lead",
            AsymptoticKind::AlphaRefined => "alpha_refined",
        }
    }
}

impl fmt::Display for AsymptoticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AsymptoticKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| domain(format!("unknown asymptotic formula {s:?}")))
    }
}

/// Evaluates one of the closed-form expansions at `n`.
///
/// Powers `(3 − 2√2)^{−n+c}` are formed exactly as elements of `Q(√2)`
/// and rounded once, so the huge exponential factor carries no
/// accumulated error.
pub fn asymptotic_value(kind: AsymptoticKind, n: usize, ctx: &mut RealContext) -> Result<BigFloat> {
    if n < 3 {
        return Err(domain("asymptotic formulas are evaluated for n >= 3"));
    }
    let r2n = QuadSurd::from_ints(3, 2, 1).pow(n as u32);
    // (3 − 2√2)^{1/2} = √2 − 1 and (3 − 2√2)^{−1/2} = √2 + 1.
    let growth = |k: AsymptoticKind| -> QuadSurd {
        let factor = match k {
            AsymptoticKind::SLead
            | AsymptoticKind::SRefined
            | AsymptoticKind::BLead
            | AsymptoticKind::BRefined => QuadSurd::from_ints(-1, 1, 1),
            AsymptoticKind::ALead | AsymptoticKind::ARefined => QuadSurd::from_ints(1, 1, 1),
            AsymptoticKind::AlphaLead | AsymptoticKind::AlphaRefined => QuadSurd::from_ints(7, 5, 1),
        };
        &r2n * &factor
    };
    let nn = ctx.small(n as i64);
    let sqrt_n = ctx.sqrt(&nn);
    let n_32 = ctx.mul(&nn, &sqrt_n);
    let n_52 = ctx.mul(&n_32, &nn);
    let two_14 = ctx.sqrt(&ctx.sqrt2());
    let two_34 = ctx.mul(&two_14, &ctx.sqrt2());
    let two_54 = ctx.mul(&two_14, &ctx.small(2));
    let pi = ctx.pi();
    let sqrt_pi = ctx.sqrt(&pi);
    let prefactor = ctx.div(&ctx.surd(&growth(kind)), &sqrt_pi);
    let term = |c: &QuadSurd, denom: &BigFloat, power: &BigFloat| {
        ctx.div(&ctx.surd(c), &ctx.mul(denom, power))
    };

    let bracket = match kind {
        AsymptoticKind::SLead | AsymptoticKind::SRefined | AsymptoticKind::BRefined => {
            let mut b = term(&QuadSurd::one(), &two_34, &n_32);
            if kind != AsymptoticKind::SLead {
                let d = ctx.mul(&two_14, &ctx.small(32));
                b = ctx.add(&b, &term(&QuadSurd::from_ints(-9, 12, 1), &d, &n_52));
            }
            if kind == AsymptoticKind::BRefined {
                b = ctx.mul(&b, &ctx.small(-2));
            }
            b
        }
        AsymptoticKind::BLead => ctx.div(&two_14, &n_32).neg(),
        AsymptoticKind::ALead | AsymptoticKind::ARefined => {
            let mut b = term(&QuadSurd::one(), &two_54, &sqrt_n);
            if kind == AsymptoticKind::ARefined {
                let d = ctx.mul(&two_34, &ctx.small(32));
                b = ctx.add(&b, &term(&QuadSurd::from_ints(3, -4, 1), &d, &n_32));
            }
            b
        }
        AsymptoticKind::AlphaLead | AsymptoticKind::AlphaRefined => {
            let d = ctx.mul(&two_34, &ctx.small(4));
            let mut b = ctx.div(&sqrt_n, &d);
            if kind == AsymptoticKind::AlphaRefined {
                let d = ctx.mul(&two_34, &ctx.small(128));
                b = ctx.add(&b, &term(&QuadSurd::from_ints(24, -9, 1), &d, &sqrt_n));
            }
            b
        }
    };
    Ok(ctx.mul(&prefactor, &bracket))
}

/// One row of the exact-versus-asymptotic comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub sequence: String,
    pub n: usize,
    /// Exact value as a decimal integer.
    pub value: String,
    pub lead_formula: String,
    pub refined_formula: String,
    /// `value / lead_formula`.
    pub ratio: String,
    /// `(value / refined_formula − 1) · n`.
    pub scaled_residual: String,
}

/// Numeric view of the same comparison, for tests and tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticCheck {
    pub n: usize,
    pub lead_ratio: f64,
    pub scaled_residual: f64,
}

/// Exact sequence values indexed so that `v[n]` is the `n`-th term.
#[derive(Clone, Debug)]
pub struct SequenceTable {
    pub s: Vec<BigInt>,
    pub a: Vec<BigInt>,
    pub b: Vec<BigInt>,
    pub alpha: Vec<BigInt>,
}

impl SequenceTable {
    pub fn new(max: usize) -> Self {
        Self {
            s: indexed_schroder(max),
            a: coeff_sequence(CoeffKind::A, max),
            b: coeff_sequence(CoeffKind::B, max),
            alpha: coeff_sequence(CoeffKind::Alpha, max),
        }
    }

    /// Sequence name, exact values and its (lead, refined) formulas.
    pub fn families(&self) -> [(&'static str, &[BigInt], AsymptoticKind, AsymptoticKind); 4] {
        use AsymptoticKind::*;
        [
            ("s", &self.s, SLead, SRefined),
            ("a", &self.a, ALead, ARefined),
            ("b", &self.b, BLead, BRefined),
            ("alpha", &self.alpha, AlphaLead, AlphaRefined),
        ]
    }
}

/// Compares one exact term against its lead and refined formulas.
pub fn compare_term(
    value: &BigInt,
    n: usize,
    lead: AsymptoticKind,
    refined: AsymptoticKind,
    ctx: &mut RealContext,
    digits: usize,
) -> Result<(AsymptoticRow, AsymptoticCheck)> {
    let exact = ctx.int(value);
    let lead_v = asymptotic_value(lead, n, ctx)?;
    let refined_v = asymptotic_value(refined, n, ctx)?;
    let ratio = ctx.div(&exact, &lead_v);
    let one = ctx.small(1);
    let residual = ctx.mul(&ctx.sub(&ctx.div(&exact, &refined_v), &one), &ctx.small(n as i64));
    let render = |x: &BigFloat| {
        real_to_rational(x)
            .map(|r| crate::exact::format_decimal(&r, digits))
            .unwrap_or_else(|| "NaN".to_string())
    };
    let row = AsymptoticRow {
        sequence: String::new(),
        n,
        value: value.to_string(),
        lead_formula: render(&lead_v),
        refined_formula: render(&refined_v),
        ratio: render(&ratio),
        scaled_residual: render(&residual),
    };
    let check = AsymptoticCheck {
        n,
        lead_ratio: real_to_f64(&ratio),
        scaled_residual: real_to_f64(&residual),
    };
    Ok((row, check))
}

/// Rows for every sequence and every `n` in `ns`.
pub fn asymptotic_table(
    ns: &[usize],
    ctx: &mut RealContext,
    digits: usize,
) -> Result<Vec<(AsymptoticRow, AsymptoticCheck)>> {
    let max = ns.iter().copied().max().unwrap_or(0);
    let table = SequenceTable::new(max);
    let mut out = Vec::new();
    for (name, values, lead, refined) in table.families() {
        for &n in ns {
            let (mut row, check) = compare_term(&values[n], n, lead, refined, ctx, digits)?;
            row.sequence = name.to_string();
            out.push((row, check));
        }
    }
    Ok(out)
}
