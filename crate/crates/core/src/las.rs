//! Longest alternating subsequences, typed by first and last step.
//!
//! A subsequence `x_1, …, x_k` is alternating when its consecutive
//! comparisons alternate between ascents and descents. Its type is the pair
//! (first step, last step). A singleton counts as an alternating
//! subsequence of types `(+,−)` and `(−,+)` but not `(+,+)` or `(−,−)`;
//! a flavor with no admissible subsequence has length 0.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{format_ratio, serde_ratio};
use crate::perm::{block_stats, enumerate_separable_capped, Permutation, DEFAULT_ENUM_CAP};

/// Longest permutation accepted by [`alt_profile_bruteforce`].
pub const BRUTEFORCE_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Overall,
    /// Begins and ends with an ascent.
    Pp,
    /// Begins with an ascent, ends with a descent.
    Pm,
    /// Begins with a descent, ends with an ascent.
    Mp,
    /// Begins and ends with a descent.
    Mm,
}

impl Flavor {
    pub const ALL: [Flavor; 5] = [Flavor::Overall, Flavor::Pp, Flavor::Pm, Flavor::Mp, Flavor::Mm];
    pub const TYPED: [Flavor; 4] = [Flavor::Pp, Flavor::Pm, Flavor::Mp, Flavor::Mm];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Overall => "overall",
            Flavor::Pp => "pp",
            Flavor::Pm => "pm",
            Flavor::Mp => "mp",
            Flavor::Mm => "mm",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AltProfile {
    pub a_overall: u32,
    pub a_pp: u32,
    pub a_pm: u32,
    pub a_mp: u32,
    pub a_mm: u32,
}

impl AltProfile {
    pub fn get(&self, flavor: Flavor) -> u32 {
        match flavor {
            Flavor::Overall => self.a_overall,
            Flavor::Pp => self.a_pp,
            Flavor::Pm => self.a_pm,
            Flavor::Mp => self.a_mp,
            Flavor::Mm => self.a_mm,
        }
    }

    fn from_typed(a_pp: u32, a_pm: u32, a_mp: u32, a_mm: u32) -> Self {
        Self {
            a_overall: a_pp.max(a_pm).max(a_mp).max(a_mm),
            a_pp,
            a_pm,
            a_mp,
            a_mm,
        }
    }
}

/// Linear-time profile.
///
/// Four running maxima, one per (first step, last step) type. A longest
/// subsequence of a given type can always be taken to end at the most
/// recent local extremum, so an adjacent ascent extends every type whose
/// last step is a descent, and vice versa. The singleton seeds the two
/// mixed types with 1.
pub fn alt_profile(p: &Permutation) -> AltProfile {
    // (first, last): up_up, up_down, down_up, down_down.
    let (mut uu, mut ud, mut du, mut dd) = (0u32, 1u32, 1u32, 0u32);
    for w in p.values().windows(2) {
        if w[1] > w[0] {
            uu = uu.max(ud + 1);
            du = du.max(dd + 1);
        } else {
            ud = ud.max(uu + 1);
            dd = dd.max(du + 1);
        }
    }
    AltProfile::from_typed(uu, ud, du, dd)
}

/// Exhaustive oracle: every subsequence is inspected.
pub fn alt_profile_bruteforce(p: &Permutation) -> Result<AltProfile> {
    let n = p.len();
    if n > BRUTEFORCE_CAP {
        return Err(Error::Capacity {
            what: "alt_profile_bruteforce",
            n,
            cap: BRUTEFORCE_CAP,
        });
    }
    let v = p.values();
    let mut best = [0u32; 4];
    let mut sub = Vec::with_capacity(n);
    for mask in 1u32..(1 << n) {
        sub.clear();
        sub.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| v[i]));
        let len = sub.len() as u32;
        if len == 1 {
            best[1] = best[1].max(1);
            best[2] = best[2].max(1);
            continue;
        }
        let ups: Vec<bool> = sub.windows(2).map(|w| w[1] > w[0]).collect();
        if ups.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let slot = match (ups[0], ups[ups.len() - 1]) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        best[slot] = best[slot].max(len);
    }
    Ok(AltProfile::from_typed(best[0], best[1], best[2], best[3]))
}

/// Exact first and second moments of one flavor at one size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlavorMoments {
    /// Mean given the permutation is plus-indecomposable.
    #[serde(with = "serde_ratio")]
    pub c: BigRational,
    /// Mean given the permutation is skew-indecomposable.
    #[serde(with = "serde_ratio")]
    pub d: BigRational,
    /// Second moment given plus-indecomposable.
    #[serde(rename = "C", with = "serde_ratio")]
    pub big_c: BigRational,
    /// Second moment given skew-indecomposable.
    #[serde(rename = "D", with = "serde_ratio")]
    pub big_d: BigRational,
    #[serde(with = "serde_ratio")]
    pub mean: BigRational,
    #[serde(with = "serde_ratio")]
    pub secmom: BigRational,
}

impl FlavorMoments {
    pub fn variance(&self) -> BigRational {
        &self.secmom - &self.mean * &self.mean
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentTable {
    pub n: usize,
    /// Number of separable permutations of size `n`.
    pub count: u64,
    pub overall: FlavorMoments,
    pub pp: FlavorMoments,
    pub pm: FlavorMoments,
    pub mp: FlavorMoments,
    pub mm: FlavorMoments,
}

impl MomentTable {
    pub fn get(&self, flavor: Flavor) -> &FlavorMoments {
        match flavor {
            Flavor::Overall => &self.overall,
            Flavor::Pp => &self.pp,
            Flavor::Pm => &self.pm,
            Flavor::Mp => &self.mp,
            Flavor::Mm => &self.mm,
        }
    }
}

/// Length histograms of one size of `SEP(n)`, split by first-block length.
#[derive(Clone, Debug)]
struct Census {
    n: usize,
    /// `plus_block[j-1][flavor][len]` counts permutations with `b_plus = j`.
    plus_block: Vec<[Vec<u64>; 5]>,
    /// Histograms over permutations with `b_minus = n`.
    skew_indec: [Vec<u64>; 5],
    /// `minus_block[k-1]` counts permutations with `b_minus = k`.
    minus_block: Vec<u64>,
}

fn empty_hists(n: usize) -> [Vec<u64>; 5] {
    std::array::from_fn(|_| vec![0; n + 1])
}

impl Census {
    fn empty(n: usize) -> Self {
        Self {
            n,
            plus_block: (0..n).map(|_| empty_hists(n)).collect(),
            skew_indec: empty_hists(n),
            minus_block: vec![0; n],
        }
    }

    fn record(&mut self, p: &Permutation) {
        let b = block_stats(p);
        let prof = alt_profile(p);
        for f in Flavor::ALL {
            let len = prof.get(f) as usize;
            self.plus_block[b.b_plus - 1][f.index()][len] += 1;
            if b.b_minus == self.n {
                self.skew_indec[f.index()][len] += 1;
            }
        }
        self.minus_block[b.b_minus - 1] += 1;
    }

    fn merge(mut self, other: Self) -> Self {
        let add = |a: &mut [u64], b: &[u64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        for (mine, theirs) in self.plus_block.iter_mut().zip(&other.plus_block) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                add(a, b);
            }
        }
        for (a, b) in self.skew_indec.iter_mut().zip(&other.skew_indec) {
            add(a, b);
        }
        add(&mut self.minus_block, &other.minus_block);
        self
    }

    fn build(n: usize, cap: usize) -> Result<Self> {
        let perms: Vec<Permutation> = enumerate_separable_capped(n, cap)?.collect();
        Ok(perms
            .par_chunks(4096)
            .map(|chunk| {
                let mut c = Census::empty(n);
                chunk.iter().for_each(|p| c.record(p));
                c
            })
            .reduce(|| Census::empty(n), Census::merge))
    }

    fn total(&self) -> u64 {
        self.minus_block.iter().sum()
    }

    fn plus_block_count(&self, j: usize) -> u64 {
        self.plus_block[j - 1][0].iter().sum()
    }

    fn unconditional(&self, f: Flavor) -> Vec<u64> {
        let mut h = vec![0; self.n + 1];
        for block in &self.plus_block {
            h.iter_mut().zip(&block[f.index()]).for_each(|(x, y)| *x += y);
        }
        h
    }

    fn plus_indec(&self, f: Flavor) -> &[u64] {
        &self.plus_block[self.n - 1][f.index()]
    }

    fn skew_indec(&self, f: Flavor) -> &[u64] {
        &self.skew_indec[f.index()]
    }

    fn moments(&self) -> MomentTable {
        let per_flavor = |f: Flavor| {
            let (c, big_c) = hist_moments(self.plus_indec(f));
            let (d, big_d) = hist_moments(self.skew_indec(f));
            let (mean, secmom) = hist_moments(&self.unconditional(f));
            FlavorMoments { c, d, big_c, big_d, mean, secmom }
        };
        MomentTable {
            n: self.n,
            count: self.total(),
            overall: per_flavor(Flavor::Overall),
            pp: per_flavor(Flavor::Pp),
            pm: per_flavor(Flavor::Pm),
            mp: per_flavor(Flavor::Mp),
            mm: per_flavor(Flavor::Mm),
        }
    }
}

fn ratio(p: impl Into<BigInt>, q: impl Into<BigInt>) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn int(p: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(p.into())
}

/// (mean, second moment) of a length histogram.
fn hist_moments(h: &[u64]) -> (BigRational, BigRational) {
    let total: u64 = h.iter().sum();
    let (mut s1, mut s2) = (BigInt::zero(), BigInt::zero());
    for (len, &cnt) in h.iter().enumerate() {
        let l = BigInt::from(len as u64);
        s1 += &l * cnt;
        s2 += &l * &l * cnt;
    }
    (ratio(s1, total), ratio(s2, total))
}

fn hist_law(h: &[u64]) -> Vec<BigRational> {
    let total: u64 = h.iter().sum();
    h.iter().map(|&c| ratio(c, total)).collect()
}

/// Law of the sum of two independent variables given by their laws.
fn convolve(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn trim_zeros(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// Exact moments of every flavor by enumeration of `SEP(n)`.
pub fn moment_table(n: usize) -> Result<MomentTable> {
    moment_table_capped(n, DEFAULT_ENUM_CAP)
}

pub fn moment_table_capped(n: usize, cap: usize) -> Result<MomentTable> {
    Ok(Census::build(n, cap)?.moments())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Status::Pass
    }
}

/// One line of a verification report; both sides rendered exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub n: usize,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
}

impl IdentityCheck {
    fn scalar(identity: impl Into<String>, n: usize, lhs: BigRational, rhs: BigRational) -> Self {
        Self {
            identity: identity.into(),
            n,
            status: Status::from_bool(lhs == rhs),
            lhs: format_ratio(&lhs),
            rhs: format_ratio(&rhs),
        }
    }

    fn vector(identity: impl Into<String>, n: usize, lhs: Vec<BigRational>, rhs: Vec<BigRational>) -> Self {
        let (lhs, rhs) = (trim_zeros(lhs), trim_zeros(rhs));
        let render = |v: &[BigRational]| {
            let parts: Vec<String> = v.iter().map(format_ratio).collect();
            format!("[{}]", parts.join(", "))
        };
        Self {
            identity: identity.into(),
            n,
            status: Status::from_bool(lhs == rhs),
            lhs: render(&lhs),
            rhs: render(&rhs),
        }
    }
}

/// Checks the first-block recursions at size `n` against enumeration.
///
/// Every quantity on both sides is computed independently by enumerating
/// `SEP(1)`, …, `SEP(n)`; nothing is taken from closed forms.
pub fn verify_structure(n: usize) -> Result<Vec<IdentityCheck>> {
    verify_structure_capped(n, DEFAULT_ENUM_CAP)
}

pub fn verify_structure_capped(n: usize, cap: usize) -> Result<Vec<IdentityCheck>> {
    if n < 3 {
        return Err(domain("structural identities are stated for n >= 3"));
    }
    if n > cap {
        return Err(Error::Capacity { what: "verify_structure", n, cap });
    }
    // Index 0 unused so that censuses[k] describes SEP(k).
    let mut censuses = vec![Census::empty(0)];
    for k in 1..=n {
        censuses.push(Census::build(k, cap)?);
    }
    let tables: Vec<Option<MomentTable>> = censuses
        .iter()
        .enumerate()
        .map(|(k, c)| (k > 0).then(|| c.moments()))
        .collect();
    let s = |k: usize| int(censuses[k].total());
    let t = |k: usize| tables[k].as_ref().unwrap();
    let half = ratio(1, 2);
    let here = &censuses[n];
    let mut report = Vec::new();

    // s_n = s_1 s_{n-1} + ½ Σ_{j=2}^{n-1} s_j s_{n-j} + ½ s_n
    let mut rhs = s(1) * s(n - 1) + &half * s(n);
    for j in 2..n {
        rhs += &half * s(j) * s(n - j);
    }
    report.push(IdentityCheck::scalar("count recursion", n, s(n), rhs));

    let block_law = |j: usize| -> BigRational {
        match j {
            1 => s(1) * s(n - 1) / s(n),
            j if j == n => half.clone(),
            j => &half * s(j) * s(n - j) / s(n),
        }
    };
    let law: Vec<BigRational> = (1..=n).map(block_law).collect();
    let plus: Vec<BigRational> = (1..=n).map(|j| ratio(here.plus_block_count(j), here.total())).collect();
    let minus: Vec<BigRational> = here.minus_block.iter().map(|&c| ratio(c, here.total())).collect();
    report.push(IdentityCheck::vector("first plus-block law", n, plus, law.clone()));
    report.push(IdentityCheck::vector("first skew-block law", n, minus, law));

    let c_pm = |k: usize| &t(k).pm.c;
    let c_mm = |k: usize| &t(k).mm.c;
    let cc_pm = |k: usize| &t(k).pm.big_c;
    let cc_mm = |k: usize| &t(k).mm.big_c;
    let two = int(2);
    let four = int(4);

    let mut rhs = s(n - 1) / s(n) * (BigRational::one() + c_pm(n - 1));
    for j in 2..n {
        rhs += &half * s(j) * s(n - j) / s(n) * (c_pm(j) + c_pm(n - j));
    }
    report.push(IdentityCheck::scalar("mean recursion c_mm", n, &half * c_mm(n), rhs));

    let mut rhs = s(n - 1) / s(n) * c_pm(n - 1);
    for j in 2..n {
        rhs += &half * s(j) * s(n - j) / s(n) * (c_mm(j) + c_pm(n - j));
    }
    report.push(IdentityCheck::scalar("mean recursion c_pm", n, &half * c_pm(n), rhs));

    let mut rhs = s(n - 1) * (&two + &four * c_pm(n - 1) + &two * cc_pm(n - 1));
    for j in 2..n {
        rhs += s(j) * s(n - j) * (cc_pm(j) + &two * c_pm(j) * c_pm(n - j) + cc_pm(n - j));
    }
    report.push(IdentityCheck::scalar("second-moment recursion C_mm", n, s(n) * cc_mm(n), rhs));

    let mut rhs = &two * s(n - 1) * cc_pm(n - 1);
    for j in 2..n {
        rhs += s(j) * s(n - j) * (cc_mm(j) + &two * c_mm(j) * c_pm(n - j) + cc_pm(n - j));
    }
    report.push(IdentityCheck::scalar("second-moment recursion C_pm", n, s(n) * cc_pm(n), rhs));

    // Conditioned on b_plus = j, the typed length splits as an independent
    // sum over the first block and the remainder.
    for (name, target, first) in [
        ("A_pp split", Flavor::Pp, Flavor::Pm),
        ("A_mp split", Flavor::Mp, Flavor::Mm),
    ] {
        for j in 1..n {
            let lhs = hist_law(&here.plus_block[j - 1][target.index()]);
            let head = hist_law(censuses[j].plus_indec(first));
            let tail = hist_law(&censuses[n - j].unconditional(Flavor::Mp));
            report.push(IdentityCheck::vector(format!("{name} at first block {j}"), n, lhs, convolve(&head, &tail)));
        }
    }
    Ok(report)
}
