//! Permutations in one-line notation and the separable class.
//!
//! Values are 1-based throughout. A permutation is separable when it can be
//! split recursively into direct sums and skew sums down to singletons;
//! equivalently, when it avoids both 2413 and 3142.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest `n` accepted by [`enumerate_separable`] unless a cap is given.
pub const DEFAULT_ENUM_CAP: usize = 10;

/// Longest permutation accepted by [`contains_pattern`]'s brute force.
pub const PATTERN_SEARCH_CAP: usize = 12;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    values: Vec<u32>,
}

impl Permutation {
    /// Validates that `values` is a bijection of `1..=n` with `n >= 1`.
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(domain("a permutation needs at least one entry"));
        }
        let mut seen = vec![false; n];
        for &v in &values {
            let i = v as usize;
            if i == 0 || i > n || seen[i - 1] {
                return Err(domain(format!(
                    "{values:?} is not a permutation of 1..={n}"
                )));
            }
            seen[i - 1] = true;
        }
        Ok(Self { values })
    }

    /// Skips validation; callers guarantee the bijection invariant.
    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(Self::new(values.clone()).is_ok());
        Self { values }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        Self::from_vec_unchecked((1..=n as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    /// `σ_n ⋯ σ_1`.
    pub fn reverse(&self) -> Self {
        let mut v = self.values.clone();
        v.reverse();
        Self { values: v }
    }

    /// `n + 1 − σ_i` in every position.
    pub fn complement(&self) -> Self {
        let n1 = self.len() as u32 + 1;
        Self {
            values: self.values.iter().map(|&v| n1 - v).collect(),
        }
    }

    pub fn reverse_complement(&self) -> Self {
        self.reverse().complement()
    }

    /// `self ⊕ other`: `other` is placed after `self`, shifted above it.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let k = self.len() as u32;
        let mut v = self.values.clone();
        v.extend(other.values.iter().map(|&x| x + k));
        Self { values: v }
    }

    /// `self ⊖ other`: `other` is placed after `self`, `self` shifted above it.
    pub fn skew_sum(&self, other: &Self) -> Self {
        let l = other.len() as u32;
        let mut v: Vec<u32> = self.values.iter().map(|&x| x + l).collect();
        v.extend_from_slice(&other.values);
        Self { values: v }
    }

    pub fn is_alternating(&self) -> bool {
        self.values
            .windows(3)
            .all(|w| (w[0] < w[1]) != (w[1] < w[2]))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.values {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{self}]")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Space-separated values, e.g. `"4 3 5 2 1 6 7"`.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;

    fn try_from(values: Vec<u32>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.values
    }
}

/// Brute-force pattern containment: is some subsequence of `p` order
/// isomorphic to `pattern`? Intended as an oracle for short inputs.
pub fn contains_pattern(p: &Permutation, pattern: &Permutation) -> bool {
    let (n, k) = (p.len(), pattern.len());
    if k > n {
        return false;
    }
    let pat = pattern.values();
    let vals = p.values();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let order_isomorphic = (0..k).all(|a| {
            (a + 1..k).all(|b| (vals[idx[a]] < vals[idx[b]]) == (pat[a] < pat[b]))
        });
        if order_isomorphic {
            return true;
        }
        // Next k-combination in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Separability by recursive block splitting.
///
/// Every block on the work stack holds a contiguous range of values. We
/// look for the shortest proper prefix holding the lowest (or highest)
/// values of the block, split there and continue on both halves.
pub fn is_separable(p: &Permutation) -> bool {
    let v = p.values();
    let mut stack = vec![(0usize, v.len())];
    while let Some((start, end)) = stack.pop() {
        let len = end - start;
        if len == 1 {
            continue;
        }
        let block = &v[start..end];
        let lo = *block.iter().min().unwrap();
        let hi = lo + len as u32 - 1;
        let (mut pmax, mut pmin) = (0u32, u32::MAX);
        let mut split = None;
        for (j, &x) in block[..len - 1].iter().enumerate() {
            pmax = pmax.max(x);
            pmin = pmin.min(x);
            let width = j as u32;
            if pmax == lo + width || pmin == hi - width {
                split = Some(j + 1);
                break;
            }
        }
        match split {
            Some(j) => {
                stack.push((start, start + j));
                stack.push((start + j, end));
            }
            None => return false,
        }
    }
    true
}

/// Lengths of the first plus-indecomposable and first skew-indecomposable blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockStats {
    /// `min{j : σ([j]) = [j]}`.
    pub b_plus: usize,
    /// `min{k : σ([k]) = [n] − [n−k]}`.
    pub b_minus: usize,
}

pub fn block_stats(p: &Permutation) -> BlockStats {
    let v = p.values();
    let n = v.len() as u32;
    let (mut pmax, mut pmin) = (0u32, u32::MAX);
    let (mut b_plus, mut b_minus) = (None, None);
    for (j, &x) in v.iter().enumerate() {
        let len = j as u32 + 1;
        pmax = pmax.max(x);
        pmin = pmin.min(x);
        if b_plus.is_none() && pmax == len {
            b_plus = Some(j + 1);
        }
        if b_minus.is_none() && pmin == n - len + 1 {
            b_minus = Some(j + 1);
        }
        if b_plus.is_some() && b_minus.is_some() {
            break;
        }
    }
    BlockStats {
        b_plus: b_plus.unwrap_or(v.len()),
        b_minus: b_minus.unwrap_or(v.len()),
    }
}

/// All separable permutations of size `n` (at most [`DEFAULT_ENUM_CAP`]).
pub fn enumerate_separable(n: usize) -> Result<impl Iterator<Item = Permutation>> {
    enumerate_separable_capped(n, DEFAULT_ENUM_CAP)
}

pub fn enumerate_separable_capped(
    n: usize,
    cap: usize,
) -> Result<impl Iterator<Item = Permutation>> {
    if n == 0 {
        return Err(domain("enumeration needs n >= 1"));
    }
    if n > cap {
        return Err(Error::Capacity {
            what: "enumerate_separable",
            n,
            cap,
        });
    }
    let mut classes = SeparableClasses::new();
    classes.extend_to(n);
    let (indec, decomp) = classes.take(n);
    Ok(decomp.into_iter().chain(indec))
}

/// Separable permutations of every size up to some bound, split into
/// plus-indecomposable and plus-decomposable members.
///
/// Built by the first-block recursion: a plus-decomposable permutation is
/// `α ⊕ β` with `α` plus-indecomposable; for `m ≥ 2` the plus-indecomposable
/// ones are exactly the complements of the plus-decomposable ones.
struct SeparableClasses {
    indec: Vec<Vec<Permutation>>,
    decomp: Vec<Vec<Permutation>>,
}

impl SeparableClasses {
    fn new() -> Self {
        // Index 0 is an unused placeholder so that index = size.
        Self {
            indec: vec![Vec::new()],
            decomp: vec![Vec::new()],
        }
    }

    fn extend_to(&mut self, n: usize) {
        for m in self.indec.len()..=n {
            if m == 1 {
                self.indec.push(vec![Permutation::identity(1)]);
                self.decomp.push(Vec::new());
                continue;
            }
            let mut decomp = Vec::new();
            for j in 1..m {
                for alpha in &self.indec[j] {
                    for beta in self.indec[m - j].iter().chain(&self.decomp[m - j]) {
                        decomp.push(alpha.direct_sum(beta));
                    }
                }
            }
            let indec = decomp.iter().map(Permutation::complement).collect();
            self.indec.push(indec);
            self.decomp.push(decomp);
        }
    }

    fn take(mut self, n: usize) -> (Vec<Permutation>, Vec<Permutation>) {
        (
            std::mem::take(&mut self.indec[n]),
            std::mem::take(&mut self.decomp[n]),
        )
    }
}

/// All of `S_n` in lexicographic order; oracle use only.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut v: Vec<u32> = (1..=n as u32).collect();
    loop {
        out.push(Permutation::from_vec_unchecked(v.clone()));
        // Next lexicographic permutation.
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).unwrap();
        v.swap(i, j);
        v[i + 1..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Permutation::new(vec![]).is_err());
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
        assert!("1 x".parse::<Permutation>().is_err());
    }

    #[test]
    fn symmetries() {
        assert_eq!(p("1 2").complement(), p("2 1"));
        assert_eq!(p("4 3 5 2 1 6 7").reverse(), p("7 6 1 2 5 3 4"));
        let q = p("3 1 4 2");
        assert_eq!(q.reverse_complement().reverse_complement(), q);
        assert_eq!(q.reverse_complement(), q.complement().reverse());
    }

    #[test]
    fn sums() {
        assert_eq!(p("4 3 5 2 1").direct_sum(&p("1 2")), p("4 3 5 2 1 6 7"));
        assert_eq!(p("2 1 3").skew_sum(&p("2 1")), p("4 3 5 2 1"));
        assert_eq!(p("1").direct_sum(&p("1")), p("1 2"));
        assert_eq!(p("1").skew_sum(&p("1")), p("2 1"));
    }

    #[test]
    fn pattern_containment() {
        assert!(contains_pattern(&p("2 4 1 3"), &p("2 4 1 3")));
        assert!(!contains_pattern(&p("4 3 5 2 1 6 7"), &p("2 4 1 3")));
        assert!(!contains_pattern(&p("1 2 3"), &p("2 1")));
        assert!(!contains_pattern(&p("1 2"), &p("1 2 3")));
        assert!(contains_pattern(&p("5 2 7 1 4 3 6"), &p("3 1 4 2")));
    }

    #[test]
    fn separability_examples() {
        assert!(is_separable(&p("4 3 5 2 1 6 7")));
        assert!(!is_separable(&p("2 4 1 3")));
        assert!(!is_separable(&p("3 1 4 2")));
        assert!(is_separable(&p("1")));
        // 2413 hidden inside a larger permutation.
        assert!(!is_separable(&p("1 3 5 2 4 6")));
    }

    #[test]
    fn separable_iff_avoids_both_patterns() {
        let (a, b) = (p("2 4 1 3"), p("3 1 4 2"));
        for n in 1..=8 {
            let mut count = 0;
            for q in all_permutations(n) {
                let avoids = !contains_pattern(&q, &a) && !contains_pattern(&q, &b);
                assert_eq!(is_separable(&q), avoids, "{q}");
                count += avoids as usize;
            }
            if n == 4 {
                assert_eq!(count, 22);
            }
        }
    }

    #[test]
    fn block_stats_examples() {
        assert_eq!(block_stats(&p("3 4 2 1 7 8 9 5 6")).b_plus, 4);
        assert_eq!(block_stats(&p("1 2 4 3 7 8 9 5 6")).b_plus, 1);
        assert_eq!(block_stats(&p("3 2 4 5 6 1 7 8 9")).b_plus, 6);
        assert_eq!(block_stats(&p("1")), BlockStats { b_plus: 1, b_minus: 1 });
        assert_eq!(block_stats(&p("2 1")), BlockStats { b_plus: 2, b_minus: 1 });
    }

    #[test]
    fn exactly_one_block_is_everything() {
        for n in 2..=7 {
            for q in enumerate_separable(n).unwrap() {
                let b = block_stats(&q);
                assert!((b.b_plus == n) != (b.b_minus == n), "{q}");
            }
        }
    }

    #[test]
    fn enumeration_counts_and_uniqueness() {
        let expected = [1usize, 2, 6, 22, 90, 394, 1806, 8558];
        for (i, &want) in expected.iter().enumerate() {
            let n = i + 1;
            let all: Vec<_> = enumerate_separable(n).unwrap().collect();
            assert_eq!(all.len(), want);
            let set: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(set.len(), want);
            assert!(all.iter().all(is_separable));
        }
        let two: HashSet<_> = enumerate_separable(2).unwrap().collect();
        assert_eq!(two, [p("1 2"), p("2 1")].into_iter().collect());
        assert_eq!(enumerate_separable(1).unwrap().collect::<Vec<_>>(), vec![p("1")]);
    }

    #[test]
    fn enumeration_matches_filter_of_sn() {
        for n in 1..=7 {
            let gen: HashSet<_> = enumerate_separable(n).unwrap().collect();
            let filt: HashSet<_> = all_permutations(n).into_iter().filter(is_separable).collect();
            assert_eq!(gen, filt);
        }
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(
            enumerate_separable(11),
            Err(Error::Capacity { n: 11, cap: 10, .. })
        ));
        assert!(enumerate_separable(0).is_err());
    }

    #[test]
    fn symmetries_preserve_sep_and_swap_blocks() {
        for n in 1..=7 {
            let sep: HashSet<_> = enumerate_separable(n).unwrap().collect();
            let plus_full: HashSet<_> = sep
                .iter()
                .filter(|q| block_stats(q).b_plus == n)
                .cloned()
                .collect();
            let minus_full: HashSet<_> = sep
                .iter()
                .filter(|q| block_stats(q).b_minus == n)
                .cloned()
                .collect();
            for f in [Permutation::reverse, Permutation::complement, Permutation::reverse_complement] {
                let image: HashSet<_> = sep.iter().map(f).collect();
                assert_eq!(image, sep);
            }
            let comp: HashSet<_> = plus_full.iter().map(Permutation::complement).collect();
            assert_eq!(comp, minus_full);
            let rc: HashSet<_> = plus_full.iter().map(Permutation::reverse_complement).collect();
            assert_eq!(rc, plus_full);
        }
    }

    #[test]
    fn all_permutations_is_complete() {
        assert_eq!(all_permutations(5).len(), 120);
        let set: HashSet<_> = all_permutations(6).into_iter().collect();
        assert_eq!(set.len(), 720);
    }

    #[test]
    fn serde_as_plain_list() {
        let q = p("2 3 1");
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, "[2,3,1]");
        assert_eq!(serde_json::from_str::<Permutation>(&json).unwrap(), q);
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_perm(max: usize) -> impl Strategy<Value = Permutation> {
            (1..=max)
                .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
                .prop_map(|v| Permutation::new(v).unwrap())
        }

        fn arb_sep(max: usize) -> impl Strategy<Value = Permutation> {
            arb_perm(max).prop_filter("separable", is_separable)
        }

        proptest! {
            #[test]
            fn sums_of_separables_are_separable(a in arb_sep(7), b in arb_sep(7)) {
                prop_assert!(is_separable(&a.direct_sum(&b)));
                prop_assert!(is_separable(&a.skew_sum(&b)));
            }

            #[test]
            fn text_round_trip(a in arb_perm(30)) {
                prop_assert_eq!(a.to_string().parse::<Permutation>().unwrap(), a);
            }
        }
    }
}
