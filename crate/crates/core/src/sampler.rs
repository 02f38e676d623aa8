//! Exact uniform sampling of separable permutations and a reproducible
//! Monte Carlo harness for the alternating-subsequence statistics.
//!
//! The sampler reads the first-block decomposition constructively. A
//! permutation is built top-down: at each node we draw the length of the
//! first indecomposable block from its exact law and recurse on the block
//! and the remainder. Plus-indecomposable pieces of size at least 2 are
//! exactly the skew-decomposable ones, so they are built from their first
//! skew block, and symmetrically.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::las::{alt_profile, Flavor};
use crate::perm::Permutation;
use crate::schroder::indexed_schroder;

/// Bits of the uniform draw resolved in floating point before falling
/// back to exact arithmetic.
const FAST_BITS: u64 = 52;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Any,
    PlusIndec,
    SkewIndec,
}

/// Precomputed Schröder numbers, exact and as (mantissa, exponent) pairs.
#[derive(Clone, Debug)]
pub struct SeparableSampler {
    s: Vec<BigUint>,
    /// `s_n ≈ approx[n].0 · 2^{approx[n].1}` with the mantissa in `[1, 2)`.
    approx: Vec<(f64, i64)>,
    fast_bits: u64,
}

impl SeparableSampler {
    pub fn new(max_n: usize) -> Self {
        let s: Vec<BigUint> = indexed_schroder(max_n.max(1))
            .into_iter()
            .map(|x| x.to_biguint().expect("Schröder numbers are nonnegative"))
            .collect();
        let approx = s.iter().map(split_float).collect();
        Self { s, approx, fast_bits: FAST_BITS }
    }

    /// Same sampler, resolving only `bits` bits in floating point; small
    /// values force the exact path and exist for testing it.
    pub fn with_fast_bits(mut self, bits: u64) -> Self {
        self.fast_bits = bits.clamp(1, FAST_BITS);
        self
    }

    pub fn max_n(&self) -> usize {
        self.s.len() - 1
    }

    /// A uniformly random element of `SEP(n)`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Permutation> {
        if n == 0 {
            return Err(domain("cannot sample a permutation of size 0"));
        }
        if n > self.max_n() {
            return Err(Error::Capacity { what: "SeparableSampler::sample", n, cap: self.max_n() });
        }
        let mut out = vec![0u32; n];
        // (position, lowest value, size, shape)
        let mut stack = vec![(0usize, 0u32, n, Shape::Any)];
        while let Some((pos, lo, m, shape)) = stack.pop() {
            if m == 1 {
                out[pos] = lo + 1;
                continue;
            }
            let k = self.pick(shape, m, rng);
            let k32 = k as u32;
            let m32 = m as u32;
            match shape {
                Shape::Any if k == m => stack.push((pos, lo, m, Shape::PlusIndec)),
                Shape::Any | Shape::SkewIndec => {
                    stack.push((pos, lo, k, Shape::PlusIndec));
                    stack.push((pos + k, lo + k32, m - k, Shape::Any));
                }
                Shape::PlusIndec => {
                    stack.push((pos, lo + m32 - k32, k, Shape::SkewIndec));
                    stack.push((pos + k, lo, m - k, Shape::Any));
                }
            }
        }
        Ok(Permutation::from_vec_unchecked(out))
    }

    /// Candidate block lengths in scan order: the heavy ends first.
    fn candidates(shape: Shape, m: usize) -> impl Iterator<Item = usize> {
        let whole = (shape == Shape::Any).then_some(m);
        let ends = (0..m - 1).map(move |i| if i % 2 == 0 { 1 + i / 2 } else { m - 1 - i / 2 });
        whole.into_iter().chain(ends)
    }

    /// Doubled count of permutations whose first block has length `k`.
    fn weight(&self, m: usize, k: usize) -> BigUint {
        if k == m {
            self.s[m].clone()
        } else if k == 1 {
            &self.s[m - 1] << 1u32
        } else {
            &self.s[k] * &self.s[m - k]
        }
    }

    /// `log2`-scaled float version of [`Self::weight`]: `(mantissa, exponent)`.
    fn weight_approx(&self, m: usize, k: usize) -> (f64, i64) {
        if k == m {
            self.approx[m]
        } else if k == 1 {
            let (a, e) = self.approx[m - 1];
            (a, e + 1)
        } else {
            let (a, ea) = self.approx[k];
            let (b, eb) = self.approx[m - k];
            (a * b, ea + eb)
        }
    }

    fn total(&self, shape: Shape, m: usize) -> BigUint {
        match shape {
            Shape::Any => &self.s[m] << 1u32,
            _ => self.s[m].clone(),
        }
    }

    /// Inverse transform on an exactly uniform integer `r ∈ [0, total)`.
    ///
    /// Only the top `fast_bits` bits of `r` are drawn up front; the scan
    /// compares them against floating-point cumulative weights with a
    /// safety margin. If any comparison falls inside the margin, the
    /// remaining bits are drawn and the scan is redone exactly.
    fn pick<R: Rng + ?Sized>(&self, shape: Shape, m: usize, rng: &mut R) -> usize {
        let total = self.total(shape, m);
        let len = total.bits();
        if len <= self.fast_bits + 1 {
            let r = rng.gen_biguint_below(&total);
            return self.exact_scan(shape, m, &r);
        }
        let shift = len - self.fast_bits;
        let total_hi = (&total >> shift).to_u64().expect("fits in fast_bits");
        loop {
            let top = rng.gen::<u64>() >> (64 - self.fast_bits);
            if top > total_hi {
                continue;
            }
            if top < total_hi {
                if let Some(k) = self.fast_scan(shape, m, top, shift) {
                    return k;
                }
            }
            let low = rng.gen_biguint(shift);
            let r = (BigUint::from(top) << shift) + low;
            if r < total {
                return self.exact_scan(shape, m, &r);
            }
        }
    }

    fn fast_scan(&self, shape: Shape, m: usize, top: u64, shift: u64) -> Option<usize> {
        let top = top as f64;
        let mut acc = 0.0f64;
        for (i, k) in Self::candidates(shape, m).enumerate() {
            let (mant, exp) = self.weight_approx(m, k);
            let e = exp - shift as i64;
            acc += if e < -1100 { 0.0 } else { mant * 2f64.powi(e as i32) };
            // Each term carries a few ulps of relative error.
            let tol = acc * (i as f64 + 8.0) * f64::EPSILON * 4.0 + 1e-9;
            if acc - tol >= top + 1.0 {
                return Some(k);
            }
            if acc + tol > top {
                return None;
            }
        }
        None
    }

    fn exact_scan(&self, shape: Shape, m: usize, r: &BigUint) -> usize {
        let mut acc = BigUint::zero();
        for k in Self::candidates(shape, m) {
            acc += self.weight(m, k);
            if r < &acc {
                return k;
            }
        }
        unreachable!("draw below the total weight always lands in a block")
    }
}

fn split_float(x: &BigUint) -> (f64, i64) {
    if x.is_zero() {
        return (0.0, 0);
    }
    let bits = x.bits();
    let top = if bits > 64 { x >> (bits - 64) } else { x.clone() };
    let top = top.to_u64().expect("64 bits") as f64;
    let width = bits.min(64) as i32;
    (top / 2f64.powi(width - 1), bits as i64 - 1)
}

/// A uniformly random element of `S_n` by Fisher–Yates shuffling.
pub fn sample_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation> {
    if n == 0 {
        return Err(domain("cannot sample a permutation of size 0"));
    }
    let mut v: Vec<u32> = (1..=n as u32).collect();
    v.shuffle(rng);
    Ok(Permutation::from_vec_unchecked(v))
}

/// Convenience wrapper building a one-off sampler.
pub fn sample_separable<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation> {
    SeparableSampler::new(n).sample(n, rng)
}

/// Generator for worker `worker` of a run seeded with `seed`.
///
/// Workers share the 64-bit seed and differ in the ChaCha stream number,
/// which gives non-overlapping keystreams.
pub fn worker_rng(seed: u64, worker: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(worker);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Separable,
    Uniform,
}

impl std::str::FromStr for Ensemble {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separable" => Ok(Ensemble::Separable),
            "uniform" => Ok(Ensemble::Uniform),
            other => Err(domain(format!("unknown ensemble {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlavorEstimate {
    pub flavor: Flavor,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub std_error: f64,
    /// Exact `Σ A` and `Σ A²` over all samples, as decimal strings.
    pub sum: String,
    pub sum_sq: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub n: usize,
    pub ensemble: Ensemble,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub flavors: Vec<FlavorEstimate>,
}

impl McEstimate {
    pub fn get(&self, flavor: Flavor) -> &FlavorEstimate {
        self.flavors
            .iter()
            .find(|f| f.flavor == flavor)
            .expect("every flavor is estimated")
    }
}

#[derive(Clone, Copy, Default)]
struct Sums {
    sum: [u128; 5],
    sum_sq: [u128; 5],
}

impl Sums {
    fn merge(mut self, o: Sums) -> Sums {
        for i in 0..5 {
            self.sum[i] += o.sum[i];
            self.sum_sq[i] += o.sum_sq[i];
        }
        self
    }
}

/// Monte Carlo estimates of all five lengths.
///
/// The budget is split across `workers` deterministically (the first
/// `samples % workers` workers take one extra); worker `w` uses
/// [`worker_rng`]`(seed, w)`. Sums are exact integers, so the result
/// depends only on `(n, samples, seed, workers, ensemble)` and not on
/// scheduling. Changing `workers` changes the streams and hence the
/// estimate.
pub fn mc_stats(n: usize, samples: u64, seed: u64, workers: usize, ensemble: Ensemble) -> Result<McEstimate> {
    if samples < 2 {
        return Err(domain("mc_stats needs at least 2 samples"));
    }
    if workers == 0 {
        return Err(domain("mc_stats needs at least 1 worker"));
    }
    if n == 0 {
        return Err(domain("cannot sample a permutation of size 0"));
    }
    let sampler = (ensemble == Ensemble::Separable).then(|| SeparableSampler::new(n));
    let per = samples / workers as u64;
    let extra = samples % workers as u64;
    let partials: Vec<Result<Sums>> = (0..workers as u64)
        .into_par_iter()
        .map(|w| {
            let mut rng = worker_rng(seed, w);
            let count = per + u64::from(w < extra);
            let mut sums = Sums::default();
            for _ in 0..count {
                let p = match &sampler {
                    Some(s) => s.sample(n, &mut rng)?,
                    None => sample_uniform(n, &mut rng)?,
                };
                let prof = alt_profile(&p);
                for (i, f) in Flavor::ALL.into_iter().enumerate() {
                    let a = u128::from(prof.get(f));
                    sums.sum[i] += a;
                    sums.sum_sq[i] += a * a;
                }
            }
            Ok(sums)
        })
        .collect();
    let mut total = Sums::default();
    for p in partials {
        total = total.merge(p?);
    }
    let count = samples as f64;
    let flavors = Flavor::ALL
        .into_iter()
        .enumerate()
        .map(|(i, flavor)| {
            let (s1, s2) = (total.sum[i], total.sum_sq[i]);
            let mean = s1 as f64 / count;
            // Σ(A − mean)² = (samples·ΣA² − (ΣA)²) / samples, exact in integers.
            let centered = samples as u128 * s2 - s1 * s1;
            let variance = centered as f64 / (count * (count - 1.0));
            FlavorEstimate {
                flavor,
                mean,
                variance,
                std_error: (variance / count).sqrt(),
                sum: s1.to_string(),
                sum_sq: s2.to_string(),
            }
        })
        .collect();
    Ok(McEstimate { n, ensemble, samples, seed, workers, flavors })
}

/// Endless stream of samples drawn from [`worker_rng`]`(seed, 0)`.
pub fn sample_stream(n: usize, seed: u64, ensemble: Ensemble) -> Result<SampleStream> {
    if n == 0 {
        return Err(domain("cannot sample a permutation of size 0"));
    }
    let sampler = (ensemble == Ensemble::Separable).then(|| SeparableSampler::new(n));
    Ok(SampleStream { n, rng: worker_rng(seed, 0), sampler })
}

pub struct SampleStream {
    n: usize,
    rng: ChaCha20Rng,
    sampler: Option<SeparableSampler>,
}

impl Iterator for SampleStream {
    type Item = Permutation;
    fn next(&mut self) -> Option<Permutation> {
        let p = match &self.sampler {
            Some(s) => s.sample(self.n, &mut self.rng),
            None => sample_uniform(self.n, &mut self.rng),
        };
        Some(p.expect("size validated when the stream was built"))
    }
}

/// Pearson χ² statistic of observed counts against equal expected counts.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::to_f64;
    use crate::perm::{block_stats, enumerate_separable, is_separable};
    use crate::schroder::block_distribution;
    use std::collections::HashMap;

    fn counts_over_sep(n: usize, draws: usize, sampler: &SeparableSampler, seed: u64) -> Vec<u64> {
        let index: HashMap<Permutation, usize> =
            enumerate_separable(n).unwrap().enumerate().map(|(i, p)| (p, i)).collect();
        let mut counts = vec![0u64; index.len()];
        let mut rng = worker_rng(seed, 0);
        for _ in 0..draws {
            counts[index[&sampler.sample(n, &mut rng).unwrap()]] += 1;
        }
        counts
    }

    #[test]
    fn size_one_and_errors() {
        let s = SeparableSampler::new(5);
        let mut rng = worker_rng(1, 0);
        assert_eq!(s.sample(1, &mut rng).unwrap(), Permutation::identity(1));
        assert!(s.sample(0, &mut rng).is_err());
        assert!(matches!(s.sample(6, &mut rng), Err(Error::Capacity { .. })));
        assert_eq!(sample_uniform(1, &mut rng).unwrap(), Permutation::identity(1));
    }

    #[test]
    fn size_two_is_fair() {
        let s = SeparableSampler::new(2);
        let mut rng = worker_rng(7, 0);
        let draws = 100_000;
        let ups = (0..draws)
            .filter(|_| s.sample(2, &mut rng).unwrap().values() == [1, 2])
            .count() as f64;
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((ups - draws as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn large_samples_are_separable() {
        let s = SeparableSampler::new(200);
        let mut rng = worker_rng(3, 0);
        for _ in 0..2000 {
            assert!(is_separable(&s.sample(200, &mut rng).unwrap()));
        }
    }

    #[test]
    fn exact_fallback_path_is_uniform() {
        // Two fast bits make nearly every draw fall back to exact arithmetic.
        let s = SeparableSampler::new(5).with_fast_bits(2);
        let counts = counts_over_sep(5, 45_000, &s, 11);
        assert!(chi_square_uniform(&counts) < 135.0);
        let s = SeparableSampler::new(300).with_fast_bits(3);
        let mut rng = worker_rng(5, 0);
        for _ in 0..200 {
            assert!(is_separable(&s.sample(300, &mut rng).unwrap()));
        }
    }

    #[test]
    fn total_variation_is_small() {
        for (n, seed) in [(4usize, 21u64), (6, 22)] {
            let s = SeparableSampler::new(n);
            let draws = 1_000_000;
            let counts = counts_over_sep(n, draws, &s, seed);
            let uniform = 1.0 / counts.len() as f64;
            let tv: f64 = counts.iter().map(|&c| (c as f64 / draws as f64 - uniform).abs()).sum::<f64>() / 2.0;
            assert!(tv < 0.01, "n = {n}: tv = {tv}");
        }
    }

    /// Large enough that the floating-point path decides almost every draw.
    #[test]
    fn fast_path_matches_block_law() {
        let n = 60;
        let law: Vec<f64> = block_distribution(n).unwrap().iter().map(to_f64).collect();
        let bin = |j: usize| match j {
            j if j <= 5 => j - 1,
            j if j < n - 5 => 5,
            j => j - (n - 5) + 6,
        };
        let mut expected = vec![0.0; 12];
        for (j, p) in (1..=n).zip(&law) {
            expected[bin(j)] += p;
        }
        let draws = 40_000u64;
        let mut counts = vec![0u64; 12];
        let s = SeparableSampler::new(n);
        let mut rng = worker_rng(17, 0);
        for _ in 0..draws {
            counts[bin(block_stats(&s.sample(n, &mut rng).unwrap()).b_plus)] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .zip(&expected)
            .map(|(&c, &p)| {
                let e = p * draws as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        // 11 degrees of freedom; the 99.99% quantile is about 35.
        assert!(chi2 < 35.0, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn uniform_ensemble_on_s3() {
        let mut rng = worker_rng(2, 0);
        let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
        for _ in 0..60_000 {
            *counts.entry(sample_uniform(3, &mut rng).unwrap().into_values()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let sigma = (60_000.0f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for c in counts.values() {
            assert!((*c as f64 - 10_000.0).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn mc_is_reproducible() {
        let a = mc_stats(40, 300, 9, 3, Ensemble::Separable).unwrap();
        let b = mc_stats(40, 300, 9, 3, Ensemble::Separable).unwrap();
        assert_eq!(a, b);
        let c = mc_stats(40, 300, 10, 3, Ensemble::Separable).unwrap();
        assert_ne!(a, c);
        assert!(mc_stats(40, 1, 9, 3, Ensemble::Separable).is_err());
        assert!(mc_stats(40, 10, 9, 0, Ensemble::Uniform).is_err());
        let est = a.get(Flavor::Pm);
        assert!((est.std_error - (est.variance / 300.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn stream_is_reproducible() {
        let a: Vec<_> = sample_stream(30, 4, Ensemble::Separable).unwrap().take(5).collect();
        let b: Vec<_> = sample_stream(30, 4, Ensemble::Separable).unwrap().take(5).collect();
        assert_eq!(a, b);
        assert!(sample_stream(0, 4, Ensemble::Uniform).is_err());
    }

    #[test]
    fn candidate_order_covers_every_length_once() {
        for m in 2..12 {
            let mut any: Vec<usize> = SeparableSampler::candidates(Shape::Any, m).collect();
            any.sort_unstable();
            assert_eq!(any, (1..=m).collect::<Vec<_>>());
            let mut ind: Vec<usize> = SeparableSampler::candidates(Shape::PlusIndec, m).collect();
            ind.sort_unstable();
            assert_eq!(ind, (1..m).collect::<Vec<_>>());
        }
    }

    #[test]
    fn weights_sum_to_totals() {
        let s = SeparableSampler::new(30);
        for m in 2..=30 {
            for shape in [Shape::Any, Shape::PlusIndec] {
                let sum: BigUint = SeparableSampler::candidates(shape, m).map(|k| s.weight(m, k)).sum();
                assert_eq!(sum, s.total(shape, m));
            }
        }
    }

    mod props {
        use super::*;
        use crate::las::alt_profile;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn samples_are_separable_with_parity(n in 1usize..150, seed in any::<u64>()) {
                let p = SeparableSampler::new(n).sample(n, &mut worker_rng(seed, 0)).unwrap();
                prop_assert!(is_separable(&p));
                let a = alt_profile(&p);
                prop_assert_eq!((a.a_pp % 2, a.a_mm % 2, a.a_pm % 2, a.a_mp % 2), (0, 0, 1, 1));
            }
        }
    }
}
