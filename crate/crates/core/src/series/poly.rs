//! Truncated products of integer coefficient vectors.
//!
//! Large products go through Kronecker substitution: both operands are
//! packed into a single big integer with fixed-width slots, multiplied
//! once, and the slots are read back as balanced (signed) digits.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};

/// Below this many terms in the shorter operand the schoolbook loop wins.
const SCHOOLBOOK_CUTOFF: usize = 24;

/// First `keep` coefficients of `a · b`.
pub fn mul_truncated(a: &[BigInt], b: &[BigInt], keep: usize) -> Vec<BigInt> {
    let a = trim(&a[..a.len().min(keep)]);
    let b = trim(&b[..b.len().min(keep)]);
    let mut out = if a.is_empty() || b.is_empty() {
        Vec::new()
    } else if a.len().min(b.len()) <= SCHOOLBOOK_CUTOFF {
        schoolbook(a, b, keep)
    } else {
        kronecker(a, b)
    };
    out.resize(keep, BigInt::zero());
    out
}

fn trim(v: &[BigInt]) -> &[BigInt] {
    let end = v.iter().rposition(|x| !x.is_zero()).map_or(0, |i| i + 1);
    &v[..end]
}

fn schoolbook(a: &[BigInt], b: &[BigInt], keep: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); (a.len() + b.len() - 1).min(keep)];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(keep.saturating_sub(i)) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn max_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|x| x.bits()).max().unwrap_or(0)
}

fn kronecker(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    // Each output coefficient is a sum of at most min(len) products, and
    // the balanced read-back needs one spare bit for the sign.
    let terms = a.len().min(b.len()) as u64;
    let needed = max_bits(a) + max_bits(b) + (64 - terms.leading_zeros() as u64) + 2;
    let slot_words = needed.div_ceil(32) as usize;
    let pa = pack(a, slot_words);
    let pb = pack(b, slot_words);
    unpack(&(pa * pb), slot_words, a.len() + b.len() - 1)
}

/// `Σ v_i 2^{32·slot_words·i}` as a signed integer.
fn pack(v: &[BigInt], slot_words: usize) -> BigInt {
    let mut pos = vec![0u32; v.len() * slot_words];
    let mut neg = vec![0u32; v.len() * slot_words];
    for (i, x) in v.iter().enumerate() {
        let target = if x.is_negative() { &mut neg } else { &mut pos };
        let digits = x.magnitude().to_u32_digits();
        target[i * slot_words..i * slot_words + digits.len()].copy_from_slice(&digits);
    }
    BigInt::from_biguint(Sign::Plus, BigUint::new(pos)) - BigInt::from_biguint(Sign::Plus, BigUint::new(neg))
}

fn unpack(p: &BigInt, slot_words: usize, count: usize) -> Vec<BigInt> {
    let negate = p.is_negative();
    let digits = p.magnitude().to_u32_digits();
    let slot_bits = 32 * slot_words as u64;
    let modulus = BigInt::from(1u8) << slot_bits;
    let half = BigInt::from(1u8) << (slot_bits - 1);
    let mut carry = false;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let lo = (i * slot_words).min(digits.len());
        let hi = ((i + 1) * slot_words).min(digits.len());
        let mut w = BigInt::from_biguint(Sign::Plus, BigUint::from_slice(&digits[lo..hi]));
        if carry {
            w += 1u8;
        }
        carry = w >= half;
        if carry {
            w -= &modulus;
        }
        out.push(if negate { -w } else { w });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_products() {
        assert_eq!(mul_truncated(&big(&[1, 1]), &big(&[1, -1]), 3), big(&[1, 0, -1]));
        assert_eq!(mul_truncated(&big(&[1, 2, 3]), &big(&[4, 5]), 2), big(&[4, 13]));
        assert_eq!(mul_truncated(&big(&[0, 0]), &big(&[4, 5]), 3), big(&[0, 0, 0]));
    }

    #[test]
    fn kronecker_handles_signs_and_huge_entries() {
        let huge = BigInt::from(7u8).pow(500);
        let a: Vec<BigInt> = (0..60).map(|i| if i % 3 == 0 { -&huge - i } else { &huge + i }).collect();
        let b: Vec<BigInt> = (0..50).map(|i| BigInt::from(i * i) - 700).collect();
        let keep = 109;
        assert_eq!(kronecker(&a, &b), schoolbook(&a, &b, keep));
    }

    proptest! {
        #[test]
        fn kronecker_matches_schoolbook(
            a in prop::collection::vec(any::<i64>(), 1..80),
            b in prop::collection::vec(any::<i64>(), 1..80),
        ) {
            let (a, b) = (big(&a), big(&b));
            let keep = a.len() + b.len() - 1;
            prop_assert_eq!(kronecker(&a, &b), schoolbook(&a, &b, keep));
        }
    }
}
