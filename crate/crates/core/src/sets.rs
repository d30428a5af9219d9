//! Finite ordered sets, sumsets and consecutive r-differences.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{Debug, Display};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetsError {
    #[error("elements must be strictly increasing (violated at index {index})")]
    NotStrictlyIncreasing { index: usize },
    #[error("difference order r must be at least 1")]
    ZeroOrder,
    #[error("need more than r = {r} elements, got {k}")]
    TooFewElements { k: usize, r: usize },
    #[error("all sets must have the same cardinality (got {0:?})")]
    UnequalCardinalities(Vec<usize>),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("residue {residue} occurs twice modulo {p}")]
    DuplicateResidue { residue: i64, p: u64 },
}

/// Ordered additive scalar: the element type of [`SortedSet`].
pub trait Scalar: Clone + Ord + Hash + Debug + Display + Send + Sync {
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;

    /// Sorted, deduplicated `{a + b}`; both inputs sorted and non-empty.
    fn sumset_kernel(a: &[Self], b: &[Self]) -> Vec<Self> {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a {
            out.extend(b.iter().map(|y| x.plus(y)));
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl Scalar for i64 {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn minus(&self, other: &Self) -> Self {
        self - other
    }

    fn sumset_kernel(a: &[i64], b: &[i64]) -> Vec<i64> {
        let lo = a[0] + b[0];
        let span = (a[a.len() - 1] + b[b.len() - 1] - lo + 1) as u128;
        let pairs = (a.len() as u128) * (b.len() as u128);
        // A bitmap over the span beats sorting the pairs unless the span is
        // much larger than the pair count.
        if span > 64 * pairs + 4096 || span > (1 << 34) {
            let mut out: Vec<i64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
            out.sort_unstable();
            out.dedup();
            return out;
        }
        let span = span as usize;
        let mut bits = vec![0u64; span.div_ceil(64)];
        for &x in a {
            let base = x - lo;
            for &y in b {
                let i = (base + y) as usize;
                bits[i >> 6] |= 1 << (i & 63);
            }
        }
        collect_bits(&bits, lo)
    }
}

pub(crate) fn collect_bits(bits: &[u64], offset: i64) -> Vec<i64> {
    let mut out = Vec::new();
    for (w, &word) in bits.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let t = word.trailing_zeros() as i64;
            out.push(offset + (w as i64) * 64 + t);
            word &= word - 1;
        }
    }
    out
}

impl Scalar for Rat {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn minus(&self, other: &Self) -> Self {
        self - other
    }
}

/// Strictly increasing finite set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<T>",
    into = "Vec<T>",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct SortedSet<T: Scalar>(Vec<T>);

impl<T: Scalar> SortedSet<T> {
    /// Sorts and deduplicates.
    pub fn from_unsorted(mut elements: Vec<T>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        SortedSet(elements)
    }

    /// Accepts only strictly increasing input.
    pub fn from_sorted(elements: Vec<T>) -> Result<Self, SetsError> {
        if let Some(i) = elements.windows(2).position(|w| w[0] >= w[1]) {
            return Err(SetsError::NotStrictlyIncreasing { index: i + 1 });
        }
        Ok(SortedSet(elements))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.0.binary_search(x).is_ok()
    }

    pub fn is_subset(&self, other: &SortedSet<T>) -> bool {
        self.0.iter().all(|x| other.contains(x))
    }

    pub fn translate(&self, c: &T) -> SortedSet<T> {
        SortedSet(self.0.iter().map(|x| x.plus(c)).collect())
    }

    /// Consecutive gaps `a_{i+1} - a_i`.
    pub fn gaps(&self) -> Vec<T> {
        self.0.windows(2).map(|w| w[1].minus(&w[0])).collect()
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for SortedSet<T> {
    type Error = SetsError;
    fn try_from(v: Vec<T>) -> Result<Self, SetsError> {
        SortedSet::from_sorted(v)
    }
}

impl<T: Scalar> From<SortedSet<T>> for Vec<T> {
    fn from(s: SortedSet<T>) -> Vec<T> {
        s.0
    }
}

impl<'a, T: Scalar> IntoIterator for &'a SortedSet<T> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Tuple of `r` consecutive gaps.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RDiffTuple<T>(pub Vec<T>);

impl<T> RDiffTuple<T> {
    pub fn order(&self) -> usize {
        self.0.len()
    }
}

/// `A + B = {a + b}`; empty if either operand is empty.
pub fn sumset<T: Scalar>(a: &SortedSet<T>, b: &SortedSet<T>) -> SortedSet<T> {
    if a.is_empty() || b.is_empty() {
        return SortedSet(Vec::new());
    }
    SortedSet(T::sumset_kernel(&a.0, &b.0))
}

fn check_order(k: usize, r: usize) -> Result<(), SetsError> {
    if r == 0 {
        return Err(SetsError::ZeroOrder);
    }
    if r >= k {
        return Err(SetsError::TooFewElements { k, r });
    }
    Ok(())
}

/// The `k - r` tuples `(a_{i+1} - a_i, ..., a_{i+r} - a_{i+r-1})` in order.
pub fn consecutive_r_diffs<T: Scalar>(a: &SortedSet<T>, r: usize) -> Result<Vec<RDiffTuple<T>>, SetsError> {
    check_order(a.len(), r)?;
    Ok(a.gaps().windows(r).map(|w| RDiffTuple(w.to_vec())).collect())
}

/// `D_r(A)`, the set of distinct consecutive r-differences.
pub fn distinct_r_diffs<T: Scalar>(a: &SortedSet<T>, r: usize) -> Result<BTreeSet<RDiffTuple<T>>, SetsError> {
    Ok(consecutive_r_diffs(a, r)?.into_iter().collect())
}

/// `|D_r(A)|` without materializing tuples.
pub fn count_distinct_r_diffs<T: Scalar>(a: &SortedSet<T>, r: usize) -> Result<usize, SetsError> {
    check_order(a.len(), r)?;
    let gaps = a.gaps();
    let distinct: HashSet<&[T]> = gaps.windows(r).collect();
    Ok(distinct.len())
}

/// True iff all `k - r` consecutive r-difference tuples are distinct.
pub fn has_distinct_consecutive_r_diffs<T: Scalar>(a: &SortedSet<T>, r: usize) -> Result<bool, SetsError> {
    Ok(count_distinct_r_diffs(a, r)? == a.len() - r)
}

/// True iff the concatenated `(d r)`-tuples over `i = 1..k-r` are distinct.
pub fn has_distinct_dtuples<T: Scalar>(family: &[SortedSet<T>], r: usize) -> Result<bool, SetsError> {
    let sizes: Vec<usize> = family.iter().map(SortedSet::len).collect();
    let Some(&k) = sizes.first() else {
        return Err(SetsError::UnequalCardinalities(sizes));
    };
    if sizes.iter().any(|&s| s != k) {
        return Err(SetsError::UnequalCardinalities(sizes));
    }
    check_order(k, r)?;
    let gaps: Vec<Vec<T>> = family.iter().map(SortedSet::gaps).collect();
    let mut seen = HashSet::with_capacity(k - r);
    for i in 0..k - r {
        let key: Vec<&[T]> = gaps.iter().map(|g| &g[i..i + r]).collect();
        if !seen.insert(key) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Residues of `F_p` ordered by their smallest positive representative,
/// i.e. mapped into `{1, ..., p}` with `0` sent to `p`.
pub fn order_mod_p(residues: &[i64], p: u64) -> Result<SortedSet<i64>, SetsError> {
    if !is_prime(p) {
        return Err(SetsError::NotPrime(p));
    }
    let pi = p as i64;
    let mut reps: Vec<i64> = residues
        .iter()
        .map(|&x| match x.rem_euclid(pi) {
            0 => pi,
            v => v,
        })
        .collect();
    reps.sort_unstable();
    if let Some(w) = reps.windows(2).find(|w| w[0] == w[1]) {
        return Err(SetsError::DuplicateResidue { residue: w[0] % pi, p });
    }
    Ok(SortedSet(reps))
}

/// `A + B` in `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModSumset {
    pub p: u64,
    /// Sorted residues in `0..p`.
    pub residues: Vec<u64>,
    pub full: bool,
}

pub fn sumset_mod_p(a: &[i64], b: &[i64], p: u64) -> Result<ModSumset, SetsError> {
    if !is_prime(p) {
        return Err(SetsError::NotPrime(p));
    }
    let pi = p as i64;
    let mut hit = vec![false; p as usize];
    let a: BTreeSet<i64> = a.iter().map(|x| x.rem_euclid(pi)).collect();
    let b: BTreeSet<i64> = b.iter().map(|x| x.rem_euclid(pi)).collect();
    for x in &a {
        for y in &b {
            hit[((x + y) % pi) as usize] = true;
        }
    }
    let residues: Vec<u64> = (0..p).filter(|&i| hit[i as usize]).collect();
    let full = residues.len() as u64 == p;
    Ok(ModSumset { p, residues, full })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[i64]) -> SortedSet<i64> {
        SortedSet::from_sorted(v.to_vec()).unwrap()
    }

    #[test]
    fn sumset_examples() {
        assert_eq!(sumset(&s(&[0, 1]), &s(&[0, 2])), s(&[0, 1, 2, 3]));
        let a = s(&[3, 5, 9]);
        assert_eq!(sumset(&a, &s(&[0])), a);
        // all nine sums of {0,1,3}: 0,1,3,1,2,4,3,4,6
        assert_eq!(sumset(&s(&[0, 1, 3]), &s(&[0, 1, 3])), s(&[0, 1, 2, 3, 4, 6]));
    }

    #[test]
    fn sumset_sparse_fallback() {
        let a = s(&[0, 1 << 40]);
        let b = s(&[0, 5]);
        assert_eq!(sumset(&a, &b), s(&[0, 5, 1 << 40, (1 << 40) + 5]));
    }

    #[test]
    fn rational_sumset() {
        let r = |x: &str| x.parse::<Rat>().unwrap();
        let a = SortedSet::from_unsorted(vec![r("1/2"), r("0")]);
        let b = SortedSet::from_unsorted(vec![r("1/3")]);
        assert_eq!(sumset(&a, &b).into_vec(), vec![r("1/3"), r("5/6")]);
    }

    #[test]
    fn from_sorted_rejects_duplicates() {
        assert_eq!(SortedSet::from_sorted(vec![1i64, 2, 2]), Err(SetsError::NotStrictlyIncreasing { index: 2 }));
    }

    #[test]
    fn r_diff_examples() {
        let d = consecutive_r_diffs(&s(&[0, 1, 3, 6]), 1).unwrap();
        assert_eq!(d, vec![RDiffTuple(vec![1]), RDiffTuple(vec![2]), RDiffTuple(vec![3])]);
        assert_eq!(count_distinct_r_diffs(&s(&[0, 1, 3, 6]), 1).unwrap(), 3);

        let ap = distinct_r_diffs(&s(&[0, 2, 4, 6]), 2).unwrap();
        assert_eq!(ap.into_iter().collect::<Vec<_>>(), vec![RDiffTuple(vec![2, 2])]);

        let d = consecutive_r_diffs(&s(&[0, 1, 3, 4]), 2).unwrap();
        assert_eq!(d, vec![RDiffTuple(vec![1, 2]), RDiffTuple(vec![2, 1])]);
    }

    #[test]
    fn r_diff_errors() {
        assert_eq!(consecutive_r_diffs(&s(&[0, 1]), 2), Err(SetsError::TooFewElements { k: 2, r: 2 }));
        assert_eq!(consecutive_r_diffs(&s(&[0, 1]), 0), Err(SetsError::ZeroOrder));
        assert!(has_distinct_consecutive_r_diffs(&s(&[]), 1).is_err());
    }

    #[test]
    fn distinctness_predicate() {
        assert!(has_distinct_consecutive_r_diffs(&s(&[0, 1, 3, 6]), 1).unwrap());
        assert!(!has_distinct_consecutive_r_diffs(&s(&[0, 2, 4, 6]), 1).unwrap());
        assert!(has_distinct_consecutive_r_diffs(&s(&[0, 1, 2, 4]), 2).unwrap());
    }

    #[test]
    fn dtuples() {
        assert!(has_distinct_dtuples(&[s(&[0, 2, 4]), s(&[0, 1, 3])], 1).unwrap());
        assert!(!has_distinct_dtuples(&[s(&[0, 2, 4]), s(&[0, 2, 4])], 1).unwrap());
        assert_eq!(
            has_distinct_dtuples(&[s(&[0, 2, 4]), s(&[0, 1])], 1),
            Err(SetsError::UnequalCardinalities(vec![3, 2]))
        );
        for a in [s(&[0, 1, 3, 6]), s(&[0, 2, 4, 6])] {
            assert_eq!(
                has_distinct_dtuples(std::slice::from_ref(&a), 1).unwrap(),
                has_distinct_consecutive_r_diffs(&a, 1).unwrap()
            );
        }
    }

    #[test]
    fn mod_p_ordering() {
        assert_eq!(order_mod_p(&[3, 6, 1], 7).unwrap(), s(&[1, 3, 6]));
        assert_eq!(order_mod_p(&[0, 5], 7).unwrap(), s(&[5, 7]));
        assert_eq!(order_mod_p(&[10, 2], 7).unwrap(), s(&[2, 3]));
        assert_eq!(order_mod_p(&[1, 8], 7), Err(SetsError::DuplicateResidue { residue: 1, p: 7 }));
        assert_eq!(order_mod_p(&[1], 8), Err(SetsError::NotPrime(8)));
    }

    #[test]
    fn mod_p_sumset() {
        let all: Vec<i64> = (0..5).collect();
        assert!(sumset_mod_p(&all, &all, 5).unwrap().full);
        let m = sumset_mod_p(&[0], &[1, 2], 5).unwrap();
        assert_eq!(m.residues, vec![1, 2]);
        assert!(!m.full);
        // quadratic residues mod 7: all nine sums land in 1..6, never 0
        let m = sumset_mod_p(&[1, 2, 4], &[1, 2, 4], 7).unwrap();
        assert_eq!(m.residues, vec![1, 2, 3, 4, 5, 6]);
        assert!(!m.full);
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
