//! Explicit extremal examples.
//!
//! * [`sharp_pair`]: from a Sidon set `S` and the repetition-free sequence
//!   `s_1..s_k`, the planar sets `A2 = {(i, s_i)}`, `B2 = {(i, 0)}` embedded in
//!   `Z` by `(u, v) -> M u + v`. `A` has distinct consecutive r-differences
//!   while `|A + B| <= 2k|S|`.
//! * [`subset_sharp_example`]: partial sums of a repetition-free sequence
//!   with distinct `r`-windows, inside an interval `B`.
//! * [`self_sumset_report`]: `|A + A|` against the triangle inequality
//!   `|A + A| |B| <= |A + B|^2`.

use serde::Serialize;
use thiserror::Error;

use crate::bounds::main2_ratio;
use crate::debruijn::{repetition_free_sequence, window_sequence, DebruijnError};
use crate::numeric::{Bracket, INITIAL_BITS};
use crate::sets::{sumset, Scalar, SetsError, SortedSet};
use crate::sidon::{is_sidon, SidonError, SidonSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtremalError {
    #[error(transparent)]
    Sidon(#[from] SidonError),
    #[error(transparent)]
    Sequence(#[from] DebruijnError),
    #[error(transparent)]
    Sets(#[from] SetsError),
    #[error("need at least 2 symbols, got {0}")]
    TooFewSymbols(usize),
    #[error("no embedding modulus up to {0} preserves the sumset size")]
    ModulusSearchFailed(i64),
}

/// Sharp pair for the main sumset bound, with its planar preimage.
#[derive(Clone, Debug, Serialize)]
pub struct PlanarPair {
    pub sidon: Vec<i64>,
    pub r: usize,
    pub k: usize,
    pub modulus: i64,
    pub a2: Vec<(i64, i64)>,
    pub b2: Vec<(i64, i64)>,
    pub a: SortedSet<i64>,
    pub b: SortedSet<i64>,
    /// `|phi(A2) + phi(B2)|`
    pub sumset_size: usize,
    /// `|A2 + B2|`
    pub planar_sumset_size: usize,
}

impl PlanarPair {
    /// The `2 k |S|` upper bound.
    pub fn sumset_cap(&self) -> usize {
        2 * self.k * self.sidon.len()
    }
}

/// `|A2 + B2|` for `A2 = {(i, s_i)}` and `B2 = {(j, 0)}`, `1 <= i, j <= k`:
/// the pairs `(i + j, s_i)` counted on a dense grid.
fn planar_sumset_size(seq: &[i64], alphabet: &[i64]) -> usize {
    let k = seq.len();
    let m = alphabet.len();
    let sym: Vec<usize> = seq.iter().map(|s| alphabet.binary_search(s).expect("symbol from alphabet")).collect();
    let mut grid = vec![false; (2 * k - 1) * m];
    for (i, &si) in sym.iter().enumerate() {
        for j in 0..k {
            grid[(i + j) * m + si] = true;
        }
    }
    grid.iter().filter(|&&x| x).count()
}

pub fn sharp_pair(s: &SidonSet, r: usize) -> Result<PlanarPair, ExtremalError> {
    if s.len() < 2 {
        return Err(ExtremalError::TooFewSymbols(s.len()));
    }
    is_sidon(s.as_slice()).map_err(|c| ExtremalError::Sidon(SidonError::NotSidon(c)))?;
    let seq = window_sequence(s.as_slice(), r)?.symbols;
    let k = seq.len();
    let a2: Vec<(i64, i64)> = seq.iter().enumerate().map(|(i, &si)| (i as i64 + 1, si)).collect();
    let b2: Vec<(i64, i64)> = (1..=k as i64).map(|j| (j, 0)).collect();
    let planar = planar_sumset_size(&seq, s.as_slice());

    let spread = s.max().unwrap_or(0) - s.min().unwrap_or(0);
    let mut modulus = 2 * spread + 1;
    for _ in 0..32 {
        let a = SortedSet::from_sorted(a2.iter().map(|&(u, v)| modulus * u + v).collect())?;
        let b = SortedSet::from_sorted(b2.iter().map(|&(u, v)| modulus * u + v).collect())?;
        let sumset_size = sumset(&a, &b).len();
        if sumset_size == planar {
            return Ok(PlanarPair {
                sidon: s.as_slice().to_vec(),
                r,
                k,
                modulus,
                a2,
                b2,
                a,
                b,
                sumset_size,
                planar_sumset_size: planar,
            });
        }
        modulus *= 2;
    }
    Err(ExtremalError::ModulusSearchFailed(modulus))
}

/// `|A + B| / (|A| |B|^{1/(r+1)})` as a certified bracket.
pub fn ratio_main2<T: Scalar>(a: &SortedSet<T>, b: &SortedSet<T>, r: usize) -> Bracket {
    main2_ratio(sumset(a, b).len(), a.len(), b.len(), r, INITIAL_BITS)
}

/// `A ⊂ B = {0, ..., m^{r+1}}` with distinct consecutive r-differences and
/// `|A| = m (m-1)^{r-1}`.
#[derive(Clone, Debug, Serialize)]
pub struct SubsetSharpExample {
    pub m: usize,
    pub r: usize,
    pub sequence: Vec<i64>,
    pub a: SortedSet<i64>,
    pub b: SortedSet<i64>,
}

pub fn subset_sharp_example(m: usize, r: usize) -> Result<SubsetSharpExample, ExtremalError> {
    if m < 2 {
        return Err(ExtremalError::TooFewSymbols(m));
    }
    let alphabet: Vec<i64> = (1..=m as i64).collect();
    let sequence = repetition_free_sequence(&alphabet, r)?.symbols;
    let partial: Vec<i64> = sequence
        .iter()
        .scan(0i64, |acc, &s| {
            *acc += s;
            Some(*acc)
        })
        .collect();
    let a = SortedSet::from_sorted(partial)?;
    let top = (m as i64).pow(r as u32 + 1);
    let b = SortedSet::from_sorted((0..=top).collect())?;
    debug_assert!(a.is_subset(&b));
    Ok(SubsetSharpExample { m, r, sequence, a, b })
}

/// Informational report on `|A + A|`. The exponent fields are floats and are
/// never asserted on.
#[derive(Clone, Debug, Serialize)]
pub struct SelfSumsetReport {
    pub a_len: usize,
    pub b_len: usize,
    pub sumset_ab: usize,
    pub self_sumset: usize,
    /// `|A + A| |B| <= |A + B|^2`
    pub triangle_holds: bool,
    /// `log |A + A| / log |A|`
    pub exponent: f64,
    /// `1 + 2/(r+1)`
    pub reference_exponent: f64,
}

pub fn self_sumset_report<T: Scalar>(a: &SortedSet<T>, b: &SortedSet<T>, r: usize) -> SelfSumsetReport {
    let aa = sumset(a, a).len();
    let ab = sumset(a, b).len();
    let triangle_holds = (aa as u128) * (b.len() as u128) <= (ab as u128) * (ab as u128);
    let exponent = if a.len() > 1 { (aa as f64).ln() / (a.len() as f64).ln() } else { f64::NAN };
    SelfSumsetReport {
        a_len: a.len(),
        b_len: b.len(),
        sumset_ab: ab,
        self_sumset: aa,
        triangle_holds,
        exponent,
        reference_exponent: 1.0 + 2.0 / (r as f64 + 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rat;
    use crate::sets::{count_distinct_r_diffs, has_distinct_consecutive_r_diffs};
    use crate::sidon::mian_chowla;

    /// Brute-force `A + B` over all pairs, independent of the kernels.
    fn brute_sumset(a: &[i64], b: &[i64]) -> usize {
        let mut v: Vec<i64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
        v.sort();
        v.dedup();
        v.len()
    }

    #[test]
    fn sharp_pair_sizes() {
        let p = sharp_pair(&mian_chowla(4), 2).unwrap();
        assert_eq!(p.k, 36);
        assert_eq!((p.a.len(), p.b.len()), (36, 36));
        assert!(p.sumset_size <= 288);
        assert_eq!(p.sumset_size, p.planar_sumset_size);
        assert!(has_distinct_consecutive_r_diffs(&p.a, 2).unwrap());
    }

    #[test]
    fn sharp_pair_two_symbols() {
        let p = sharp_pair(&SidonSet::new(vec![1, 2]).unwrap(), 1).unwrap();
        assert_eq!(p.k, 2);
        assert!(has_distinct_consecutive_r_diffs(&p.a, 1).unwrap());
    }

    #[test]
    fn sharp_pair_enumerated() {
        let p = sharp_pair(&SidonSet::new(vec![1, 2, 4]).unwrap(), 1).unwrap();
        assert_eq!(p.k, 6);
        assert!(has_distinct_consecutive_r_diffs(&p.a, 1).unwrap());
        let brute = brute_sumset(p.a.as_slice(), p.b.as_slice());
        assert_eq!(brute, p.sumset_size);
        assert!(brute <= 36);
        assert_eq!(p.modulus, 7);
    }

    #[test]
    fn sharp_pair_rejects_small() {
        assert!(matches!(sharp_pair(&SidonSet::new(vec![3]).unwrap(), 1), Err(ExtremalError::TooFewSymbols(1))));
    }

    #[test]
    fn ratio_bounds_on_sharp_pairs() {
        for n in 2..=6 {
            for r in 1..=2 {
                let p = sharp_pair(&mian_chowla(n), r).unwrap();
                let ratio = ratio_main2(&p.a, &p.b, r);
                assert_eq!(ratio.le(&Rat::from(4i64)), Some(true), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn interval_ratio_is_small() {
        let a: SortedSet<i64> = SortedSet::from_unsorted((0..400).collect());
        // |A+A| = 799, ratio = 799 / (400 * 20)
        let ratio = ratio_main2(&a, &a, 1);
        assert!(ratio.is_exact());
        assert_eq!(ratio.lo, "799/8000".parse().unwrap());
    }

    #[test]
    fn subset_examples() {
        let e = subset_sharp_example(2, 2).unwrap();
        assert_eq!(e.sequence, vec![1, 2]);
        assert_eq!(e.a.as_slice(), &[1, 3]);
        assert_eq!(e.b.len(), 9);

        let e = subset_sharp_example(3, 2).unwrap();
        assert_eq!(e.a.len(), 6);
        assert_eq!(e.b.len(), 28);
        assert!(e.a.is_subset(&e.b));
        assert!(has_distinct_consecutive_r_diffs(&e.a, 2).unwrap());

        let e = subset_sharp_example(4, 3).unwrap();
        assert_eq!(count_distinct_r_diffs(&e.a, 3).unwrap(), e.a.len() - 3);
    }

    #[test]
    fn self_sumset() {
        let p = sharp_pair(&SidonSet::new(vec![1, 2, 4]).unwrap(), 1).unwrap();
        let rep = self_sumset_report(&p.a, &p.b, 1);
        assert!(rep.triangle_holds);
        let a: SortedSet<i64> = SortedSet::from_unsorted((0..10).collect());
        assert_eq!(self_sumset_report(&a, &a, 1).self_sumset, 19);
    }
}
