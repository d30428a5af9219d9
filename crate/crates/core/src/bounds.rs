//! Checks of the sumset inequalities.
//!
//! Integer inequalities are checked exactly. Inequalities involving roots or
//! Euler's number are raised to a power where that clears the root, and the
//! remaining transcendental constant is replaced by a rational bracket that
//! is refined until the comparison is decided, so a reported pass is certain.

use std::ops::Range;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::numeric::{certify, e_bracket, nth_root_bracket, Bracket, NumericError, Rat, INITIAL_BITS};
use crate::sets::{
    count_distinct_r_diffs, has_distinct_consecutive_r_diffs, has_distinct_dtuples, order_mod_p, sumset, sumset_mod_p,
    Scalar, SetsError, SortedSet,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Sets(#[from] SetsError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("A does not have distinct consecutive {r}-differences")]
    NotDistinct { r: usize },
    #[error("A is not a subset of B")]
    NotSubset,
    #[error("sets must be non-empty")]
    Empty,
    #[error("families have different lengths ({0} and {1})")]
    FamilyMismatch(usize, usize),
}

/// Outcome of one inequality check; `holds` iff `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub lhs: Bracket,
    pub rhs: Bracket,
    pub holds: bool,
    /// Check-specific sharpness ratio; see the individual checks.
    pub ratio: Bracket,
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Split of a sorted sumset into `t` consecutive blocks whose sizes differ
/// by at most one (larger blocks first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionScheme {
    pub t: usize,
    pub ranges: Vec<Range<usize>>,
}

impl PartitionScheme {
    pub fn new(total: usize, t: usize) -> Self {
        assert!(t >= 1, "at least one block");
        let (base, extra) = (total / t, total % t);
        let mut start = 0;
        let ranges = (0..t)
            .map(|u| {
                let len = base + usize::from(u < extra);
                let r = start..start + len;
                start += len;
                r
            })
            .collect();
        PartitionScheme { t, ranges }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.ranges.iter().map(|r| r.len()).collect()
    }

    pub fn parts<'a, T>(&self, c: &'a [T]) -> Vec<&'a [T]> {
        self.ranges.iter().map(|r| &c[r.clone()]).collect()
    }
}

/// Result of the double-counting inequality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum DcdCheck {
    /// `|D_r(A)| <= 2r`: only `|B| <= |A + B|` is checked.
    Trivial { distinct: usize, report: BoundReport },
    /// `(|D_r(A)| - (t - 1) r) |B| <= sum_u binom(|C_u|, r + 1)` with
    /// `t = floor(|D_r(A)| / 2r)`; ratio is lhs / rhs.
    Counting { distinct: usize, scheme: PartitionScheme, report: BoundReport },
}

impl DcdCheck {
    pub fn holds(&self) -> bool {
        match self {
            DcdCheck::Trivial { report, .. } | DcdCheck::Counting { report, .. } => report.holds,
        }
    }
}

fn ratio_of(lhs: &Rat, rhs: &Rat) -> Bracket {
    if rhs.is_zero() {
        Bracket::exact(Rat::zero())
    } else {
        Bracket::exact(lhs / rhs)
    }
}

fn int(n: usize) -> Rat {
    Rat::from(n as u64)
}

pub fn dcd_counting_check<T: Scalar>(a: &SortedSet<T>, b: &SortedSet<T>, r: usize) -> Result<DcdCheck, BoundsError> {
    if b.is_empty() {
        return Err(BoundsError::Empty);
    }
    let distinct = count_distinct_r_diffs(a, r)?;
    let c = sumset(a, b);
    if distinct <= 2 * r {
        let (lhs, rhs) = (int(b.len()), int(c.len()));
        let report = BoundReport {
            holds: lhs <= rhs,
            ratio: ratio_of(&lhs, &rhs),
            lhs: Bracket::exact(lhs),
            rhs: Bracket::exact(rhs),
        };
        return Ok(DcdCheck::Trivial { distinct, report });
    }
    let t = distinct / (2 * r);
    let scheme = PartitionScheme::new(c.len(), t);
    let lhs = BigUint::from(distinct - (t - 1) * r) * BigUint::from(b.len());
    let rhs: BigUint = scheme.sizes().iter().map(|&s| binom(s as u64, r as u64 + 1)).sum();
    let (lhs, rhs) = (Rat::from(BigInt::from(lhs)), Rat::from(BigInt::from(rhs)));
    let report = BoundReport {
        holds: lhs <= rhs,
        ratio: ratio_of(&lhs, &rhs),
        lhs: Bracket::exact(lhs),
        rhs: Bracket::exact(rhs),
    };
    Ok(DcdCheck::Counting { distinct, scheme, report })
}

/// Bracket of `e^{-r(log 2 + 1)} = (2e)^{-r}`.
pub fn main2_constant(r: usize, bits: u32) -> Bracket {
    let two_e = e_bracket(bits).scale(&Rat::from(2i64));
    two_e.powi(r as u32).recip()
}

/// Bracket of `sumset_len / (a_len * b_len^{1/(r+1)})`.
pub fn main2_ratio(sumset_len: usize, a_len: usize, b_len: usize, r: usize, bits: u32) -> Bracket {
    let root = nth_root_bracket(&int(b_len), r as u32 + 1, bits);
    root.scale(&int(a_len)).recip().scale(&int(sumset_len))
}

/// Certified decision of `(2e)^{-r} a_len b_len^{1/(r+1)} <= sumset_len`,
/// via `a_len^{r+1} b_len <= (sumset_len (2e)^r)^{r+1}`.
pub fn main2_holds(sumset_len: usize, a_len: usize, b_len: usize, r: usize) -> Result<bool, NumericError> {
    let k = r as i32 + 1;
    let target = int(a_len).pow(k) * int(b_len);
    certify(|bits| {
        let e = e_bracket(bits);
        let side = |e: &Rat| (int(sumset_len) * (Rat::from(2i64) * e).pow(r as i32)).pow(k);
        if target <= side(&e.lo) {
            Some(true)
        } else if target > side(&e.hi) {
            Some(false)
        } else {
            None
        }
    })
}

fn main2_report(sumset_len: usize, a_len: usize, b_len: usize, r: usize) -> Result<BoundReport, BoundsError> {
    let holds = main2_holds(sumset_len, a_len, b_len, r)?;
    let root = nth_root_bracket(&int(b_len), r as u32 + 1, INITIAL_BITS);
    let lhs = main2_constant(r, INITIAL_BITS).mul(&root.scale(&int(a_len)));
    Ok(BoundReport {
        lhs,
        rhs: Bracket::exact(int(sumset_len)),
        holds,
        ratio: main2_ratio(sumset_len, a_len, b_len, r, INITIAL_BITS),
    })
}

/// `|A + B| >= (2e)^{-r} |A| |B|^{1/(r+1)}` for `A` with distinct
/// consecutive r-differences. `lhs` is the lower bound, `rhs = |A + B|`, and
/// `ratio = |A + B| / (|A| |B|^{1/(r+1)})`.
pub fn main2_check<T: Scalar>(a: &SortedSet<T>, b: &SortedSet<T>, r: usize) -> Result<BoundReport, BoundsError> {
    if b.is_empty() {
        return Err(BoundsError::Empty);
    }
    if !has_distinct_consecutive_r_diffs(a, r)? {
        return Err(BoundsError::NotDistinct { r });
    }
    main2_report(sumset(a, b).len(), a.len(), b.len(), r)
}

/// Bracket of `C_r = 2 r^{1 - 1/(r+1)} / ((r+1)!)^{1/(r+1)}`.
pub fn dcd2_constant(r: usize, bits: u32) -> Bracket {
    let fact: BigInt = (1..=r as u64 + 1).map(BigInt::from).product();
    let inner = Rat::new(num_traits::pow(BigInt::from(r), r), fact).expect("positive");
    nth_root_bracket(&inner, r as u32 + 1, bits).scale(&Rat::from(2i64))
}

/// `|D_r(A)| <= C_r |B|^{1 - 1/(r+1)} |A + B| / |B| + r` for `A ⊆ B`.
/// `lhs = |D_r(A)|`, `rhs` the bound, `ratio = lhs / rhs`.
///
/// Decided exactly: with `x = |D_r(A)| - r > 0` the inequality is
/// `x^{r+1} (r+1)! |B| <= (2 |A + B|)^{r+1} r^r`.
pub fn dcd2_check<T: Scalar>(a: &SortedSet<T>, b: &SortedSet<T>, r: usize) -> Result<BoundReport, BoundsError> {
    if !a.is_subset(b) {
        return Err(BoundsError::NotSubset);
    }
    // |A| <= r leaves no window, so D_r(A) is empty.
    let distinct = if a.len() > r { count_distinct_r_diffs(a, r)? } else { 0 };
    let c_len = sumset(a, b).len();
    let holds = if distinct <= r {
        true
    } else {
        let x = BigInt::from(distinct - r);
        let fact: BigInt = (1..=r as u64 + 1).map(BigInt::from).product();
        let left = num_traits::pow(x, r + 1) * fact * BigInt::from(b.len());
        let right = num_traits::pow(BigInt::from(2 * c_len), r + 1) * num_traits::pow(BigInt::from(r), r);
        left <= right
    };
    let root = nth_root_bracket(&int(b.len()).pow(r as i32), r as u32 + 1, INITIAL_BITS);
    let rhs = dcd2_constant(r, INITIAL_BITS).mul(&root).scale(&Rat::new(c_len as u64, b.len() as u64)?);
    let rhs = Bracket::new(&rhs.lo + int(r), &rhs.hi + int(r));
    let lhs = int(distinct);
    let ratio = rhs.recip().scale(&lhs);
    Ok(BoundReport { lhs: Bracket::exact(lhs), rhs, holds, ratio })
}

/// The `F_p` dichotomy: either `A + B = F_p` or the main bound holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FpCheck {
    pub p: u64,
    pub sumset_size: usize,
    pub full: bool,
    /// Present when `A + B` is not all of `F_p`.
    pub bound: Option<BoundReport>,
}

impl FpCheck {
    pub fn holds(&self) -> bool {
        self.full || self.bound.as_ref().is_some_and(|b| b.holds)
    }
}

pub fn fp_check(a: &[i64], b: &[i64], p: u64, r: usize) -> Result<FpCheck, BoundsError> {
    let ordered = order_mod_p(a, p)?;
    if !has_distinct_consecutive_r_diffs(&ordered, r)? {
        return Err(BoundsError::NotDistinct { r });
    }
    let b_set = order_mod_p(b, p)?;
    if b_set.is_empty() {
        return Err(BoundsError::Empty);
    }
    let sum = sumset_mod_p(a, b, p)?;
    let bound = if sum.full { None } else { Some(main2_report(sum.residues.len(), ordered.len(), b_set.len(), r)?) };
    Ok(FpCheck { p, sumset_size: sum.residues.len(), full: sum.full, bound })
}

/// Ratio report for families with distinct d-tuples of r-differences:
/// `prod |A_m + B_m| / (k^{dr+1} prod |B_m|)^{1/(d(r+1))}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultidimReport {
    pub d: usize,
    pub k: usize,
    pub sumset_sizes: Vec<usize>,
    /// `k < 2rd`, where the estimate is trivial.
    pub trivial_branch: bool,
    pub ratio: Bracket,
}

pub fn multidim_check<T: Scalar>(
    a_family: &[SortedSet<T>],
    b_family: &[SortedSet<T>],
    r: usize,
) -> Result<MultidimReport, BoundsError> {
    if a_family.len() != b_family.len() {
        return Err(BoundsError::FamilyMismatch(a_family.len(), b_family.len()));
    }
    if b_family.iter().any(SortedSet::is_empty) {
        return Err(BoundsError::Empty);
    }
    if !has_distinct_dtuples(a_family, r)? {
        return Err(BoundsError::NotDistinct { r });
    }
    let d = a_family.len();
    let k = a_family[0].len();
    let sumset_sizes: Vec<usize> = a_family.iter().zip(b_family).map(|(a, b)| sumset(a, b).len()).collect();
    let numer: BigInt = sumset_sizes.iter().map(|&s| BigInt::from(s)).product();
    let radicand: BigInt = num_traits::pow(BigInt::from(k), d * r + 1)
        * b_family.iter().map(|b| BigInt::from(b.len())).product::<BigInt>();
    let root = nth_root_bracket(&Rat::from(radicand), (d * (r + 1)) as u32, INITIAL_BITS);
    let ratio = root.recip().scale(&Rat::from(numer));
    Ok(MultidimReport { d, k, sumset_sizes, trivial_branch: k < 2 * r * d, ratio })
}
