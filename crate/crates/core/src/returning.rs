//! Returning times `R_theta(phi) = {T >= 1 : {T theta} < phi}` of a rational
//! rotation.
//!
//! With `theta = p/q` and `phi = f/g`, every quantity lives on the grid
//! `(1/D) Z` for `D = lcm(q, g)`: `{T theta} D = T t mod D`, and the Slater
//! values `alpha = {a theta}`, `beta = 1 - {b theta}` and all partition
//! breakpoints are integers after scaling by `D`. Cell lookups are therefore
//! exact integer comparisons.
//!
//! A point `{s theta}` equal to an interior breakpoint is a boundary hit.
//! Boundary hits are looked up with the half-open convention like any other
//! point, but a disagreement there is reported separately from violations.

use std::collections::{BTreeSet, HashSet};

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::numeric::{frac, Rat};
use crate::sets::RDiffTuple;
use crate::threegap::{cyclic_r_diffs, orbit, ThreeGapError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReturningError {
    #[error("{name} must lie in (0, 1), got {value}")]
    OutOfRange { name: &'static str, value: Rat },
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("common denominator of theta and phi does not fit in 64 bits")]
    TooLarge,
    #[error("no return with 1 - {{b theta}} < phi below {bound}")]
    SearchBound { bound: u64 },
    #[error("need more than {r} returns below the horizon, found {found}")]
    TooFewReturns { r: usize, found: usize },
    #[error("gcd({p}, {q}) != 1")]
    NotCoprime { p: u64, q: u64 },
    #[error("need 1 <= N < q, got N = {n}, q = {q}")]
    BadLength { n: u64, q: u64 },
    #[error(transparent)]
    Orbit(#[from] ThreeGapError),
}

/// `theta`, `phi` on the common grid `(1/D) Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub denom: u64,
    /// `{theta} D`
    pub step: u64,
    /// `phi D`
    pub phi: u64,
}

impl Grid {
    pub fn new(theta: &Rat, phi: &Rat) -> Result<Grid, ReturningError> {
        let unit = |name, x: &Rat| {
            if x.is_positive() && *x < Rat::one() {
                x.to_u64_parts().ok_or(ReturningError::TooLarge)
            } else {
                Err(ReturningError::OutOfRange { name, value: x.clone() })
            }
        };
        let (tp, tq) = unit("theta", theta)?;
        let (fp, fq) = unit("phi", phi)?;
        let denom = tq.lcm(&fq);
        let scale =
            |num: u64, den: u64| (num as u128 * (denom / den) as u128).try_into().map_err(|_| ReturningError::TooLarge);
        Ok(Grid { denom, step: scale(tp, tq)?, phi: scale(fp, fq)? })
    }

    /// `{T theta} D`
    pub fn residue(&self, t: u64) -> u64 {
        ((t as u128 * self.step as u128) % self.denom as u128) as u64
    }

    pub fn to_rat(&self, x: i128) -> Rat {
        Rat::new(x, self.denom).expect("D > 0")
    }
}

/// `R_theta(phi) ∩ [1, T_max]`.
#[derive(Clone, Debug, Serialize)]
pub struct ReturnSet {
    pub theta: Rat,
    pub phi: Rat,
    pub t_max: u64,
    pub times: Vec<u64>,
    /// `T <= T_max` with `{T theta} = phi` exactly (excluded from `times`)
    pub boundary_hits: u64,
    #[serde(skip)]
    grid: Grid,
}

impl ReturnSet {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Gaps between consecutive returns.
    pub fn gaps(&self) -> Vec<u64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

pub fn returning_times(theta: &Rat, phi: &Rat, t_max: u64) -> Result<ReturnSet, ReturningError> {
    if t_max == 0 {
        return Err(ReturningError::EmptyHorizon);
    }
    let grid = Grid::new(theta, phi)?;
    let mut times = Vec::new();
    let mut boundary_hits = 0;
    let mut x = 0u64;
    for t in 1..=t_max {
        x = ((x as u128 + grid.step as u128) % grid.denom as u128) as u64;
        if x < grid.phi {
            times.push(t);
        } else if x == grid.phi {
            boundary_hits += 1;
        }
    }
    Ok(ReturnSet { theta: theta.clone(), phi: phi.clone(), t_max, times, boundary_hits, grid })
}

/// Least `a, b >= 1` with `alpha = {a theta} < phi` and
/// `beta = 1 - {b theta} < phi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlaterPair {
    pub a: u64,
    pub b: u64,
    pub alpha: Rat,
    pub beta: Rat,
    /// `phi > max(alpha, beta)` and `phi <= alpha + beta`
    pub invariants_hold: bool,
    #[serde(skip)]
    scaled: (u64, u64),
    #[serde(skip)]
    grid: Grid,
}

impl SlaterPair {
    /// `(alpha D, beta D)`
    pub fn scaled(&self) -> (u64, u64) {
        self.scaled
    }
}

pub fn slater_pair(theta: &Rat, phi: &Rat) -> Result<SlaterPair, ReturningError> {
    let grid = Grid::new(theta, phi)?;
    // {T theta} has period q = D / gcd(step, D); both searches end by then.
    let period = grid.denom / grid.step.gcd(&grid.denom);
    let a = (1..=period).find(|&t| grid.residue(t) < grid.phi).expect("{q theta} = 0 < phi");
    let b = (1..period)
        .find(|&t| {
            let x = grid.residue(t);
            x > 0 && grid.denom - x < grid.phi
        })
        .ok_or(ReturningError::SearchBound { bound: period })?;
    let (sa, sb) = (grid.residue(a), grid.denom - grid.residue(b));
    let invariants_hold = grid.phi > sa.max(sb) && grid.phi <= sa + sb;
    Ok(SlaterPair {
        a,
        b,
        alpha: grid.to_rat(sa as i128),
        beta: grid.to_rat(sb as i128),
        invariants_hold,
        scaled: (sa, sb),
        grid,
    })
}

/// Cells `[g_i, g_{i+1})` of `[0, phi)`, each labeled with the gap tuple
/// that follows every return landing in it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapPartition {
    /// `0 = g_0 <= g_1 <= ... <= g_m = phi`
    pub breakpoints: Vec<Rat>,
    pub labels: Vec<RDiffTuple<u64>>,
    #[serde(skip)]
    scaled: Vec<i128>,
}

impl GapPartition {
    fn new(scaled: Vec<i128>, labels: Vec<Vec<u64>>, grid: &Grid) -> Self {
        debug_assert!(scaled.windows(2).all(|w| w[0] <= w[1]));
        GapPartition {
            breakpoints: scaled.iter().map(|&x| grid.to_rat(x)).collect(),
            labels: labels.into_iter().map(RDiffTuple).collect(),
            scaled,
        }
    }

    /// Index of the cell containing the scaled point `x` in `[0, phi D)`.
    pub fn cell_of(&self, x: u64) -> usize {
        let x = x as i128;
        self.scaled[1..].partition_point(|&g| g <= x).min(self.labels.len() - 1)
    }

    /// Whether `x` equals an interior breakpoint.
    pub fn on_boundary(&self, x: u64) -> bool {
        let inner = &self.scaled[1..self.scaled.len() - 1];
        inner.contains(&(x as i128))
    }

    /// Labels of the cells with positive length.
    pub fn nonempty_labels(&self) -> BTreeSet<RDiffTuple<u64>> {
        (0..self.labels.len())
            .filter(|&i| self.scaled[i] < self.scaled[i + 1])
            .map(|i| self.labels[i].clone())
            .collect()
    }
}

/// `[0, phi - alpha) -> a`, `[phi - alpha, beta) -> a + b`, `[beta, phi) -> b`.
pub fn d1_partition(pair: &SlaterPair) -> GapPartition {
    let (al, be) = (pair.scaled.0 as i128, pair.scaled.1 as i128);
    let phi = pair.grid.phi as i128;
    let (a, b) = (pair.a, pair.b);
    GapPartition::new(vec![0, phi - al, be, phi], vec![vec![a], vec![a + b], vec![b]], &pair.grid)
}

/// Which strict ordering of `alpha`, `beta`, `phi` holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum D2Case {
    /// `phi - alpha < phi - beta < beta < alpha < phi`
    BetaBelowAlpha,
    /// `phi - beta < phi - alpha < alpha < beta < phi`
    AlphaBelowBeta,
    /// `phi - beta < alpha < phi - alpha < beta < phi`
    SmallAlpha,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error, Serialize)]
#[error("no displayed ordering of alpha, beta, phi holds strictly")]
pub struct NoCaseMatches;

pub fn d2_case(pair: &SlaterPair) -> Result<D2Case, NoCaseMatches> {
    let (al, be) = (pair.scaled.0 as i128, pair.scaled.1 as i128);
    let phi = pair.grid.phi as i128;
    let chain = |v: &[i128]| v.windows(2).all(|w| w[0] < w[1]);
    if chain(&[phi - al, phi - be, be, al, phi]) {
        Ok(D2Case::BetaBelowAlpha)
    } else if chain(&[phi - be, phi - al, al, be, phi]) {
        Ok(D2Case::AlphaBelowBeta)
    } else if chain(&[phi - be, al, phi - al, be, phi]) {
        Ok(D2Case::SmallAlpha)
    } else {
        Err(NoCaseMatches)
    }
}

/// The five-cell partition for pairs of consecutive gaps.
pub fn d2_partition(pair: &SlaterPair) -> Result<(D2Case, GapPartition), NoCaseMatches> {
    let case = d2_case(pair)?;
    let (al, be) = (pair.scaled.0 as i128, pair.scaled.1 as i128);
    let phi = pair.grid.phi as i128;
    let (a, b) = (pair.a, pair.b);
    let ab = a + b;
    let (bounds, labels) = match case {
        D2Case::BetaBelowAlpha => (
            vec![0, phi - al, 2 * be - al, be, phi - al + be, phi],
            vec![vec![a, b], vec![ab, ab], vec![ab, b], vec![b, a], vec![b, ab]],
        ),
        D2Case::AlphaBelowBeta => (
            vec![0, be - al, phi - al, phi - 2 * al + be, be, phi],
            vec![vec![a, ab], vec![a, b], vec![ab, a], vec![ab, ab], vec![b, a]],
        ),
        D2Case::SmallAlpha => (
            vec![0, phi - 2 * al, be - al, phi - al, be, phi],
            vec![vec![a, a], vec![a, ab], vec![a, b], vec![ab, a], vec![b, a]],
        ),
    };
    Ok((case, GapPartition::new(bounds, labels, &pair.grid)))
}

/// Pointwise comparison of observed gap tuples with a partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionMatch {
    pub order: usize,
    pub checked: u64,
    pub violations: u64,
    /// first return whose tuple disagrees with its cell, off any boundary
    pub first_violation: Option<u64>,
    pub boundary_points: u64,
    pub boundary_mismatches: u64,
    pub observed: BTreeSet<RDiffTuple<u64>>,
    pub nonempty_cells: BTreeSet<RDiffTuple<u64>>,
}

impl PartitionMatch {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks every return `s` followed by `order` further returns below the
/// horizon against the cell of `{s theta}`.
pub fn match_partition(ret: &ReturnSet, partition: &GapPartition) -> PartitionMatch {
    let order = partition.labels[0].order();
    let gaps = ret.gaps();
    let mut m = PartitionMatch {
        order,
        checked: 0,
        violations: 0,
        first_violation: None,
        boundary_points: 0,
        boundary_mismatches: 0,
        observed: BTreeSet::new(),
        nonempty_cells: partition.nonempty_labels(),
    };
    for (i, window) in gaps.windows(order).enumerate() {
        let s = ret.times[i];
        let x = ret.grid.residue(s);
        let expected = &partition.labels[partition.cell_of(x)].0;
        let boundary = partition.on_boundary(x);
        m.checked += 1;
        m.boundary_points += u64::from(boundary);
        if expected.as_slice() != window {
            if boundary {
                m.boundary_mismatches += 1;
            } else {
                m.violations += 1;
                m.first_violation.get_or_insert(s);
            }
        }
        m.observed.insert(RDiffTuple(window.to_vec()));
    }
    m
}

/// Distinct r-windows of the gap sequence of a truncated return set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmpiricalDiffs {
    pub r: usize,
    pub windows: usize,
    pub distinct: BTreeSet<RDiffTuple<u64>>,
    /// `2r + 1`
    pub bound: usize,
    pub holds: bool,
}

/// Windows of `r` consecutive gaps, dropping the last `r` windows before
/// the horizon.
pub fn empirical_r_diffs(ret: &ReturnSet, r: usize) -> Result<EmpiricalDiffs, ReturningError> {
    if r == 0 || ret.times.len() <= r {
        return Err(ReturningError::TooFewReturns { r, found: ret.times.len() });
    }
    let gaps = ret.gaps();
    let total = gaps.len() + 1 - r;
    let windows = total.saturating_sub(r);
    let distinct: BTreeSet<RDiffTuple<u64>> = gaps.windows(r).take(windows).map(|w| RDiffTuple(w.to_vec())).collect();
    let bound = 2 * r + 1;
    Ok(EmpiricalDiffs { r, windows, holds: distinct.len() <= bound, distinct, bound })
}

/// Relation between `{1 <= s <= q : {s p / q} < N / q}` and the orbit of
/// `p' / q`, `p p' = 1 mod q`.
///
/// The set on the left equals `{s' p' mod q : 0 <= s' <= N - 1}` with the
/// residue `0` written as `q`, i.e. `q S_{p'/q}(N)` rotated by `-p'`. The
/// unrotated equality with `q S_{p'/q}(N)` is reported but is not part of
/// `holds`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub p: u64,
    pub q: u64,
    pub n: u64,
    pub r: usize,
    pub p_inverse: u64,
    pub left: Vec<u64>,
    /// `q S_{p'/q}(N)`
    pub scaled_orbit: Vec<u64>,
    pub unrotated_equal: bool,
    /// `left = {s' p' mod q : 0 <= s' < N}`, `0` written as `q`
    pub set_equal: bool,
    /// `left = scaled_orbit - p' (mod q)`
    pub rotation_equal: bool,
    /// cyclic r-differences of `left` mod `q` equal `q D_r(S_{p'/q}(N))`
    pub scaling_equal: bool,
    pub holds: bool,
}

fn mod_inverse(p: u64, q: u64) -> Option<u64> {
    let e = (p as i128).extended_gcd(&(q as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(q as i128) as u64)
}

/// Distinct cyclic r-windows of the gaps of a sorted subset of `Z / q`.
fn cyclic_windows_mod(sorted: &[u64], q: u64, r: usize) -> HashSet<Vec<u64>> {
    let n = sorted.len();
    let mut gaps: Vec<u64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(q - sorted[n - 1] + sorted[0]);
    gaps.extend_from_within(..r - 1);
    gaps.windows(r).take(n).map(|w| w.to_vec()).collect()
}

pub fn duality_check(p: u64, q: u64, n: u64, r: usize) -> Result<DualityReport, ReturningError> {
    if n == 0 || n >= q {
        return Err(ReturningError::BadLength { n, q });
    }
    if r == 0 || n <= r as u64 {
        return Err(ThreeGapError::TooFewPoints { n, r }.into());
    }
    let p_inverse = mod_inverse(p % q, q).ok_or(ReturningError::NotCoprime { p, q })?;
    let residue = |s: u64, m: u64| ((s as u128 * m as u128) % q as u128) as u64;

    let left: Vec<u64> = (1..=q).filter(|&s| residue(s, p) < n).collect();
    let mut scaled_orbit: Vec<u64> = (1..=n).map(|s| residue(s, p_inverse)).collect();
    scaled_orbit.sort_unstable();
    let mut shifted: Vec<u64> = (0..n).map(|s| residue(s, p_inverse)).map(|x| if x == 0 { q } else { x }).collect();
    shifted.sort_unstable();
    let mut rotated: Vec<u64> =
        scaled_orbit.iter().map(|&x| (x + q - p_inverse) % q).map(|x| if x == 0 { q } else { x }).collect();
    rotated.sort_unstable();

    let alpha = Rat::new(p_inverse, q).expect("q > 0");
    let orbit = orbit(&alpha, n)?;
    let expected: HashSet<Vec<u64>> = cyclic_r_diffs(&orbit, r)?
        .into_iter()
        .map(|t| t.0.iter().map(|g| (g * Rat::from(q)).numer().try_into().expect("integer gap")).collect())
        .collect();
    let scaling_equal = cyclic_windows_mod(&left, q, r) == expected;

    let set_equal = left == shifted;
    let rotation_equal = left == rotated;
    Ok(DualityReport {
        p,
        q,
        n,
        r,
        p_inverse,
        unrotated_equal: left == scaled_orbit,
        holds: set_equal && rotation_equal && scaling_equal,
        left,
        scaled_orbit,
        set_equal,
        rotation_equal,
        scaling_equal,
    })
}

/// `{T theta}` as a circle point, for reports.
pub fn position(theta: &Rat, t: u64) -> Rat {
    frac(&(theta * Rat::from(t))).into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rat {
        s.parse().unwrap()
    }

    /// Direct enumeration over `Rat`, independent of the grid kernel.
    fn brute_times(theta: &Rat, phi: &Rat, t_max: u64) -> Vec<u64> {
        (1..=t_max).filter(|&t| position(theta, t) < *phi).collect()
    }

    #[test]
    fn enumeration() {
        let ret = returning_times(&q("1/3"), &q("2/5"), 10).unwrap();
        assert_eq!(ret.times, vec![1, 3, 4, 6, 7, 9, 10]);
        assert_eq!(ret.times, brute_times(&q("1/3"), &q("2/5"), 10));
        for (t, f) in [("2/5", "3/10"), ("13/21", "1/5"), ("377/610", "9/10"), ("3/7", "3/7")] {
            let ret = returning_times(&q(t), &q(f), 500).unwrap();
            assert_eq!(ret.times, brute_times(&q(t), &q(f), 500), "{t} {f}");
        }
        assert_eq!(returning_times(&q("3/7"), &q("3/7"), 7).unwrap().boundary_hits, 1);
    }

    #[test]
    fn enumeration_limits() {
        let ret = returning_times(&q("2/7"), &q("999/1000"), 70).unwrap();
        let misses: Vec<u64> = (1..=70).filter(|t| !ret.times.contains(t)).collect();
        assert!(misses.is_empty());
        let ret = returning_times(&q("5/11"), &q("1/3"), 1000).unwrap();
        let set: HashSet<u64> = ret.times.iter().copied().collect();
        assert!(ret.times.iter().filter(|&&t| t + 11 <= 1000).all(|t| set.contains(&(t + 11))));
        assert!(matches!(returning_times(&q("1"), &q("1/2"), 5), Err(ReturningError::OutOfRange { .. })));
        assert!(matches!(returning_times(&q("1/2"), &q("1/2"), 0), Err(ReturningError::EmptyHorizon)));
    }

    #[test]
    fn slater_search() {
        let s = slater_pair(&q("2/5"), &q("3/10")).unwrap();
        // {2/5} {4/5} {1/5}: a = 3; 1 - {b 2/5} < 3/10 at b = 2
        assert_eq!((s.a, s.b), (3, 2));
        assert_eq!((s.alpha.clone(), s.beta.clone()), (q("1/5"), q("1/5")));
        assert!(s.invariants_hold);
        let s = slater_pair(&q("1/7"), &q("9/10")).unwrap();
        assert_eq!((s.a, s.b), (1, 1));
        assert!(matches!(slater_pair(&q("1/7"), &q("1/8")), Err(ReturningError::SearchBound { .. })));
    }

    #[test]
    fn d1_matches_enumeration() {
        for (t, f) in [("4181/6765", "1/5"), ("2/5", "3/10"), ("355/1131", "7/19"), ("1/7", "9/10")] {
            let ret = returning_times(&q(t), &q(f), 10_000).unwrap();
            let pair = slater_pair(&q(t), &q(f)).unwrap();
            assert!(pair.invariants_hold);
            let m = match_partition(&ret, &d1_partition(&pair));
            assert!(m.holds(), "{t} {f}: {m:?}");
            assert!(m.observed.is_subset(&m.nonempty_cells));
        }
        let ret = returning_times(&q("4181/6765"), &q("1/5"), 10_000).unwrap();
        let pair = slater_pair(&q("4181/6765"), &q("1/5")).unwrap();
        let m = match_partition(&ret, &d1_partition(&pair));
        assert_eq!(m.observed, m.nonempty_cells);
    }

    #[test]
    fn d2_cases() {
        let mut seen = HashSet::new();
        for den in [89u64, 233, 610, 1009, 4181] {
            for num in (1..den).step_by((den / 23).max(1) as usize) {
                if num.gcd(&den) != 1 {
                    continue;
                }
                for f in (5..100).step_by(7) {
                    let (theta, phi) = (Rat::new(num, den).unwrap(), Rat::new(f, 100).unwrap());
                    let Ok(pair) = slater_pair(&theta, &phi) else { continue };
                    let Ok((case, part)) = d2_partition(&pair) else { continue };
                    seen.insert(case);
                    let ret = returning_times(&theta, &phi, 5_000).unwrap();
                    let m = match_partition(&ret, &part);
                    assert!(m.holds(), "{theta} {phi} {case:?}: {m:?}");
                }
            }
        }
        assert_eq!(seen.len(), 3);
    }

    #[test]
    fn d2_labels_in_order() {
        let s = slater_pair(&q("2/5"), &q("3/10")).unwrap();
        // alpha = beta: no strict ordering
        assert_eq!(d2_case(&s), Err(NoCaseMatches));
    }

    #[test]
    fn empirical_bounds() {
        let ret = returning_times(&q("4181/6765"), &q("1/5"), 20_000).unwrap();
        for r in 1..=4 {
            let e = empirical_r_diffs(&ret, r).unwrap();
            assert!(e.holds, "r = {r}: {}", e.distinct.len());
        }
        let short = returning_times(&q("1/2"), &q("1/3"), 3).unwrap();
        assert!(matches!(empirical_r_diffs(&short, 1), Err(ReturningError::TooFewReturns { .. })));
    }

    #[test]
    fn duality_example() {
        let d = duality_check(3, 7, 3, 2).unwrap();
        assert_eq!(d.p_inverse, 5);
        assert_eq!(d.left, vec![3, 5, 7]);
        assert_eq!(d.scaled_orbit, vec![1, 3, 5]);
        assert!(!d.unrotated_equal);
        assert!(d.holds);
        let d = duality_check(1, 10, 4, 1).unwrap();
        assert_eq!(d.p_inverse, 1);
        assert!(d.holds);
        assert!(matches!(duality_check(2, 4, 3, 1), Err(ReturningError::NotCoprime { .. })));
        assert!(matches!(duality_check(2, 5, 5, 1), Err(ReturningError::BadLength { .. })));
    }

    #[test]
    fn duality_exhaustive_small() {
        for qq in 2..40u64 {
            for p in 1..qq {
                if p.gcd(&qq) != 1 {
                    continue;
                }
                for n in 2..qq {
                    let d = duality_check(p, qq, n, 1).unwrap();
                    assert!(d.holds, "{p}/{qq} N={n}");
                }
            }
        }
    }
}
