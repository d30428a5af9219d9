//! Orbits `S_alpha(N) = {{n alpha} : 1 <= n <= N}` and their consecutive
//! r-differences.
//!
//! For rational `alpha = p/q` every orbit point is `(n p mod q) / q`, so the
//! orbit is stored as integer residues and every gap as an integer numerator
//! over `q`. Gaps are cyclic: the gap after the largest point wraps to the
//! smallest one and is taken mod 1, so the `N` gaps sum to exactly 1.
//!
//! The neighbor frame lists the `r` orbit points on each side of `{alpha}`.
//! Left labels are stored in increasing position order, so `left[0]` is the
//! farthest from `{alpha}`; right labels are stored nearest first.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::numeric::{frac, CirclePoint, NumericError, Rat};
use crate::sets::RDiffTuple;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThreeGapError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("N must be positive")]
    EmptyOrbit,
    #[error("denominator of alpha does not fit in 64 bits")]
    DenominatorTooLarge,
    #[error("orbit points for n = {first} and n = {second} coincide")]
    DuplicatePoint { first: u64, second: u64 },
    #[error("need N > r, got N = {n}, r = {r}")]
    TooFewPoints { n: u64, r: usize },
    #[error("insufficient N: {{alpha}} has {below} orbit points below and {above} above it in [0, 1), need {r} on each side")]
    InsufficientN { r: usize, below: usize, above: usize },
    #[error("breakpoint candidates collide at label {label}")]
    BreakpointCollision { label: u64 },
    #[error("shift list has {lambdas} entries but {ns} orbit lengths")]
    ShiftMismatch { lambdas: usize, ns: usize },
}

/// `S_alpha(N)` sorted in `[0, 1)` with the label `n` of each point.
#[derive(Clone, Debug)]
pub struct LabeledOrbit {
    alpha: Rat,
    p: u64,
    q: u64,
    /// sorted residues `n p mod q`
    residues: Vec<u64>,
    /// label of the point at each sorted position
    labels: Vec<u64>,
    /// sorted position of label `n`, at index `n - 1`
    positions: Vec<usize>,
}

pub fn orbit(alpha: &Rat, n: u64) -> Result<LabeledOrbit, ThreeGapError> {
    if n == 0 {
        return Err(ThreeGapError::EmptyOrbit);
    }
    let reduced = frac(alpha).into_inner();
    let (p, q) = reduced.to_u64_parts().ok_or(ThreeGapError::DenominatorTooLarge)?;
    let mut pts: Vec<(u64, u64)> = (1..=n).map(|k| (((k as u128 * p as u128) % q as u128) as u64, k)).collect();
    pts.sort_unstable();
    if let Some(w) = pts.windows(2).find(|w| w[0].0 == w[1].0) {
        let (first, second) = (w[0].1.min(w[1].1), w[0].1.max(w[1].1));
        return Err(ThreeGapError::DuplicatePoint { first, second });
    }
    let mut positions = vec![0usize; n as usize];
    for (i, &(_, k)) in pts.iter().enumerate() {
        positions[k as usize - 1] = i;
    }
    let (residues, labels) = pts.into_iter().unzip();
    Ok(LabeledOrbit { alpha: alpha.clone(), p, q, residues, labels, positions })
}

impl LabeledOrbit {
    pub fn alpha(&self) -> &Rat {
        &self.alpha
    }

    /// `N`
    pub fn n(&self) -> u64 {
        self.labels.len() as u64
    }

    /// Denominator `q` of `{alpha} = p/q`; gaps are multiples of `1/q`.
    pub fn denominator(&self) -> u64 {
        self.q
    }

    /// Numerator `p` of `{alpha} = p/q`.
    pub fn numerator(&self) -> u64 {
        self.p
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn label_at(&self, pos: usize) -> u64 {
        self.labels[pos]
    }

    pub fn position_of(&self, label: u64) -> usize {
        self.positions[label as usize - 1]
    }

    pub fn point(&self, pos: usize) -> CirclePoint {
        frac(&Rat::new(self.residues[pos], self.q).expect("q > 0"))
    }

    /// `(point, label)` pairs in increasing point order.
    pub fn points(&self) -> Vec<(CirclePoint, u64)> {
        (0..self.labels.len()).map(|i| (self.point(i), self.labels[i])).collect()
    }

    /// Numerator of the cyclic gap from position `pos` to the next point.
    pub fn gap_numer(&self, pos: usize) -> u64 {
        let n = self.residues.len();
        if pos + 1 < n {
            self.residues[pos + 1] - self.residues[pos]
        } else {
            self.q - self.residues[pos] + self.residues[0]
        }
    }

    /// All `N` cyclic gap numerators in position order.
    pub fn gap_numers(&self) -> Vec<u64> {
        (0..self.residues.len()).map(|i| self.gap_numer(i)).collect()
    }

    /// Numerators of `d_r` starting at sorted position `pos`.
    pub fn r_diff_numers_at(&self, pos: usize, r: usize) -> Vec<u64> {
        let n = self.residues.len();
        (0..r).map(|j| self.gap_numer((pos + j) % n)).collect()
    }

    fn to_tuple(&self, numers: &[u64]) -> RDiffTuple<Rat> {
        RDiffTuple(numers.iter().map(|&g| Rat::new(g, self.q).expect("q > 0")).collect())
    }

    /// `d_r({n alpha})`: the `r` gaps following the point with label `n`,
    /// continued cyclically.
    pub fn d_r(&self, label: u64, r: usize) -> RDiffTuple<Rat> {
        self.to_tuple(&self.r_diff_numers_at(self.position_of(label), r))
    }
}

fn check_order(orbit: &LabeledOrbit, r: usize) -> Result<(), ThreeGapError> {
    if r == 0 || orbit.n() <= r as u64 {
        return Err(ThreeGapError::TooFewPoints { n: orbit.n(), r });
    }
    Ok(())
}

/// Number of distinct cyclic r-difference tuples.
pub fn count_cyclic_r_diffs(orbit: &LabeledOrbit, r: usize) -> Result<usize, ThreeGapError> {
    check_order(orbit, r)?;
    let mut gaps = orbit.gap_numers();
    gaps.extend_from_within(..r - 1);
    let n = orbit.labels.len();
    Ok(gaps.windows(r).take(n).collect::<HashSet<_>>().len())
}

/// Cyclic `D_r(S_alpha(N))`: the distinct tuples among the `N` windows.
pub fn cyclic_r_diffs(orbit: &LabeledOrbit, r: usize) -> Result<BTreeSet<RDiffTuple<Rat>>, ThreeGapError> {
    check_order(orbit, r)?;
    let mut gaps = orbit.gap_numers();
    gaps.extend_from_within(..r - 1);
    let n = orbit.labels.len();
    let raw: BTreeSet<&[u64]> = gaps.windows(r).take(n).collect();
    Ok(raw.into_iter().map(|w| orbit.to_tuple(w)).collect())
}

/// Labels of the `r` orbit points on each side of `{alpha}` in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborFrame {
    /// increasing position order; `left[r - 1]` is adjacent to `{alpha}`
    pub left: Vec<u64>,
    /// increasing position order; `right[0]` is adjacent to `{alpha}`
    pub right: Vec<u64>,
}

pub fn neighbor_frame(orbit: &LabeledOrbit, r: usize) -> Result<NeighborFrame, ThreeGapError> {
    check_order(orbit, r)?;
    let pos = orbit.position_of(1);
    let (below, above) = (pos, orbit.labels.len() - 1 - pos);
    if below < r || above < r {
        return Err(ThreeGapError::InsufficientN { r, below, above });
    }
    Ok(NeighborFrame { left: orbit.labels[pos - r..pos].to_vec(), right: orbit.labels[pos + 1..=pos + r].to_vec() })
}

/// Sorted breakpoints `1 = p_0 < ... < p_{2r}` with `d_r({p_i alpha})`;
/// `d_r({n alpha}) = d_r({p_i alpha})` for `p_i <= n < p_{i+1}`.
#[derive(Clone, Debug, Serialize)]
pub struct BreakpointTable {
    pub n: u64,
    pub r: usize,
    pub frame: NeighborFrame,
    pub breakpoints: Vec<u64>,
    pub tuples: Vec<RDiffTuple<Rat>>,
    #[serde(skip)]
    numers: Vec<Vec<u64>>,
}

impl BreakpointTable {
    /// Index `i` of the interval `[p_i, p_{i+1})` containing `n`.
    pub fn interval_index(&self, n: u64) -> Option<usize> {
        if n == 0 || n > self.n {
            return None;
        }
        Some(self.breakpoints.partition_point(|&p| p <= n) - 1)
    }

    pub fn lookup(&self, n: u64) -> Option<&RDiffTuple<Rat>> {
        self.interval_index(n).map(|i| &self.tuples[i])
    }

    /// Closed label intervals `[p_i, p_{i+1} - 1]`, the last ending at `N`.
    pub fn intervals(&self) -> Vec<(u64, u64)> {
        let mut ends: Vec<u64> = self.breakpoints[1..].iter().map(|&p| p - 1).collect();
        ends.push(self.n);
        self.breakpoints.iter().copied().zip(ends).collect()
    }

    /// Number of distinct tuples among the `2r + 1` table entries.
    pub fn distinct_tuples(&self) -> usize {
        self.numers.iter().collect::<HashSet<_>>().len()
    }
}

pub fn breakpoint_table(orbit: &LabeledOrbit, r: usize) -> Result<BreakpointTable, ThreeGapError> {
    let frame = neighbor_frame(orbit, r)?;
    let n = orbit.n();
    let mut candidates: Vec<u64> = std::iter::once(1).chain(frame.left.iter().copied()).collect();
    candidates.extend(frame.right.iter().map(|&rl| n + 2 - rl));
    let mut breakpoints = candidates.clone();
    breakpoints.sort_unstable();
    if let Some(w) = breakpoints.windows(2).find(|w| w[0] == w[1]) {
        return Err(ThreeGapError::BreakpointCollision { label: w[0] });
    }
    let numers: Vec<Vec<u64>> = breakpoints.iter().map(|&b| orbit.r_diff_numers_at(orbit.position_of(b), r)).collect();
    let tuples = numers.iter().map(|w| orbit.to_tuple(w)).collect();
    Ok(BreakpointTable { n, r, frame, breakpoints, tuples, numers })
}

/// Outcome of comparing the table lookup with direct extraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Soundness {
    pub checked: u64,
    pub holds: bool,
    /// first label where the lookup disagrees
    pub mismatch: Option<u64>,
}

/// Compares `lookup(n)` with `d_r({n alpha})` for every `1 <= n <= N - r`.
pub fn breakpoint_soundness(orbit: &LabeledOrbit, table: &BreakpointTable) -> Soundness {
    let last = orbit.n().saturating_sub(table.r as u64);
    let mismatch = (1..=last).find(|&n| {
        let i = table.interval_index(n).expect("1 <= n <= N");
        orbit.r_diff_numers_at(orbit.position_of(n), table.r) != table.numers[i]
    });
    Soundness { checked: last, holds: mismatch.is_none(), mismatch }
}

/// Witness that the label sequence read backwards is not a rotation of its
/// image under `n -> N + 1 - n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReversalWitness {
    /// offset into the reversed image sequence
    pub offset: usize,
    pub expected: u64,
    pub found: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReversalReport {
    pub n: u64,
    pub exhaustive: bool,
    pub holds: bool,
    pub witness: Option<ReversalWitness>,
}

/// Checks that `n -> N + 1 - n` reverses the cyclic order of the orbit:
/// consecutive points `n_1, ..., n_k` map to consecutive points
/// `N + 1 - n_k, ..., N + 1 - n_1`. All `N` positions are compared.
pub fn reversal_check(orbit: &LabeledOrbit) -> ReversalReport {
    let n = orbit.n();
    let labels = &orbit.labels;
    let len = labels.len();
    let image: Vec<u64> = labels.iter().rev().map(|&l| n + 1 - l).collect();
    let start = orbit.position_of(image[0]);
    let witness = (0..len).find_map(|i| {
        let expected = labels[(start + i) % len];
        (image[i] != expected).then_some(ReversalWitness { offset: i, expected, found: image[i] })
    });
    ReversalReport { n, exhaustive: true, holds: witness.is_none(), witness }
}

/// Union of shifted orbits `{{n alpha + lambda_j} : 1 <= n <= N_j}`.
#[derive(Clone, Debug, Serialize)]
pub struct MultishiftOrbit {
    pub alpha: Rat,
    pub lambdas: Vec<Rat>,
    pub ns: Vec<u64>,
    pub points: Vec<Rat>,
}

pub fn multishift_orbit(alpha: &Rat, lambdas: &[Rat], ns: &[u64]) -> Result<MultishiftOrbit, ThreeGapError> {
    if lambdas.len() != ns.len() {
        return Err(ThreeGapError::ShiftMismatch { lambdas: lambdas.len(), ns: ns.len() });
    }
    let mut tagged: Vec<(Rat, u64)> = Vec::new();
    for (lambda, &nj) in lambdas.iter().zip(ns) {
        for k in 1..=nj {
            tagged.push((frac(&(alpha * Rat::from(k) + lambda)).into_inner(), k));
        }
    }
    if tagged.is_empty() {
        return Err(ThreeGapError::EmptyOrbit);
    }
    tagged.sort();
    if let Some(w) = tagged.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(ThreeGapError::DuplicatePoint { first: w[0].1, second: w[1].1 });
    }
    Ok(MultishiftOrbit {
        alpha: alpha.clone(),
        lambdas: lambdas.to_vec(),
        ns: ns.to_vec(),
        points: tagged.into_iter().map(|(x, _)| x).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultishiftReport {
    pub k: usize,
    pub r: usize,
    pub distinct: usize,
    /// `(2r + 1) k`
    pub bound: usize,
    pub holds: bool,
}

impl MultishiftOrbit {
    /// Cyclic gaps mod 1, in point order.
    pub fn cyclic_gaps(&self) -> Vec<Rat> {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let next = &self.points[(i + 1) % n];
                let g = next - &self.points[i];
                if i + 1 < n {
                    g
                } else {
                    g + Rat::one()
                }
            })
            .collect()
    }

    /// Cyclic `D_r` of the union.
    pub fn cyclic_r_diffs(&self, r: usize) -> Result<BTreeSet<RDiffTuple<Rat>>, ThreeGapError> {
        let n = self.points.len();
        if r == 0 || n <= r {
            return Err(ThreeGapError::TooFewPoints { n: n as u64, r });
        }
        let mut gaps = self.cyclic_gaps();
        gaps.extend_from_within(..r - 1);
        Ok(gaps.windows(r).take(n).map(|w| RDiffTuple(w.to_vec())).collect())
    }

    pub fn check(&self, r: usize) -> Result<MultishiftReport, ThreeGapError> {
        let distinct = self.cyclic_r_diffs(r)?.len();
        let k = self.lambdas.len();
        let bound = (2 * r + 1) * k;
        Ok(MultishiftReport { k, r, distinct, bound, holds: distinct <= bound })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{resolve_alpha, AlphaSpec};

    fn q(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn log10_2(n: u64) -> Rat {
        resolve_alpha(&"dec:0.301029995663981:15".parse::<AlphaSpec>().unwrap(), n).unwrap()
    }

    /// Direct orbit oracle over `Rat`, independent of the residue kernel.
    fn sorted_points(alpha: &Rat, n: u64) -> Vec<(Rat, u64)> {
        let mut v: Vec<(Rat, u64)> = (1..=n).map(|k| (frac(&(alpha * Rat::from(k))).into_inner(), k)).collect();
        v.sort();
        v
    }

    #[test]
    fn small_orbits() {
        let o = orbit(&q("5/8"), 5).unwrap();
        assert_eq!(o.labels(), &[5, 2, 4, 1, 3]);
        let pts: Vec<Rat> = o.points().into_iter().map(|(p, _)| p.into_inner()).collect();
        assert_eq!(pts, ["1/8", "1/4", "1/2", "5/8", "7/8"].map(q).to_vec());
        let o = orbit(&q("1/2"), 1).unwrap();
        assert_eq!(o.points(), vec![(frac(&q("1/2")), 1)]);
        let o = orbit(&q("1/3"), 2).unwrap();
        assert_eq!(o.labels(), &[1, 2]);
    }

    #[test]
    fn orbit_matches_oracle() {
        for (a, n) in [("13/21", 20), ("7/3", 2), ("146/485", 100), ("-2/7", 6)] {
            let o = orbit(&q(a), n).unwrap();
            let oracle = sorted_points(&q(a), n);
            let got: Vec<(Rat, u64)> = o.points().into_iter().map(|(p, l)| (p.into_inner(), l)).collect();
            assert_eq!(got, oracle, "{a}");
        }
    }

    #[test]
    fn orbit_errors() {
        assert_eq!(orbit(&q("1/3"), 0).unwrap_err(), ThreeGapError::EmptyOrbit);
        assert_eq!(orbit(&q("1/3"), 4).unwrap_err(), ThreeGapError::DuplicatePoint { first: 1, second: 4 });
        assert!(orbit(&q("1/3"), 3).is_ok());
    }

    #[test]
    fn gap_closure() {
        let o = orbit(&q("146/485"), 100).unwrap();
        let gaps = o.gap_numers();
        assert_eq!(gaps.iter().sum::<u64>(), o.denominator());
        let linear: u64 = gaps[..gaps.len() - 1].iter().sum();
        assert_eq!(linear, o.residues()[99] - o.residues()[0]);
    }

    #[test]
    fn steinhaus_small() {
        let o = orbit(&q("5/8"), 5).unwrap();
        let d1 = cyclic_r_diffs(&o, 1).unwrap();
        let expect: BTreeSet<RDiffTuple<Rat>> = [RDiffTuple(vec![q("1/8")]), RDiffTuple(vec![q("1/4")])].into();
        assert_eq!(d1, expect);
        assert_eq!(count_cyclic_r_diffs(&o, 1).unwrap(), 2);
        assert_eq!(cyclic_r_diffs(&o, 5).unwrap_err(), ThreeGapError::TooFewPoints { n: 5, r: 5 });
    }

    #[test]
    fn golden_convergent_bound() {
        let o = orbit(&q("4181/6765"), 20).unwrap();
        for r in 1..=5 {
            let d = cyclic_r_diffs(&o, r).unwrap();
            assert!(d.len() <= 2 * r + 1);
            assert_eq!(d.len(), count_cyclic_r_diffs(&o, r).unwrap());
        }
    }

    #[test]
    fn frames() {
        let o = orbit(&log10_2(100), 100).unwrap();
        let f = neighbor_frame(&o, 3).unwrap();
        assert_eq!(f.left, vec![74, 84, 94]);
        assert_eq!(f.right, vec![11, 21, 31]);

        let o = orbit(&q("5/8"), 5).unwrap();
        let f = neighbor_frame(&o, 1).unwrap();
        assert_eq!((f.left.clone(), f.right.clone()), (vec![4], vec![3]));
        assert_eq!(neighbor_frame(&o, 2).unwrap_err(), ThreeGapError::InsufficientN { r: 2, below: 3, above: 1 });
    }

    #[test]
    fn log10_2_table() {
        let o = orbit(&log10_2(100), 100).unwrap();
        let t = breakpoint_table(&o, 3).unwrap();
        assert_eq!(t.breakpoints, vec![1, 71, 74, 81, 84, 91, 94]);
        assert_eq!(t.intervals(), vec![(1, 70), (71, 73), (74, 80), (81, 83), (84, 90), (91, 93), (94, 100)]);
        assert_eq!(t.distinct_tuples(), 7);
        assert!(breakpoint_soundness(&o, &t).holds);
        assert_eq!(t.lookup(0), None);
        assert_eq!(t.lookup(72), Some(&t.tuples[1]));
    }

    #[test]
    fn golden_r1_table() {
        let o = orbit(&q("4181/6765"), 10).unwrap();
        let t = breakpoint_table(&o, 1).unwrap();
        assert_eq!(t.breakpoints.len(), 3);
        for n in 1..=10 {
            assert_eq!(t.lookup(n), Some(&o.d_r(n, 1)), "n = {n}");
        }
    }

    #[test]
    fn reversal() {
        let o = orbit(&q("5/8"), 5).unwrap();
        assert!(reversal_check(&o).holds);
        assert!(reversal_check(&orbit(&q("1/2"), 1).unwrap()).holds);
        for n in [2, 50, 499] {
            assert!(reversal_check(&orbit(&q("233/500"), n).unwrap()).holds);
        }
    }

    #[test]
    fn multishift() {
        let a = q("4181/6765");
        let single = multishift_orbit(&a, &[Rat::zero()], &[20]).unwrap();
        let o = orbit(&a, 20).unwrap();
        assert_eq!(single.cyclic_r_diffs(2).unwrap(), cyclic_r_diffs(&o, 2).unwrap());
        let two = multishift_orbit(&a, &[Rat::zero(), q("1/2")], &[20, 20]).unwrap();
        let rep = two.check(1).unwrap();
        assert!(rep.holds && rep.bound == 6);
        assert!(two.check(2).unwrap().distinct <= 10);
        assert!(matches!(
            multishift_orbit(&q("1/4"), &[Rat::zero(), q("1/4")], &[2, 1]),
            Err(ThreeGapError::DuplicatePoint { .. })
        ));
        assert_eq!(two.cyclic_gaps().into_iter().sum::<Rat>(), Rat::one());
    }
}
