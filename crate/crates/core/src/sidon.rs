//! Integer Sidon sets.

use std::collections::{HashMap, HashSet};

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SidonError {
    #[error("not a Sidon set: {} + {} = {} + {}", .0.a, .0.b, .0.c, .0.d)]
    NotSidon(SumCollision),
    #[error("elements must be strictly increasing positive integers")]
    NotIncreasing,
}

/// Witness `a + b = c + d` with `{a, b} != {c, d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SumCollision {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

/// Strictly increasing positive integers with pairwise distinct sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidonSet(Vec<i64>);

impl SidonSet {
    pub fn new(elements: Vec<i64>) -> Result<Self, SidonError> {
        if elements.first().is_some_and(|&x| x < 1) || elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SidonError::NotIncreasing);
        }
        is_sidon(&elements).map_err(SidonError::NotSidon)?;
        Ok(SidonSet(elements))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<i64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.0.last().copied()
    }
}

impl Serialize for SidonSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

/// Checks that all sums `a + b` (`a <= b`) are distinct. Returns the first
/// collision found scanning pairs in lexicographic order.
pub fn is_sidon(set: &[i64]) -> Result<(), SumCollision> {
    let mut elems = set.to_vec();
    elems.sort_unstable();
    elems.dedup();
    let mut sums: HashMap<i64, (i64, i64)> = HashMap::new();
    for (i, &x) in elems.iter().enumerate() {
        for &y in &elems[i..] {
            if let Some(&(c, d)) = sums.get(&(x + y)) {
                return Err(SumCollision { a: c, b: d, c: x, d: y });
            }
            sums.insert(x + y, (x, y));
        }
    }
    Ok(())
}

/// First `n` terms of the greedy (Mian-Chowla) Sidon sequence
/// `1, 2, 4, 8, 13, 21, 31, 45, ...`.
pub fn mian_chowla(n: usize) -> SidonSet {
    let mut terms: Vec<i64> = Vec::with_capacity(n);
    // Sidon iff all positive differences are distinct.
    let mut diffs: HashSet<i64> = HashSet::new();
    let mut candidate = 1i64;
    while terms.len() < n {
        let fresh: Vec<i64> = terms.iter().map(|&t| candidate - t).collect();
        // fresh differences are distinct among themselves automatically
        if fresh.iter().all(|d| !diffs.contains(d)) {
            diffs.extend(fresh);
            terms.push(candidate);
        }
        candidate += 1;
    }
    SidonSet(terms)
}
