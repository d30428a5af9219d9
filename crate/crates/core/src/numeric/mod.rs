//! Exact rational arithmetic and the circle `R/Z` represented as `[0, 1)`.
//!
//! Everything downstream compares values exactly; floats appear only in
//! human-facing report fields.

mod alpha;
mod bracket;
mod cf;
mod rat;

pub use alpha::{resolve_alpha, AlphaSpec};
pub use bracket::{certify, e_bracket, nth_root_bracket, Bracket, INITIAL_BITS, MAX_BITS};
pub use cf::{continued_fraction, convergents, Convergent};
pub use rat::{gcd_u64, Rat};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse `{0}` as a rational")]
    Parse(String),
    #[error("malformed alpha spec `{0}`: expected p/q, cf:[a0,a1,...] or dec:VALUE:DIGITS")]
    AlphaSpec(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("degenerate alpha {alpha}: orbit point for n = {repeat} repeats an earlier one")]
    Degenerate { alpha: Rat, repeat: u64 },
    #[error("certified comparison undecided after {bits} bits")]
    Undecided { bits: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A point of `R/Z`, stored as its representative in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CirclePoint(Rat);

impl CirclePoint {
    pub fn value(&self) -> &Rat {
        &self.0
    }

    pub fn into_inner(self) -> Rat {
        self.0
    }

    /// Forward arc length from `self` to `other`, in `[0, 1)`.
    pub fn distance_to(&self, other: &CirclePoint) -> Rat {
        frac(&(other.value() - self.value())).into_inner()
    }
}

/// Fractional part `x - floor(x)`.
pub fn frac(x: &Rat) -> CirclePoint {
    CirclePoint(x - Rat::from_integer(x.floor()))
}
