//! Workbench for distinct consecutive r-differences.
//!
//! The crate builds and checks the objects around sumset lower bounds for
//! sets with distinct consecutive r-differences:
//!
//! * [`sets`]: sumsets, r-difference extraction and distinctness predicates,
//!   including the `F_p` ordering;
//! * [`debruijn`]: repetition-free de Bruijn-style sequences from Eulerian
//!   circuits;
//! * [`sidon`] and [`extremal`]: the sharp constructions;
//! * [`threegap`]: the generalized three-gap structure of `{n alpha}`;
//! * [`returning`]: returning times of a circle rotation to `[0, phi)`;
//! * [`bounds`]: exact or bracket-certified checks of the inequalities;
//! * [`sweep`]: seeded randomized trial suites shared by the CLI and tests.
//!
//! All arithmetic is exact. Irrational rotation numbers enter only through
//! [`numeric::resolve_alpha`], which picks a certified rational convergent.

pub mod bounds;
pub mod debruijn;
pub mod extremal;
pub mod numeric;
pub mod returning;
pub mod sets;
pub mod sidon;
pub mod sweep;
pub mod threegap;

pub use numeric::{frac, AlphaSpec, Bracket, CirclePoint, Rat};
pub use sets::{RDiffTuple, SortedSet};
