//! Seeded randomized trial suites.
//!
//! Trial `i` of a sweep draws every input from a ChaCha8 generator seeded
//! with the sweep seed and switched to stream `i`. A trial can therefore be
//! replayed alone, and the report is independent of how trials are
//! scheduled across workers. Failing trials carry their full inputs.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bounds::{dcd2_check, dcd_counting_check, fp_check, main2_check, main2_ratio, multidim_check, DcdCheck};
use crate::debruijn::{verify_sequence, window_sequence};
use crate::extremal::sharp_pair;
use crate::numeric::{certify, resolve_alpha, AlphaSpec, Rat};
use crate::returning::{
    d1_partition, d2_partition, duality_check, empirical_r_diffs, match_partition, returning_times, slater_pair,
    ReturningError,
};
use crate::sets::{
    count_distinct_r_diffs, has_distinct_consecutive_r_diffs, has_distinct_dtuples, is_prime, SortedSet,
};
use crate::sidon::mian_chowla;
use crate::threegap::{
    breakpoint_soundness, breakpoint_table, count_cyclic_r_diffs, multishift_orbit, orbit, reversal_check,
    ThreeGapError,
};

pub const REPORT_SCHEMA: &str = "gapforge.report/1";

/// Environment variable capping the number of sweep workers.
pub const THREADS_ENV: &str = "GAPFORGE_THREADS";

/// Attempts at drawing an input that meets a suite's preconditions before
/// the trial is recorded as skipped.
const ATTEMPTS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Dcd,
    Main2,
    Dcd2,
    Fp,
    Multidim,
    Steinhaus,
    Breakpoint,
    Reversal,
    Multishift,
    Returning,
    Duality,
    Debruijn,
    Sharpness,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Dcd,
        Suite::Main2,
        Suite::Dcd2,
        Suite::Fp,
        Suite::Multidim,
        Suite::Steinhaus,
        Suite::Breakpoint,
        Suite::Reversal,
        Suite::Multishift,
        Suite::Returning,
        Suite::Duality,
        Suite::Debruijn,
        Suite::Sharpness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Dcd => "dcd",
            Suite::Main2 => "main2",
            Suite::Dcd2 => "dcd2",
            Suite::Fp => "fp",
            Suite::Multidim => "multidim",
            Suite::Steinhaus => "steinhaus",
            Suite::Breakpoint => "breakpoint",
            Suite::Reversal => "reversal",
            Suite::Multishift => "multishift",
            Suite::Returning => "returning",
            Suite::Duality => "duality",
            Suite::Debruijn => "debruijn",
            Suite::Sharpness => "sharpness",
        }
    }

    /// Size caps used when none are given explicitly.
    pub fn default_caps(self) -> Caps {
        let base = Caps { k: 200, l: 50, n: 2000, t_max: 100_000, r: 3, d: 2, q: 1000 };
        match self {
            Suite::Dcd | Suite::Main2 => base,
            Suite::Dcd2 => Caps { l: 200, ..base },
            Suite::Fp => Caps { k: 40, l: 20, q: 101, ..base },
            Suite::Multidim => Caps { k: 30, l: 20, r: 2, ..base },
            Suite::Steinhaus => Caps { n: 3000, r: 5, ..base },
            Suite::Breakpoint => Caps { r: 4, ..base },
            Suite::Reversal => base,
            Suite::Multishift => Caps { n: 200, d: 3, ..base },
            Suite::Returning => Caps { r: 4, q: 10_000, ..base },
            Suite::Duality => base,
            Suite::Debruijn => Caps { k: 10_000, r: 4, d: 6, ..base },
            Suite::Sharpness => Caps { k: 10_000, d: 10, ..base },
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| SweepError::UnknownSuite(s.to_string()))
    }
}

/// Size caps. Each suite reads the fields it needs:
///
/// * `k`: `|A|` (dcd, main2, fp, multidim), sequence length (debruijn,
///   sharpness);
/// * `l`: `|B|`;
/// * `n`: orbit length `N`;
/// * `t_max`: returning-time horizon;
/// * `r`: largest order;
/// * `d`: dimension (multidim), shift count (multishift), alphabet size
///   (debruijn), Sidon set size (sharpness);
/// * `q`: denominator bound (returning, duality), prime modulus (fp).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub k: usize,
    pub l: usize,
    pub n: u64,
    pub t_max: u64,
    pub r: usize,
    pub d: usize,
    pub q: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub suite: Suite,
    pub trials: u64,
    pub seed: u64,
    pub caps: Caps,
}

impl SweepConfig {
    pub fn new(suite: Suite, trials: u64, seed: u64) -> Self {
        SweepConfig { suite, trials, seed, caps: suite.default_caps() }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: &str| Err(SweepError::InvalidConfig(m.to_string()));
        let c = &self.caps;
        if self.trials == 0 {
            return bad("trial count must be at least 1");
        }
        if c.k == 0 || c.l == 0 || c.n == 0 || c.t_max == 0 || c.r == 0 || c.d == 0 || c.q == 0 {
            return bad("caps must be positive");
        }
        match self.suite {
            Suite::Fp if !is_prime(c.q) => bad("fp modulus must be prime"),
            Suite::Steinhaus | Suite::Breakpoint | Suite::Multishift if c.n <= 2 * c.r as u64 + 1 => {
                bad("N cap must exceed 2r + 1")
            }
            Suite::Duality | Suite::Returning if c.q < c.r as u64 + 3 => bad("q cap must exceed r + 2"),
            Suite::Debruijn | Suite::Sharpness if c.d < 2 => bad("alphabet cap must be at least 2"),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub status: Status,
    pub metrics: Value,
    /// full inputs, present for failures
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: String,
    pub suite: Suite,
    pub seed: u64,
    pub trials: u64,
    pub caps: Caps,
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
    /// `min_*`/`max_*` of numeric metrics and `count_*` of true flags, over
    /// passing trials
    pub summary: BTreeMap<String, Value>,
    pub records: Vec<TrialRecord>,
}

impl SweepReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(|t| t.status == Status::Fail)
    }

    /// Summary entry as a float, if present and numeric.
    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Value::as_f64)
    }
}

/// Generator for trial `index` of a sweep seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Worker count: `GAPFORGE_THREADS` if set to a positive integer, else the
/// number of available cores.
pub fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport, SweepError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| SweepError::InvalidConfig(e.to_string()))?;
    let records: Vec<TrialRecord> =
        pool.install(|| (0..config.trials).into_par_iter().map(|i| run_trial(config, i)).collect());
    let count = |s: Status| records.iter().filter(|t| t.status == s).count() as u64;
    Ok(SweepReport {
        schema: REPORT_SCHEMA.to_string(),
        suite: config.suite,
        seed: config.seed,
        trials: config.trials,
        caps: config.caps,
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skip),
        summary: summarize(&records),
        records,
    })
}

/// Runs trial `index` alone; identical to the record inside a full sweep.
pub fn run_trial(config: &SweepConfig, index: u64) -> TrialRecord {
    let mut rng = trial_rng(config.seed, index);
    let c = &config.caps;
    let outcome = match config.suite {
        Suite::Dcd => dcd_trial(&mut rng, c),
        Suite::Main2 => main2_trial(&mut rng, c),
        Suite::Dcd2 => dcd2_trial(&mut rng, c),
        Suite::Fp => fp_trial(&mut rng, c),
        Suite::Multidim => multidim_trial(&mut rng, c),
        Suite::Steinhaus => steinhaus_trial(&mut rng, c),
        Suite::Breakpoint => breakpoint_trial(&mut rng, c),
        Suite::Reversal => reversal_trial(&mut rng, c),
        Suite::Multishift => multishift_trial(&mut rng, c),
        Suite::Returning => returning_trial(&mut rng, c),
        Suite::Duality => duality_trial(&mut rng, c),
        Suite::Debruijn => debruijn_trial(&mut rng, c),
        Suite::Sharpness => sharpness_trial(&mut rng, c),
    };
    let Outcome { status, input, metrics, note } = outcome;
    TrialRecord { index, status, metrics, witness: (status == Status::Fail).then_some(input), note }
}

fn summarize(records: &[TrialRecord]) -> BTreeMap<String, Value> {
    let mut lo: BTreeMap<String, f64> = BTreeMap::new();
    let mut hi: BTreeMap<String, f64> = BTreeMap::new();
    let mut flags: BTreeMap<String, u64> = BTreeMap::new();
    for t in records.iter().filter(|t| t.status == Status::Pass) {
        let Some(fields) = t.metrics.as_object() else { continue };
        for (key, v) in fields {
            if let Some(x) = v.as_f64() {
                lo.entry(key.clone()).and_modify(|m| *m = m.min(x)).or_insert(x);
                hi.entry(key.clone()).and_modify(|m| *m = m.max(x)).or_insert(x);
            } else if let Some(b) = v.as_bool() {
                *flags.entry(key.clone()).or_insert(0) += u64::from(b);
            }
        }
    }
    let mut out = BTreeMap::new();
    for (k, v) in lo {
        out.insert(format!("min_{k}"), json!(v));
    }
    for (k, v) in hi {
        out.insert(format!("max_{k}"), json!(v));
    }
    for (k, v) in flags {
        out.insert(format!("count_{k}"), json!(v));
    }
    out
}

struct Outcome {
    status: Status,
    input: Value,
    metrics: Value,
    note: Option<String>,
}

impl Outcome {
    fn check(ok: bool, input: Value, metrics: Value) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Outcome { status, input, metrics, note: None }
    }

    fn skip(note: impl Into<String>) -> Self {
        Outcome { status: Status::Skip, input: Value::Null, metrics: json!({}), note: Some(note.into()) }
    }

    /// An error from a module under test on valid input is a failure.
    fn error(input: Value, err: impl fmt::Display) -> Self {
        Outcome { status: Status::Fail, input, metrics: json!({}), note: Some(format!("error: {err}")) }
    }
}

type Rng8 = ChaCha8Rng;

/// `size` distinct integers drawn uniformly from `0..span`.
fn random_set(rng: &mut Rng8, size: usize, span: usize) -> SortedSet<i64> {
    let size = size.min(span);
    SortedSet::from_unsorted(sample(rng, span, size).into_iter().map(|i| i as i64).collect())
}

/// Random `B`: an interval or a sparse random set, with equal probability.
fn random_b(rng: &mut Rng8, max_len: usize) -> SortedSet<i64> {
    let len = rng.random_range(1..=max_len);
    if rng.random_bool(0.5) {
        SortedSet::from_unsorted((0..len as i64).collect())
    } else {
        let span = rng.random_range(len..=4 * len);
        random_set(rng, len, span)
    }
}

/// Random set with distinct consecutive r-differences, grown one gap at a
/// time and rejecting gaps that repeat an r-window. Elements stay below
/// `limit` when given; the result may be shorter than `size`.
fn random_distinct_diff_set(rng: &mut Rng8, size: usize, r: usize, start: i64, limit: Option<i64>) -> SortedSet<i64> {
    let base = ((2 * size) as f64).powf(1.0 / r as f64).ceil() as i64 + 1;
    let max_gap = rng.random_range(base..=3 * base);
    let mut elems = vec![start];
    let mut gaps: Vec<i64> = Vec::new();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    'grow: while elems.len() < size {
        for _ in 0..64 {
            let g = rng.random_range(1..=max_gap);
            let next = elems[elems.len() - 1] + g;
            if limit.is_some_and(|m| next >= m) {
                continue;
            }
            if gaps.len() + 1 >= r {
                let mut window = gaps[gaps.len() + 1 - r..].to_vec();
                window.push(g);
                if !seen.insert(window) {
                    continue;
                }
            }
            gaps.push(g);
            elems.push(next);
            continue 'grow;
        }
        break;
    }
    SortedSet::from_sorted(elems).expect("increasing by construction")
}

/// Continued fraction `[0; a_1, ..., a_48]` with partial quotients in 1..=9.
fn random_cf(rng: &mut Rng8) -> AlphaSpec {
    let coeffs = std::iter::once(0).chain((0..48).map(|_| rng.random_range(1..=9))).map(Into::into).collect();
    AlphaSpec::continued_fraction(coeffs).expect("valid expansion")
}

/// Random irrational-like `alpha` resolved to a rational valid up to `n`.
fn random_alpha(rng: &mut Rng8, n: u64) -> Result<(AlphaSpec, Rat), String> {
    let spec = random_cf(rng);
    let alpha = resolve_alpha(&spec, n).map_err(|e| e.to_string())?;
    Ok((spec, alpha))
}

fn dcd_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    let r = rng.random_range(1..=c.r);
    for _ in 0..ATTEMPTS {
        let ka = rng.random_range((2 * r + 2).min(c.k)..=c.k);
        let span = rng.random_range(ka..=4 * ka);
        let a = random_set(rng, ka, span);
        if count_distinct_r_diffs(&a, r).unwrap_or(0) <= 2 * r {
            continue;
        }
        let b = random_b(rng, c.l);
        let input = json!({ "r": r, "a": a, "b": b });
        return match dcd_counting_check(&a, &b, r) {
            Ok(DcdCheck::Counting { distinct, scheme, report }) => Outcome::check(
                report.holds,
                input,
                json!({ "distinct": distinct, "t": scheme.t, "ratio": report.ratio.approx() }),
            ),
            Ok(DcdCheck::Trivial { .. }) => Outcome::error(input, "trivial branch despite |D_r(A)| > 2r"),
            Err(e) => Outcome::error(input, e),
        };
    }
    Outcome::skip("no A with |D_r(A)| > 2r drawn")
}

fn main2_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    let r = rng.random_range(1..=c.r);
    let ka = rng.random_range(1..=c.k);
    let a = random_distinct_diff_set(rng, ka, r, 0, None);
    let b = random_b(rng, c.l);
    let input = json!({ "r": r, "a": a, "b": b });
    match main2_check(&a, &b, r) {
        Ok(rep) => Outcome::check(rep.holds, input, json!({ "a_len": a.len(), "ratio": rep.ratio.approx() })),
        Err(e) => Outcome::error(input, e),
    }
}

fn dcd2_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    let r = rng.random_range(1..=c.r);
    for _ in 0..ATTEMPTS {
        let b = random_b(rng, c.l);
        let keep = rng.random_range(0.1..0.9);
        let a = SortedSet::from_unsorted(b.iter().copied().filter(|_| rng.random_bool(keep)).collect());
        if a.len() <= r {
            continue;
        }
        let input = json!({ "r": r, "a": a, "b": b });
        return match dcd2_check(&a, &b, r) {
            Ok(rep) => {
                Outcome::check(rep.holds, input, json!({ "distinct": rep.lhs.approx(), "ratio": rep.ratio.approx() }))
            }
            Err(e) => Outcome::error(input, e),
        };
    }
    Outcome::skip("no subset with more than r elements drawn")
}

fn fp_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    let p = c.q;
    let r = rng.random_range(1..=c.r);
    let ka = rng.random_range(r + 1..=c.k.max(r + 1));
    let start = rng.random_range(1..=(p as i64 / 4).max(1));
    let a = random_distinct_diff_set(rng, ka, r, start, Some(p as i64));
    let lb = rng.random_range(1..=c.l.min(p as usize));
    let b: Vec<i64> = sample(rng, p as usize, lb).into_iter().map(|i| i as i64).collect();
    let input = json!({ "p": p, "r": r, "a": a, "b": b });
    match fp_check(a.as_slice(), &b, p, r) {
        Ok(rep) => {
            let ratio = rep.bound.as_ref().map(|x| x.ratio.approx());
            Outcome::check(rep.holds(), input, json!({ "full": rep.full, "ratio": ratio }))
        }
        Err(e) => Outcome::error(input, e),
    }
}

fn multidim_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    let (d, r) = (c.d, rng.random_range(1..=c.r));
    for _ in 0..ATTEMPTS {
        let k = rng.random_range((r + 1).min(c.k)..=c.k);
        let family: Vec<SortedSet<i64>> = (0..d)
            .map(|_| {
                let span = rng.random_range(k..=4 * k);
                random_set(rng, k, span)
            })
            .collect();
        if !has_distinct_dtuples(&family, r).unwrap_or(false) {
            continue;
        }
        let bs: Vec<SortedSet<i64>> = (0..d).map(|_| random_b(rng, c.l)).collect();
        let input = json!({ "r": r, "a": family, "b": bs });
        return match multidim_check(&family, &bs, r) {
            Ok(rep) => {
                let ratio = rep.ratio.approx();
                Outcome::check(
                    ratio > 0.0,
                    input,
                    json!({ "k": k, "ratio": ratio, "trivial_branch": rep.trivial_branch }),
                )
            }
            Err(e) => Outcome::error(input, e),
        };
    }
    Outcome::skip("no family with distinct d-tuples drawn")
}

fn steinhaus_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    let r = rng.random_range(1..=c.r);
    let n = rng.random_range(r as u64 + 1..=c.n);
    let (spec, alpha) = match random_alpha(rng, n) {
        Ok(x) => x,
        Err(e) => return Outcome::skip(e),
    };
    let input = json!({ "alpha_spec": spec, "alpha": alpha, "n": n, "r": r });
    match orbit(&alpha, n).and_then(|o| count_cyclic_r_diffs(&o, r)) {
        Ok(distinct) => {
            let bound = if r == 1 { 3 } else { 2 * r + 1 };
            Outcome::check(distinct <= bound, input, json!({ "distinct": distinct, "bound": bound }))
        }
        Err(e) => Outcome::error(input, e),
    }
}

fn breakpoint_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    let r = rng.random_range(1..=c.r);
    let mut last = String::new();
    for _ in 0..ATTEMPTS {
        let n = rng.random_range(2 * r as u64 + 2..=c.n);
        let (spec, alpha) = match random_alpha(rng, n) {
            Ok(x) => x,
            Err(e) => return Outcome::skip(e),
        };
        let input = json!({ "alpha_spec": spec, "alpha": alpha, "n": n, "r": r });
        let o = match orbit(&alpha, n) {
            Ok(o) => o,
            Err(e) => return Outcome::error(input, e),
        };
        match breakpoint_table(&o, r) {
            Ok(table) => {
                let s = breakpoint_soundness(&o, &table);
                return Outcome::check(
                    s.holds,
                    input,
                    json!({ "checked": s.checked, "distinct_tuples": table.distinct_tuples(), "mismatch": s.mismatch }),
                );
            }
            Err(e @ (ThreeGapError::InsufficientN { .. } | ThreeGapError::BreakpointCollision { .. })) => {
                last = e.to_string();
            }
            Err(e) => return Outcome::error(input, e),
        }
    }
    Outcome::skip(last)
}

fn reversal_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    let n = rng.random_range(1..=c.n);
    let (spec, alpha) = match random_alpha(rng, n) {
        Ok(x) => x,
        Err(e) => return Outcome::skip(e),
    };
    let input = json!({ "alpha_spec": spec, "alpha": alpha, "n": n });
    match orbit(&alpha, n) {
        Ok(o) => {
            let rep = reversal_check(&o);
            Outcome::check(rep.holds, input, json!({ "n": n, "witness": rep.witness }))
        }
        Err(e) => Outcome::error(input, e),
    }
}

fn multishift_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    let r = rng.random_range(1..=c.r);
    let k = rng.random_range(1..=c.d);
    for _ in 0..ATTEMPTS {
        let ns: Vec<u64> = (0..k).map(|_| rng.random_range(r as u64 + 1..=c.n)).collect();
        let lambdas: Vec<Rat> = std::iter::once(Rat::zero())
            .chain((1..k).map(|_| Rat::new(rng.random_range(0..1_000_000u64), 1_000_000u64).expect("nonzero")))
            .collect();
        let (spec, alpha) = match random_alpha(rng, *ns.iter().max().expect("k >= 1")) {
            Ok(x) => x,
            Err(e) => return Outcome::skip(e),
        };
        let input = json!({ "alpha_spec": spec, "alpha": alpha, "lambdas": lambdas, "ns": ns, "r": r });
        match multishift_orbit(&alpha, &lambdas, &ns) {
            Ok(m) => {
                return match m.check(r) {
                    Ok(rep) => Outcome::check(
                        rep.holds,
                        input,
                        json!({ "k": k, "distinct": rep.distinct, "bound": rep.bound }),
                    ),
                    Err(e) => Outcome::error(input, e),
                }
            }
            Err(ThreeGapError::DuplicatePoint { .. }) => continue,
            Err(e) => return Outcome::error(input, e),
        }
    }
    Outcome::skip("every draw had colliding points")
}

fn random_coprime(rng: &mut Rng8, q: u64) -> u64 {
    loop {
        let p = rng.random_range(1..q);
        if p.gcd(&q) == 1 {
            return p;
        }
    }
}

fn returning_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    for _ in 0..ATTEMPTS {
        let q = rng.random_range(2..=c.q);
        let theta = Rat::new(random_coprime(rng, q), q).expect("q > 0");
        let phi = Rat::new(rng.random_range(1..10_000u64), 10_000u64).expect("nonzero");
        let pair = match slater_pair(&theta, &phi) {
            Ok(p) => p,
            Err(ReturningError::SearchBound { .. }) => continue,
            Err(e) => return Outcome::error(json!({ "theta": theta, "phi": phi }), e),
        };
        let input = json!({ "theta": theta, "phi": phi, "t_max": c.t_max, "r_max": c.r });
        let ret = match returning_times(&theta, &phi, c.t_max) {
            Ok(x) => x,
            Err(e) => return Outcome::error(input, e),
        };
        let d1 = match_partition(&ret, &d1_partition(&pair));
        let (case, d2) = match d2_partition(&pair) {
            Ok((case, part)) => (Some(case), Some(match_partition(&ret, &part))),
            Err(_) => (None, None),
        };
        let mut windows_ok = true;
        let mut distinct = Vec::new();
        for r in 1..=c.r {
            match empirical_r_diffs(&ret, r) {
                Ok(e) => {
                    windows_ok &= e.holds;
                    distinct.push(e.distinct.len());
                }
                Err(ReturningError::TooFewReturns { .. }) => break,
                Err(e) => return Outcome::error(input, e),
            }
        }
        let ok = pair.invariants_hold && d1.holds() && d2.as_ref().is_none_or(|m| m.holds()) && windows_ok;
        let metrics = json!({
            "a": pair.a,
            "b": pair.b,
            "slater_invariants": pair.invariants_hold,
            "d1_violations": d1.violations,
            "d1_boundary_mismatches": d1.boundary_mismatches,
            "d2_case": case,
            "d2_checked": d2.as_ref().map(|m| m.checked),
            "d2_violations": d2.as_ref().map(|m| m.violations),
            "d2_boundary_mismatches": d2.as_ref().map(|m| m.boundary_mismatches),
            "distinct_windows": distinct,
            "windows_within_bound": windows_ok,
        });
        return Outcome::check(ok, input, metrics);
    }
    Outcome::skip("every draw had phi <= 1/q")
}

fn duality_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    let r = rng.random_range(1..=c.r);
    let q = rng.random_range(r as u64 + 2..=c.q);
    let p = random_coprime(rng, q);
    let n = rng.random_range(r as u64 + 1..q);
    let input = json!({ "p": p, "q": q, "n": n, "r": r });
    match duality_check(p, q, n, r) {
        Ok(rep) => Outcome::check(
            rep.holds,
            input,
            json!({ "set_equal": rep.set_equal, "scaling_equal": rep.scaling_equal, "unrotated_equal": rep.unrotated_equal }),
        ),
        Err(e) => Outcome::error(input, e),
    }
}

fn sequence_length(m: usize, r: usize) -> Option<usize> {
    (m - 1).checked_pow(r as u32)?.checked_mul(m)
}

fn debruijn_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    for _ in 0..ATTEMPTS {
        let m = rng.random_range(2..=c.d);
        let r = rng.random_range(1..=c.r);
        let Some(k) = sequence_length(m, r).filter(|&k| k <= c.k) else { continue };
        let alphabet: Vec<i64> = sample(rng, 1000, m).into_iter().map(|i| i as i64 - 500).collect();
        let input = json!({ "alphabet": alphabet, "r": r });
        return match window_sequence(&alphabet, r) {
            Ok(seq) => {
                let rep = verify_sequence(&seq.symbols, &alphabet, r);
                Outcome::check(rep.all_pass() && seq.len() == k, input, json!({ "m": m, "r": r, "length": seq.len() }))
            }
            Err(e) => Outcome::error(input, e),
        };
    }
    Outcome::skip("no (|S|, r) within the length cap drawn")
}

fn sharpness_trial(rng: &mut Rng8, c: &Caps) -> Outcome {
    for _ in 0..ATTEMPTS {
        let size = rng.random_range(2..=c.d);
        let r = rng.random_range(1..=c.r);
        if sequence_length(size, r).is_none_or(|k| k > c.k) {
            continue;
        }
        let sidon = mian_chowla(size);
        let input = json!({ "sidon": sidon, "r": r });
        let pair = match sharp_pair(&sidon, r) {
            Ok(p) => p,
            Err(e) => return Outcome::error(input, e),
        };
        let distinct = has_distinct_consecutive_r_diffs(&pair.a, r).unwrap_or(false);
        let within_cap = pair.sumset_size <= pair.sumset_cap();
        let lower = main2_check(&pair.a, &pair.b, r).map(|rep| rep.holds).unwrap_or(false);
        let four = Rat::from(4i64);
        let upper = certify(|bits| main2_ratio(pair.sumset_size, pair.k, pair.k, r, bits).le(&four)).unwrap_or(false);
        let ratio = main2_ratio(pair.sumset_size, pair.k, pair.k, r, 64).approx();
        let metrics = json!({
            "size": size,
            "r": r,
            "k": pair.k,
            "sumset_size": pair.sumset_size,
            "ratio": ratio,
            "distinct_r_diffs": distinct,
            "within_cap": within_cap,
            "above_lower_bound": lower,
            "ratio_at_most_4": upper,
        });
        return Outcome::check(distinct && within_cap && lower && upper, input, metrics);
    }
    Outcome::skip("no (|S|, r) within the length cap drawn")
}
