use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::cf::{continued_fraction, convergent_pairs};
use super::{NumericError, Rat};

/// Longest expansion considered when certifying a decimal interval.
const MAX_CF_TERMS: usize = 400;

/// Finite description of a rotation number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaSpec {
    /// Used as given.
    Exact(Rat),
    /// A prefix `[a0; a1, ..., an]` of the expansion of an irrational number.
    ContinuedFraction(Vec<BigInt>),
    /// A decimal value known to within `10^-digits` of the target.
    Decimal { value: Rat, digits: u32, text: String },
}

impl AlphaSpec {
    pub fn continued_fraction(coeffs: Vec<BigInt>) -> Result<Self, NumericError> {
        if coeffs.is_empty() {
            return Err(NumericError::AlphaSpec("empty continued fraction".into()));
        }
        if let Some(bad) = coeffs.iter().skip(1).find(|a| !a.is_positive()) {
            return Err(NumericError::AlphaSpec(format!("partial quotient {bad} after the first must be positive")));
        }
        Ok(AlphaSpec::ContinuedFraction(coeffs))
    }

    pub fn decimal(text: &str, digits: u32) -> Result<Self, NumericError> {
        if digits == 0 {
            return Err(NumericError::AlphaSpec(format!("dec:{text}:0 carries no digits")));
        }
        let value = Rat::from_decimal_str(text)?;
        Ok(AlphaSpec::Decimal { value, digits, text: text.to_string() })
    }
}

impl FromStr for AlphaSpec {
    type Err = NumericError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let malformed = || NumericError::AlphaSpec(s.to_string());
        if let Some(body) = s.strip_prefix("cf:") {
            let inner = body.trim().strip_prefix('[').and_then(|b| b.strip_suffix(']')).ok_or_else(malformed)?;
            let coeffs = inner
                .split([',', ';'])
                .map(|t| t.trim().parse::<BigInt>().map_err(|_| malformed()))
                .collect::<Result<Vec<_>, _>>()?;
            return AlphaSpec::continued_fraction(coeffs);
        }
        if let Some(body) = s.strip_prefix("dec:") {
            let (value, digits) = body.rsplit_once(':').ok_or_else(malformed)?;
            let digits: u32 = digits.trim().parse().map_err(|_| malformed())?;
            return AlphaSpec::decimal(value.trim(), digits);
        }
        Ok(AlphaSpec::Exact(s.parse()?))
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Exact(r) => write!(f, "{r}"),
            AlphaSpec::ContinuedFraction(c) => {
                let parts: Vec<String> = c.iter().map(|a| a.to_string()).collect();
                write!(f, "cf:[{}]", parts.join(","))
            }
            AlphaSpec::Decimal { digits, text, .. } => write!(f, "dec:{text}:{digits}"),
        }
    }
}

impl Serialize for AlphaSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Replaces a (possibly irrational) rotation number by a rational `p/q` whose
/// first `n` orbit points `{k p/q}` have the same circular order and the same
/// gap-equality pattern as those of the target.
///
/// For an expansion prefix the chosen convergent is the shallowest with
/// `q > 2n` whose orbit clears the a-posteriori check
/// `min gap > 2n * |alpha - p/q|`, where the approximation error is bounded by
/// `1 / (q_i q_{i+1})`. Exact rationals are returned unchanged once their
/// first `n` orbit points are known to be distinct.
pub fn resolve_alpha(spec: &AlphaSpec, n: u64) -> Result<Rat, NumericError> {
    if n == 0 {
        return Err(NumericError::InvalidArgument("orbit length must be at least 1".into()));
    }
    match spec {
        AlphaSpec::Exact(alpha) => {
            // {k p/q} for k = 1..n are distinct iff n <= q.
            let q = alpha.denom();
            if BigInt::from(n) > *q {
                let repeat = q.to_u64().map_or(n, |q| q + 1);
                return Err(NumericError::Degenerate { alpha: alpha.clone(), repeat });
            }
            Ok(alpha.clone())
        }
        AlphaSpec::ContinuedFraction(coeffs) => certified_convergent(coeffs, n).ok_or_else(|| {
            NumericError::InsufficientPrecision(format!(
                "{} partial quotients do not reach a certified convergent for n = {n}",
                coeffs.len()
            ))
        }),
        AlphaSpec::Decimal { value, digits, .. } => {
            let radius = Rat::new(1, num_traits::pow(BigInt::from(10), *digits as usize))?;
            let prefix = common_prefix(&(value - &radius), &(value + &radius));
            certified_convergent(&prefix, n).ok_or_else(|| {
                NumericError::InsufficientPrecision(format!(
                    "{digits} digits certify only {} partial quotients, not enough for n = {n}",
                    prefix.len()
                ))
            })
        }
    }
}

/// Partial quotients shared by every real number in `[lo, hi]`.
fn common_prefix(lo: &Rat, hi: &Rat) -> Vec<BigInt> {
    let certified = |x: &Rat| {
        let mut cf = continued_fraction(x, MAX_CF_TERMS);
        // The last quotient of a terminating expansion is ambiguous
        // ([.., a] = [.., a - 1, 1]), so only the earlier ones are shared
        // with nearby numbers.
        if cf.len() < MAX_CF_TERMS {
            cf.pop();
        }
        cf
    };
    let (a, b) = (certified(lo), certified(hi));
    a.into_iter().zip(b).take_while(|(x, y)| x == y).map(|(x, _)| x).collect()
}

fn certified_convergent(coeffs: &[BigInt], n: u64) -> Option<Rat> {
    let conv = convergent_pairs(coeffs);
    let two_n = BigInt::from(2 * n);
    for (i, c) in conv.iter().enumerate() {
        if c.q <= two_n {
            continue;
        }
        let q_prev = if i == 0 { BigInt::zero() } else { conv[i - 1].q.clone() };
        // The complete quotient after position i is at least a_{i+1}, or at
        // least 1 when the prefix stops here.
        let q_next = match coeffs.get(i + 1) {
            Some(a) => a * &c.q + &q_prev,
            None => &c.q + &q_prev,
        };
        let gap = min_orbit_gap(&c.p, &c.q, n);
        // gap/q > 2n / (q * q_next)
        if gap * q_next > two_n {
            return Some(c.value());
        }
    }
    None
}

/// Smallest distance, in units of `1/q`, between consecutive points of
/// `{k p / q : 1 <= k <= n}` or between a point and `0`.
fn min_orbit_gap(p: &BigInt, q: &BigInt, n: u64) -> BigInt {
    let mut residues: Vec<BigInt> =
        (1..=n).map(|k| num_integer::Integer::mod_floor(&(p * BigInt::from(k)), q)).collect();
    residues.sort();
    let mut best = residues[0].clone();
    for w in residues.windows(2) {
        let d = &w[1] - &w[0];
        if d < best {
            best = d;
        }
    }
    let top = q - residues.last().expect("n >= 1");
    if top < best {
        best = top;
    }
    best
}
