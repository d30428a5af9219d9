use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{NumericError, Rat};

/// Precision of the first attempt at a certified comparison.
pub const INITIAL_BITS: u32 = 64;
/// Precision at which [`certify`] gives up.
pub const MAX_BITS: u32 = 1 << 14;

/// Closed interval `[lo, hi]` known to contain a real value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bracket {
    pub lo: Rat,
    pub hi: Rat,
}

impl Bracket {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "bracket endpoints out of order: {lo} > {hi}");
        Bracket { lo, hi }
    }

    pub fn exact(x: Rat) -> Self {
        Bracket { lo: x.clone(), hi: x }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `Some(value <= x)` when the bracket decides it.
    pub fn le(&self, x: &Rat) -> Option<bool> {
        if &self.hi <= x {
            Some(true)
        } else if &self.lo > x {
            Some(false)
        } else {
            None
        }
    }

    /// `Some(value >= x)` when the bracket decides it.
    pub fn ge(&self, x: &Rat) -> Option<bool> {
        if &self.lo >= x {
            Some(true)
        } else if &self.hi < x {
            Some(false)
        } else {
            None
        }
    }

    /// Product of two brackets of non-negative values.
    pub fn mul(&self, other: &Bracket) -> Bracket {
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Bracket::new(&self.lo * &other.lo, &self.hi * &other.hi)
    }

    /// Multiplication by a non-negative constant.
    pub fn scale(&self, c: &Rat) -> Bracket {
        debug_assert!(!c.is_negative());
        Bracket::new(&self.lo * c, &self.hi * c)
    }

    /// Reciprocal of a bracket of positive values.
    pub fn recip(&self) -> Bracket {
        assert!(self.lo.is_positive(), "reciprocal of a bracket touching zero");
        Bracket::new(self.hi.recip().expect("positive"), self.lo.recip().expect("positive"))
    }

    pub fn powi(&self, n: u32) -> Bracket {
        debug_assert!(!self.lo.is_negative());
        Bracket::new(self.lo.pow(n as i32), self.hi.pow(n as i32))
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    /// Midpoint as a float, for reports.
    pub fn approx(&self) -> f64 {
        ((&self.lo + &self.hi) * Rat::new(1, 2).expect("nonzero")).to_f64()
    }
}

/// Bracket of `x^(1/n)` for `x >= 0`, of width at most `2^-bits` relative to
/// the denominator of `x`. Exact when `x` is a perfect `n`-th power.
pub fn nth_root_bracket(x: &Rat, n: u32, bits: u32) -> Bracket {
    assert!(n >= 1, "root index must be positive");
    assert!(!x.is_negative(), "real root of a negative value");
    if n == 1 {
        return Bracket::exact(x.clone());
    }
    // (u/v)^(1/n) = (u v^(n-1))^(1/n) / v
    let u = x.numer();
    let v = x.denom();
    let scale = BigInt::one() << bits;
    let y = u * num_traits::pow(v.clone(), (n - 1) as usize) * num_traits::pow(scale.clone(), n as usize);
    let root = y.nth_root(n);
    let denom = v * &scale;
    let lo = Rat::new(root.clone(), denom.clone()).expect("positive denominator");
    if num_traits::pow(root.clone(), n as usize) == y {
        return Bracket::exact(lo);
    }
    let hi = Rat::new(root + 1, denom).expect("positive denominator");
    Bracket::new(lo, hi)
}

/// Bracket of Euler's number of width below `2^-bits`, from the partial sums
/// of `sum 1/k!` and the tail bound `sum_{k>m} 1/k! < 1/(m! m)`.
pub fn e_bracket(bits: u32) -> Bracket {
    let target = BigInt::one() << bits;
    let mut m: u64 = 1;
    let mut fact = BigInt::one();
    while &fact * BigInt::from(m) < target {
        m += 1;
        fact *= m;
    }
    // numerator of sum_{k=0}^{m} m!/k!
    let mut sum = BigInt::zero();
    let mut term = BigInt::one();
    for k in (1..=m).rev() {
        sum += &term;
        term *= k;
    }
    sum += &term;
    debug_assert_eq!(term, fact);
    let lo = Rat::new(sum.clone(), fact.clone()).expect("positive");
    let hi = Rat::new(sum * m + 1, fact * m).expect("positive");
    Bracket::new(lo, hi)
}

/// Runs a bracketed decision at increasing precision, starting at
/// [`INITIAL_BITS`] and doubling until `decide` returns `Some`.
pub fn certify<F>(mut decide: F) -> Result<bool, NumericError>
where
    F: FnMut(u32) -> Option<bool>,
{
    let mut bits = INITIAL_BITS;
    loop {
        if let Some(answer) = decide(bits) {
            return Ok(answer);
        }
        if bits >= MAX_BITS {
            return Err(NumericError::Undecided { bits });
        }
        bits *= 2;
    }
}
