use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rat;

/// Simple continued-fraction expansion `[a0; a1, a2, ...]`, truncated to
/// `max_terms` coefficients. The expansion of a rational terminates, and the
/// terminal coefficient is never 1 unless it is the only one.
pub fn continued_fraction(x: &Rat, max_terms: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    while out.len() < max_terms && !den.is_zero() {
        // floor division, valid for negative numerators too
        let a = num_integer::Integer::div_floor(&num, &den);
        let rem = &num - &a * &den;
        out.push(a);
        num = den;
        den = rem;
    }
    out
}

/// Convergent `p/q` together with its unreduced numerator and denominator,
/// as produced by the standard three-term recurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> Rat {
        Rat::new(self.p.clone(), self.q.clone()).expect("convergent denominators are positive")
    }
}

pub(crate) fn convergent_pairs(coeffs: &[BigInt]) -> Vec<Convergent> {
    let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
    coeffs
        .iter()
        .map(|a| {
            let p_next = a * &p + &p_prev;
            let q_next = a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            Convergent { p: p.clone(), q: q.clone() }
        })
        .collect()
}

/// Convergents `p_i / q_i` of `[a0; a1, ...]`.
pub fn convergents(coeffs: &[BigInt]) -> Vec<Rat> {
    convergent_pairs(coeffs).iter().map(Convergent::value).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    /// Euclid on (num, den) written out by hand: 5 = 0*8 + 5, 8 = 1*5 + 3,
    /// 5 = 1*3 + 2, 3 = 1*2 + 1, 2 = 2*1.
    #[test]
    fn five_eighths() {
        let cf = continued_fraction(&r("5/8"), 100);
        assert_eq!(cf, big(&[0, 1, 1, 1, 2]));
        let conv: Vec<String> = convergents(&cf).iter().map(|c| c.to_string()).collect();
        assert_eq!(conv, ["0", "1", "1/2", "2/3", "5/8"]);
    }

    #[test]
    fn small_cases() {
        assert_eq!(continued_fraction(&r("1/3"), 10), big(&[0, 3]));
        assert_eq!(continued_fraction(&r("7"), 10), big(&[7]));
        assert_eq!(continued_fraction(&r("-1/4"), 10), big(&[-1, 1, 3]));
    }

    #[test]
    fn truncation() {
        assert_eq!(continued_fraction(&r("5/8"), 2), big(&[0, 1]));
    }

    #[test]
    fn last_convergent_is_value() {
        let x = r("355/113");
        let conv = convergents(&continued_fraction(&x, 50));
        assert_eq!(conv.last().unwrap(), &x);
    }
}
