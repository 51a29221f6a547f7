//! Continued-fraction words, convergents and cylinder intervals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{Fraction, Rational};
use super::tree::SBInterval;
use crate::error::{domain, Error, Result};

/// Digits `(a₁, …, a_k)` with every `aᵢ ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CFWord(Vec<u64>);

impl CFWord {
    pub fn new(digits: Vec<u64>) -> Result<Self> {
        if digits.contains(&0) {
            return Err(domain("continued-fraction digits must be at least 1"));
        }
        Ok(Self(digits))
    }

    pub fn digits(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn digit_sum(&self) -> u128 {
        self.0.iter().map(|&a| a as u128).sum()
    }

    /// The word with its first digit removed.
    pub fn shift(&self) -> CFWord {
        CFWord(self.0.iter().skip(1).copied().collect())
    }

    /// `(p_k, q_k, p_{k−1}, q_{k−1})` in arbitrary precision.
    pub fn convergents(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        let (mut p, mut q) = (BigInt::zero(), BigInt::one());
        let (mut pp, mut qp) = (BigInt::one(), BigInt::zero());
        for &a in &self.0 {
            let a = BigInt::from(a);
            let np = &a * &p + &pp;
            let nq = &a * &q + &qp;
            pp = std::mem::replace(&mut p, np);
            qp = std::mem::replace(&mut q, nq);
        }
        (p, q, pp, qp)
    }

    /// Machine-word convergents, or `Overflow`.
    pub fn convergents_u64(&self) -> Result<(u64, u64, u64, u64)> {
        let (mut p, mut q, mut pp, mut qp) = (0u64, 1u64, 1u64, 0u64);
        for &a in &self.0 {
            let step = |x: u64, y: u64| a.checked_mul(x).and_then(|v| v.checked_add(y));
            let np = step(p, pp).ok_or(Error::Overflow)?;
            let nq = step(q, qp).ok_or(Error::Overflow)?;
            (pp, qp, p, q) = (p, q, np, nq);
        }
        Ok((p, q, pp, qp))
    }

    /// Exact value of the finite continued fraction `[a₁, …, a_k]`.
    pub fn value(&self) -> Result<Rational> {
        if self.is_empty() {
            return Err(Error::EmptyCode);
        }
        let (p, q, _, _) = self.convergents();
        Rational::new(p, q)
    }
}

impl fmt::Display for CFWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]]")
    }
}

impl FromStr for CFWord {
    type Err = Error;

    /// Accepts `[[1,2]]`, `[1,2]` or `1,2`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        if inner.trim().is_empty() {
            return CFWord::new(Vec::new());
        }
        let digits = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| domain(format!("bad digit {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        CFWord::new(digits)
    }
}

/// The cylinder `[[a₁, …, a_k]]`, an interval of level `a₁ + … + a_k`.
pub fn cf_cylinder_interval(word: &CFWord) -> Result<SBInterval> {
    if word.is_empty() {
        return Err(Error::EmptyCode);
    }
    let (p, q, pp, qp) = word.convergents_u64()?;
    let a = Fraction { num: p, den: q };
    let b = Fraction {
        num: p.checked_add(pp).ok_or(Error::Overflow)?,
        den: q.checked_add(qp).ok_or(Error::Overflow)?,
    };
    let level = u32::try_from(word.digit_sum()).map_err(|_| Error::Overflow)?;
    SBInterval::from_endpoints(a, b, level)
}

/// First `max_k` digits of the regular continued fraction of `x ∈ (0, 1)`,
/// with a terminating expansion written so its last digit is at least 2.
pub fn cf_digits(x: &Rational, max_k: usize) -> Result<CFWord> {
    if !x.is_positive() || x >= &Rational::one() {
        return Err(domain(format!("{x} is not in (0, 1)")));
    }
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut digits = Vec::new();
    while digits.len() < max_k && num.is_positive() {
        let a = &den / &num;
        let r = &den % &num;
        digits.push(a.to_u64().ok_or(Error::Overflow)?);
        den = std::mem::replace(&mut num, r);
    }
    CFWord::new(digits)
}

/// Visits every digit word with digit sum at most `max_sum` in prefix
/// order, passing the word and its convergents `(q_k, q_{k−1}, p_k, p_{k−1})`.
/// The visitor returns whether to descend below the word.
pub fn walk_words<F>(max_sum: u32, mut visit: F) -> Result<()>
where
    F: FnMut(&[u64], u64, Conv) -> bool,
{
    fn rec<F: FnMut(&[u64], u64, Conv) -> bool>(
        word: &mut Vec<u64>,
        sum: u64,
        max: u64,
        c: Conv,
        visit: &mut F,
    ) -> Result<()> {
        for a in 1..=max - sum {
            let next = c.push(a)?;
            word.push(a);
            if visit(word, sum + a, next) && sum + a < max {
                rec(word, sum + a, max, next, visit)?;
            }
            word.pop();
        }
        Ok(())
    }
    let mut word = Vec::new();
    rec(&mut word, 0, max_sum as u64, Conv::EMPTY, &mut visit)
}

/// Convergent state `p_k/q_k`, `p_{k−1}/q_{k−1}` in machine words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Conv {
    pub p: u64,
    pub q: u64,
    pub pp: u64,
    pub qp: u64,
}

impl Conv {
    pub const EMPTY: Conv = Conv {
        p: 0,
        q: 1,
        pp: 1,
        qp: 0,
    };

    pub fn push(&self, a: u64) -> Result<Conv> {
        let step = |x: u64, y: u64| a.checked_mul(x).and_then(|v| v.checked_add(y));
        Ok(Conv {
            p: step(self.p, self.pp).ok_or(Error::Overflow)?,
            q: step(self.q, self.qp).ok_or(Error::Overflow)?,
            pp: self.p,
            qp: self.q,
        })
    }

    /// `p_k q_{k−1} − q_k p_{k−1} = (−1)^k`.
    pub fn sign(&self) -> i128 {
        self.p as i128 * self.qp as i128 - self.q as i128 * self.pp as i128
    }
}

/// `λ{x ∈ [[a₁,…,a_k]] : a_{k+1}(x) ≥ ℓ} = 1/(q_k(ℓ q_k + q_{k−1}))`.
pub fn tail_cylinder_measure(word: &CFWord, ell: u64) -> Result<Rational> {
    if word.is_empty() {
        return Err(Error::EmptyCode);
    }
    if ell == 0 {
        return Err(domain("tail threshold must be at least 1"));
    }
    let (_, q, _, qp) = word.convergents();
    let den = &q * (BigInt::from(ell) * &q + qp);
    Rational::new(1, den)
}
