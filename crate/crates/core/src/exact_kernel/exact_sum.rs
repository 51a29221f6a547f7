//! Exact summation of many fractions with machine-word denominators.
//!
//! Terms are bucketed by denominator. The buckets are combined by a balanced
//! divide and conquer over factored denominators, so every merge multiplies
//! by the missing prime powers only and no big gcd is ever taken. The final
//! fraction is reduced by testing the primes of the common denominator.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::rational::Rational;

#[derive(Clone, Debug, Default)]
pub struct ExactSum {
    buckets: HashMap<u64, i128>,
    overflow: Vec<(u64, BigInt)>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `num / den`. `den` must be non-zero.
    pub fn add(&mut self, num: i128, den: u64) {
        assert!(den != 0, "zero denominator");
        let slot = self.buckets.entry(den).or_insert(0);
        match slot.checked_add(num) {
            Some(v) => *slot = v,
            None => {
                self.overflow.push((den, BigInt::from(*slot) + num));
                *slot = 0;
            }
        }
    }

    pub fn add_big(&mut self, num: BigInt, den: u64) {
        assert!(den != 0, "zero denominator");
        self.overflow.push((den, num));
    }

    pub fn merge(&mut self, other: ExactSum) {
        for (d, n) in other.buckets {
            self.add(n, d);
        }
        self.overflow.extend(other.overflow);
    }

    pub fn len(&self) -> usize {
        self.buckets.len() + self.overflow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn finish(self) -> Rational {
        let mut reduced: HashMap<u64, BigInt> = HashMap::new();
        let mut push = |n: BigInt, d: u64| {
            if n.is_zero() {
                return;
            }
            let g = gcd_big_u64(&n, d);
            let (n, d) = if g > 1 { (n / g, d / g) } else { (n, d) };
            *reduced.entry(d).or_insert_with(BigInt::zero) += n;
        };
        for (d, n) in self.buckets {
            push(BigInt::from(n), d);
        }
        for (d, n) in self.overflow {
            push(n, d);
        }
        let mut items: Vec<(u64, BigInt)> = reduced.into_iter().filter(|(_, n)| !n.is_zero()).collect();
        if items.is_empty() {
            return Rational::zero();
        }
        items.sort_unstable_by_key(|(d, _)| *d);

        let max_den = items.last().map(|(d, _)| *d).unwrap_or(1);
        let factorizer = Factorizer::new(max_den);
        let leaves: Vec<Node> = items
            .into_iter()
            .map(|(d, n)| Node {
                num: n,
                den: BigUint::from(d),
                factors: factorizer.factor(d),
            })
            .collect();
        let total = combine(leaves);
        reduce(total)
    }
}

fn gcd_big_u64(n: &BigInt, d: u64) -> u64 {
    let r = (n.magnitude() % d).to_u64().unwrap_or(0);
    r.gcd(&d)
}

struct Node {
    num: BigInt,
    den: BigUint,
    factors: Vec<(u64, u32)>,
}

fn combine(mut nodes: Vec<Node>) -> Node {
    if nodes.len() == 1 {
        return nodes.pop().unwrap();
    }
    let right = nodes.split_off(nodes.len() / 2);
    let (a, b) = if nodes.len() > 64 {
        rayon::join(|| combine(nodes), || combine(right))
    } else {
        (combine(nodes), combine(right))
    };
    merge_nodes(a, b)
}

fn merge_nodes(a: Node, b: Node) -> Node {
    let mut ma = PowAcc::default();
    let mut mb = PowAcc::default();
    let mut factors = Vec::with_capacity(a.factors.len().max(b.factors.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.factors.len() || j < b.factors.len() {
        let pa = a.factors.get(i).copied();
        let pb = b.factors.get(j).copied();
        match (pa, pb) {
            (Some((p, ea)), Some((q, eb))) if p == q => {
                if ea > eb {
                    mb.mul_pow(p, ea - eb);
                } else if eb > ea {
                    ma.mul_pow(p, eb - ea);
                }
                factors.push((p, ea.max(eb)));
                i += 1;
                j += 1;
            }
            (Some((p, ea)), Some((q, _))) if p < q => {
                mb.mul_pow(p, ea);
                factors.push((p, ea));
                i += 1;
            }
            (Some(_), Some((q, eb))) | (None, Some((q, eb))) => {
                ma.mul_pow(q, eb);
                factors.push((q, eb));
                j += 1;
            }
            (Some((p, ea)), None) => {
                mb.mul_pow(p, ea);
                factors.push((p, ea));
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    let ma = ma.finish();
    let mb = mb.finish();
    let num = a.num * BigInt::from(ma.clone()) + b.num * BigInt::from(mb);
    Node {
        num,
        den: a.den * ma,
        factors,
    }
}

/// Product of small prime powers, multiplied in machine words first.
#[derive(Default)]
struct PowAcc {
    word: u64,
    big: Option<BigUint>,
}

impl PowAcc {
    fn mul_pow(&mut self, p: u64, e: u32) {
        for _ in 0..e {
            self.mul(p);
        }
    }

    fn mul(&mut self, p: u64) {
        if self.word == 0 {
            self.word = 1;
        }
        match self.word.checked_mul(p) {
            Some(w) => self.word = w,
            None => {
                let acc = self.big.take().unwrap_or_else(BigUint::one) * self.word;
                self.big = Some(acc);
                self.word = p;
            }
        }
    }

    fn finish(self) -> BigUint {
        let w = if self.word == 0 { 1 } else { self.word };
        match self.big {
            Some(b) => b * w,
            None => BigUint::from(w),
        }
    }
}

fn reduce(node: Node) -> Rational {
    let Node {
        mut num,
        mut den,
        factors,
    } = node;
    if num.is_zero() {
        return Rational::zero();
    }
    // Residues of the numerator modulo chunks of primes, first by
    // multi-word chunk products and then by word-sized batches.
    const CHUNK_BITS: u64 = 4096;
    let mut divisors: Vec<(u64, u32)> = Vec::new();
    let mut start = 0;
    while start < factors.len() {
        let mut end = start;
        let mut acc = PowAcc::default();
        let mut bits = 0u64;
        while end < factors.len() && bits < CHUNK_BITS {
            acc.mul(factors[end].0);
            bits += 64 - factors[end].0.leading_zeros() as u64;
            end += 1;
        }
        let chunk = &factors[start..end];
        let residue = num.magnitude() % acc.finish();
        let mut i = 0;
        while i < chunk.len() {
            let mut prod: u64 = 1;
            let mut j = i;
            while j < chunk.len() {
                match prod.checked_mul(chunk[j].0) {
                    Some(v) => prod = v,
                    None => break,
                }
                j += 1;
            }
            let r = (&residue % prod).to_u64().unwrap_or(0);
            divisors.extend(chunk[i..j].iter().filter(|(p, _)| r % p == 0));
            i = j;
        }
        start = end;
    }
    for (p, e) in divisors {
        let p_big = BigUint::from(p);
        for _ in 0..e {
            let (q, rem) = num.magnitude().div_rem(&p_big);
            if !rem.is_zero() {
                break;
            }
            num = BigInt::from_biguint(num.sign(), q);
            den /= p;
        }
    }
    Rational::from_reduced(num, BigInt::from(den))
}

/// Factors integers up to a bound, by a smallest-prime-factor table when the
/// bound is small enough and by trial division otherwise.
struct Factorizer {
    spf: Vec<u32>,
    primes: Vec<u64>,
}

const SIEVE_LIMIT: u64 = 1 << 24;

impl Factorizer {
    fn new(max: u64) -> Self {
        if max <= SIEVE_LIMIT {
            let n = max as usize + 1;
            let mut spf = vec![0u32; n];
            for i in 2..n {
                if spf[i] == 0 {
                    let mut j = i;
                    while j < n {
                        if spf[j] == 0 {
                            spf[j] = i as u32;
                        }
                        j += i;
                    }
                }
            }
            Self {
                spf,
                primes: Vec::new(),
            }
        } else {
            let lim = (max as f64).sqrt() as u64 + 2;
            Self {
                spf: Vec::new(),
                primes: primes_up_to(lim),
            }
        }
    }

    fn factor(&self, mut d: u64) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        };
        if !self.spf.is_empty() {
            while d > 1 {
                let p = self.spf[d as usize] as u64;
                push(p, &mut out);
                d /= p;
            }
            return out;
        }
        for &p in &self.primes {
            if p * p > d {
                break;
            }
            while d % p == 0 {
                push(p, &mut out);
                d /= p;
            }
        }
        if d > 1 {
            push(d, &mut out);
        }
        out
    }
}

pub(crate) fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(terms: &[(i64, u64)]) -> Rational {
        terms
            .iter()
            .map(|&(n, d)| Rational::new(n, d).unwrap())
            .sum()
    }

    #[test]
    fn small_sums() {
        let mut s = ExactSum::new();
        for (n, d) in [(1, 2), (1, 3), (3, 10), (39, 140)] {
            s.add(n, d);
        }
        assert_eq!(s.finish().to_string(), "593/420");
        assert_eq!(ExactSum::new().finish(), Rational::zero());
        let mut s = ExactSum::new();
        s.add(1, 6);
        s.add(-1, 6);
        assert_eq!(s.finish(), Rational::zero());
    }

    #[test]
    fn trial_division_path() {
        let big = (1u64 << 40) + 15;
        let mut s = ExactSum::new();
        s.add(1, big);
        s.add(1, 3 * big);
        s.add(5, 7);
        let expect = naive(&[(1, big), (1, 3 * big), (5, 7)]);
        assert_eq!(s.finish(), expect);
    }

    #[test]
    fn overflowing_bucket_spills() {
        let mut s = ExactSum::new();
        s.add(i128::MAX, 3);
        s.add(i128::MAX, 3);
        let expect = Rational::new(BigInt::from(i128::MAX) * 2, 3).unwrap();
        assert_eq!(s.finish(), expect);
    }

    proptest! {
        #[test]
        fn matches_naive_rational_sum(terms in prop::collection::vec((-1000i64..1000, 1u64..5000), 0..200)) {
            let mut s = ExactSum::new();
            for &(n, d) in &terms {
                s.add(n as i128, d);
            }
            prop_assert_eq!(s.finish(), naive(&terms));
        }
    }
}
