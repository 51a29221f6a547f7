use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use sumlevel::diophantine::theta_tail_exact;
use sumlevel::exact_kernel::Rational;
use sumlevel::sum_level::{e_set_measure, lambda_by_compositions, lambda_exact};

fn big(r: &Rational) -> BigRational {
    r.as_big().clone()
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `[0; a₁, …, a_k + t]`, evaluated from the innermost digit outwards.
fn cf_eval(digits: &[u64], t: &BigRational) -> BigRational {
    let mut v = int(*digits.last().unwrap()) + t;
    for &a in digits[..digits.len() - 1].iter().rev() {
        v = int(a) + v.recip();
    }
    v.recip()
}

/// Interval of `{[0; a₁, …, a_k + t] : 0 ≤ t ≤ tail}`.
fn span(digits: &[u64], tail: &BigRational) -> (BigRational, BigRational) {
    let a = cf_eval(digits, &BigRational::zero());
    let b = cf_eval(digits, tail);
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn compositions(n: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for a in 1..=n {
        prefix.push(a);
        compositions(n - a, prefix, out);
        prefix.pop();
    }
}

fn all_compositions(n: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    compositions(n, &mut Vec::new(), &mut out);
    out
}

/// Total length of a family of intervals after checking they do not overlap.
fn disjoint_union_length(mut ivs: Vec<(BigRational, BigRational)>) -> BigRational {
    ivs.sort();
    for w in ivs.windows(2) {
        assert!(w[0].1 <= w[1].0, "overlapping intervals");
    }
    ivs.into_iter().fold(BigRational::zero(), |acc, (a, b)| acc + b - a)
}

fn sum_level_union(n: u64) -> BigRational {
    disjoint_union_length(all_compositions(n).iter().map(|w| span(w, &BigRational::one())).collect())
}

#[test]
fn both_library_routes_match_the_cylinder_union() {
    for n in 1..=12u32 {
        let oracle = sum_level_union(n as u64);
        assert_eq!(big(&lambda_exact(n).unwrap().exact.unwrap()), oracle, "farey tree, n={n}");
        assert_eq!(big(&lambda_by_compositions(n).unwrap().exact.unwrap()), oracle, "compositions, n={n}");
    }
    assert_eq!(sum_level_union(4), BigRational::new(39.into(), 140.into()));
}

#[test]
fn composition_count() {
    for n in 1..=14u64 {
        assert_eq!(all_compositions(n).len(), 1 << (n - 1));
    }
}

fn threshold(n: u64, eps: f64) -> u64 {
    (n as f64 * (n as f64).ln().powf(eps)).ceil() as u64
}

#[test]
fn e_set_matches_tail_union() {
    for n in 2..=10u64 {
        for eps in [0.5, 1.0, 2.0] {
            let ell = threshold(n, eps);
            let tail = BigRational::new(1.into(), BigInt::from(ell));
            let ivs = all_compositions(n).iter().map(|w| span(w, &tail)).collect();
            let oracle = disjoint_union_length(ivs);
            let got = e_set_measure(n as u32, eps).unwrap().exact.unwrap();
            assert_eq!(big(&got), oracle, "n={n} eps={eps}");
        }
    }
}

/// Smallest integer strictly above `eps·s`, by counting.
fn above(eps: f64, s: u64) -> u64 {
    let mut a = 1;
    while a as f64 <= eps * s as f64 {
        a += 1;
    }
    a
}

fn theta_tail_union(n: u64, eps: f64) -> BigRational {
    let mut ivs = Vec::new();
    for s in 1..=n {
        let ell = above(eps, s).max(n - s + 1);
        let tail = BigRational::new(1.into(), BigInt::from(ell));
        for w in all_compositions(s) {
            ivs.push(span(&w, &tail));
        }
    }
    disjoint_union_length(ivs)
}

#[test]
fn theta_tail_matches_interval_union() {
    for n in 2..=8u64 {
        for eps in [0.25, 0.5, 1.0, 3.0] {
            let got = theta_tail_exact(n as u32, eps).unwrap();
            assert_eq!(big(&got), theta_tail_union(n, eps), "n={n} eps={eps}");
        }
    }
    assert_eq!(theta_tail_union(2, 1.0), BigRational::new(10.into(), 21.into()));
}
