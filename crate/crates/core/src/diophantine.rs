//! Digit statistics of Lebesgue-random points: `θₙ`, the Khintchine-type
//! statistics, exact tail measures and a seeded Monte Carlo sampler.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_guard, domain, Error, Guards, Result};
use crate::exact_kernel::{walk_words, CFWord, ExactSum, Rational};
use crate::sum_level::{add_tail, e_set_measure_guarded, e_set_threshold, lambda_exact_guarded};

pub const DEFAULT_BITS: u32 = 256;

/// A dyadic point `x = N / 2^B` with the digits that are reliable for a
/// uniform real in `[x, x + 2^{−B})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitSample {
    pub id: u64,
    pub numerator: BigUint,
    pub bits: u32,
    /// `a₁, …, a_k` for the largest `k` with `q_k² ≤ 2^{B−8}`.
    pub digits: Vec<u64>,
}

impl DigitSample {
    pub fn valid_depth(&self) -> usize {
        self.digits.len()
    }

    pub fn x(&self) -> Result<Rational> {
        Rational::new(self.numerator.clone(), BigUint::from(1u8) << self.bits as usize)
    }

    pub fn word(&self) -> Result<CFWord> {
        CFWord::new(self.digits.clone())
    }

    pub fn stats(&self, n_grid: &[u64]) -> Result<Vec<StatRecord>> {
        stat_series(&self.digits, n_grid)
    }
}

/// Digits of `numerator / 2^bits` while `q_k² ≤ 2^{bits−8}`.
pub fn valid_digits(numerator: &BigUint, bits: u32) -> Vec<u64> {
    let limit = BigUint::from(1u8) << (bits as usize - 8);
    let mut num = numerator.clone();
    let mut den = BigUint::from(1u8) << bits as usize;
    let (mut q, mut qp) = (BigUint::from(1u8), BigUint::zero());
    let mut digits = Vec::new();
    while !num.is_zero() {
        let a = &den / &num;
        let next_q = &a * &q + &qp;
        let Some(a) = a.to_u64() else { break };
        if &next_q * &next_q > limit {
            break;
        }
        digits.push(a);
        let r = &den % &num;
        den = std::mem::replace(&mut num, r);
        qp = std::mem::replace(&mut q, next_q);
    }
    digits
}

/// Sample `id` of the stream seeded by `seed`; independent of every other id.
pub fn sample_one(seed: u64, id: u64, bits: u32) -> Result<DigitSample> {
    if bits < 64 || bits % 8 != 0 {
        return Err(domain("B must be a multiple of 8 and at least 64"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    let mut bytes = vec![0u8; bits as usize / 8];
    rng.fill_bytes(&mut bytes);
    let numerator = BigUint::from_bytes_le(&bytes);
    Ok(DigitSample {
        id,
        digits: valid_digits(&numerator, bits),
        numerator,
        bits,
    })
}

pub fn sample_digits(seed: u64, count: u64, bits: u32) -> Result<Vec<DigitSample>> {
    if count == 0 {
        return Err(domain("count must be at least 1"));
    }
    (0..count).into_par_iter().map(|id| sample_one(seed, id, bits)).collect()
}

fn insufficient(what: impl Into<String>) -> Error {
    Error::InsufficientDepth(what.into())
}

/// `θₙ = max{k ≥ 0 : a₁ + … + a_k ≤ n}`.
pub fn theta(digits: &[u64], n: u64) -> Result<usize> {
    let mut s = 0u64;
    for (k, &a) in digits.iter().enumerate() {
        s += a;
        if s > n {
            return Ok(k);
        }
    }
    if s == n {
        Ok(digits.len())
    } else {
        Err(insufficient(format!("digit sum {s} of the available digits is below {n}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StatRecord {
    pub n: u64,
    /// `log(aₙ/n) / log log n`, for `n ≥ 3`.
    pub khintchine: Option<f64>,
    /// `log(aₙ₊₁/S) / log log S` with `S = a₁ + … + aₙ ≥ 3`.
    pub algebraic: Option<f64>,
    pub theta: usize,
    /// `a_{θ+1} / (a₁ + … + a_θ)`, for `θ > 0`.
    pub ratio: Option<f64>,
}

pub fn stat_series(digits: &[u64], n_grid: &[u64]) -> Result<Vec<StatRecord>> {
    n_grid
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(domain("statistics start at n = 1"));
            }
            let idx = n as usize;
            if idx + 1 > digits.len() {
                return Err(insufficient(format!("n = {n} needs {} digits, {} are valid", idx + 1, digits.len())));
            }
            let nf = n as f64;
            let khintchine = (n >= 3).then(|| (digits[idx - 1] as f64 / nf).ln() / nf.ln().ln());
            let s: u64 = digits[..idx].iter().sum();
            let algebraic = (s >= 3).then(|| {
                let sf = s as f64;
                (digits[idx] as f64 / sf).ln() / sf.ln().ln()
            });
            let th = theta(digits, n)?;
            let ratio = if th == 0 {
                None
            } else {
                let next = *digits
                    .get(th)
                    .ok_or_else(|| insufficient(format!("a_{} is beyond the valid depth", th + 1)))?;
                Some(next as f64 / digits[..th].iter().sum::<u64>() as f64)
            };
            Ok(StatRecord {
                n,
                khintchine,
                algebraic,
                theta: th,
                ratio,
            })
        })
        .collect()
}

/// Smallest integer `a` with `a > ε·s`.
fn strictly_above(eps: f64, s: u64) -> u64 {
    (eps * s as f64).floor() as u64 + 1
}

/// Exact `λ{x : θₙ(x) > 0, a_{θₙ+1}(x) / Σ_{k≤θₙ} a_k(x) > ε}`.
pub fn theta_tail_exact(n: u32, eps: f64) -> Result<Rational> {
    theta_tail_exact_guarded(n, eps, &Guards::default())
}

pub fn theta_tail_exact_guarded(n: u32, eps: f64, guards: &Guards) -> Result<Rational> {
    if n < 2 {
        return Err(domain("the θ-tail needs n ≥ 2"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(domain("ε must be positive and finite"));
    }
    check_guard(n, guards.exact)?;
    let mut sum = ExactSum::new();
    let mut err = None;
    walk_words(n, |_, s, c| {
        let ell = strictly_above(eps, s).max(n as u64 - s + 1);
        if let Err(e) = add_tail(&mut sum, c.p, c.q, c.pp, c.qp, c.sign(), ell) {
            err = Some(e);
        }
        true
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(sum.finish()),
    }
}

/// Digit events with exactly known Lebesgue measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum DigitEvent {
    /// `x ∈ Cₙ`: some prefix of the digits sums to exactly `n`.
    SumLevel { n: u32 },
    /// `x ∈ Eₙᵉ`: the digit after that prefix is at least `⌈n (ln n)^ε⌉`.
    ESet { n: u32, eps: f64 },
    /// The θ-tail event at `(n, ε)`.
    ThetaTail { n: u32, eps: f64 },
}

impl DigitEvent {
    pub fn exact(&self) -> Result<Rational> {
        let g = Guards::default();
        match *self {
            DigitEvent::SumLevel { n } => Ok(lambda_exact_guarded(n, &g)?.exact.expect("exact")),
            DigitEvent::ESet { n, eps } => Ok(e_set_measure_guarded(n, eps, &g)?.exact.expect("exact")),
            DigitEvent::ThetaTail { n, eps } => theta_tail_exact_guarded(n, eps, &g),
        }
    }

    pub fn hit(&self, digits: &[u64]) -> Result<bool> {
        let prefix_end = |n: u32| -> Result<Option<usize>> {
            let th = theta(digits, n as u64)?;
            Ok((digits[..th].iter().sum::<u64>() == n as u64).then_some(th))
        };
        let next = |k: usize| {
            digits
                .get(k)
                .copied()
                .ok_or_else(|| insufficient(format!("a_{} is beyond the valid depth", k + 1)))
        };
        match *self {
            DigitEvent::SumLevel { n } => Ok(prefix_end(n)?.is_some_and(|k| k > 0)),
            DigitEvent::ESet { n, eps } => match prefix_end(n)? {
                Some(k) if k > 0 => Ok(next(k)? >= e_set_threshold(n, eps)?),
                _ => Ok(false),
            },
            DigitEvent::ThetaTail { n, eps } => {
                let k = theta(digits, n as u64)?;
                if k == 0 {
                    return Ok(false);
                }
                let s: u64 = digits[..k].iter().sum();
                Ok(next(k)? >= strictly_above(eps, s))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub event: DigitEvent,
    pub samples: u64,
    pub hits: u64,
    pub frequency: f64,
    pub exact: Rational,
    /// Binomial standard deviation of the frequency under the exact measure.
    pub sigma: f64,
    /// `(frequency − exact) / sigma`.
    pub z: f64,
}

impl MonteCarloReport {
    pub fn within(&self, k_sigma: f64) -> bool {
        self.z.abs() <= k_sigma
    }
}

pub fn monte_carlo(event: DigitEvent, seed: u64, samples: u64, bits: u32) -> Result<MonteCarloReport> {
    if samples == 0 {
        return Err(domain("samples must be at least 1"));
    }
    let exact = event.exact()?;
    let hits = (0..samples)
        .into_par_iter()
        .map(|id| {
            let s = sample_one(seed, id, bits)?;
            event.hit(&s.digits).map(u64::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p = exact.to_f64();
    let frequency = hits as f64 / samples as f64;
    let sigma = (p * (1.0 - p) / samples as f64).sqrt();
    Ok(MonteCarloReport {
        event,
        samples,
        hits,
        frequency,
        exact,
        sigma,
        z: (frequency - p) / sigma,
    })
}
