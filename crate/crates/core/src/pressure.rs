//! Partition sums `Σ diam(I)^t` over Stern–Brocot families and the
//! sandwich inequalities linking `Cₙ` to `𝒯ₙ₋₁`.

use std::f64::consts::LN_2;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_guard, domain, Guards, Result};
use crate::exact_kernel::{farey_frontier, visit_leaves, ExactSum, Mobius, Rational};
use crate::sum_level::FamilyTag;

/// `ln S = twos · ln 2 + rest`. Keeping the power of two apart makes
/// `ln 2ⁿ / n` come out as `ln 2` to the last bit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogSum {
    pub twos: i64,
    pub rest: f64,
}

impl LogSum {
    pub fn from_ln(x: f64) -> Self {
        Self { twos: 0, rest: x }
    }

    pub fn from_rational(r: &Rational) -> Result<Self> {
        let (twos, rest) = r.ln_parts()?;
        Ok(Self { twos, rest })
    }

    pub fn value(&self) -> f64 {
        self.twos as f64 * LN_2 + self.rest
    }

    /// `ln S / n`.
    pub fn per_level(&self, n: u32) -> f64 {
        self.twos as f64 / n as f64 * LN_2 + self.rest / n as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureProbe {
    pub n: u32,
    pub t: f64,
    pub family: FamilyTag,
    pub log_sum: LogSum,
    pub estimate: f64,
    /// `Σ diam^t` as a rational when `t` makes it one and it was cheap.
    pub exact: Option<Rational>,
}

/// Diameter of the family member hanging off a node `x ↦ (ax+b)/(cx+d)`
/// as `num/den`.
type Shape = fn(&Mobius) -> (u64, u128);

/// Depth of the tree nodes a family is read from, and its [`Shape`].
fn family_shape(n: u32, family: FamilyTag) -> Result<(u32, Shape)> {
    let min = if family == FamilyTag::All { 0 } else { 2 };
    if n < min {
        return Err(domain(format!("the {family} family needs n ≥ {min}")));
    }
    fn all(m: &Mobius) -> (u64, u128) {
        (1, m.d as u128 * (m.c + m.d) as u128)
    }
    fn c(m: &Mobius) -> (u64, u128) {
        (1, (m.c + m.d) as u128 * (m.c + 2 * m.d) as u128)
    }
    fn complement(m: &Mobius) -> (u64, u128) {
        (1, m.d as u128 * (m.c + 2 * m.d) as u128)
    }
    fn even(m: &Mobius) -> (u64, u128) {
        (3, (m.c + 3 * m.d) as u128 * (2 * m.c + 3 * m.d) as u128)
    }
    Ok(match family {
        FamilyTag::All => (n, all as fn(&Mobius) -> (u64, u128)),
        FamilyTag::C => (n - 1, c),
        FamilyTag::Complement => (n - 1, complement),
        FamilyTag::Even => (n - 2, even),
    })
}

const SPLIT_DEPTH: u32 = 10;

/// Runs `leaf` over every depth-`depth` node, one accumulator per frontier
/// subtree, and returns the accumulators in tree order.
fn per_subtree<A: Send>(depth: u32, init: impl Fn() -> A + Sync, leaf: impl Fn(&mut A, &Mobius) + Sync) -> Result<Vec<A>> {
    let split = depth.min(SPLIT_DEPTH);
    let frontier = farey_frontier(split)?;
    Ok(frontier
        .par_iter()
        .map(|node| {
            let mut acc = init();
            visit_leaves(&node.map, depth - split, &mut |m: &Mobius| leaf(&mut acc, m));
            acc
        })
        .collect())
}

/// Streaming `ln Σ eˣ`.
#[derive(Clone, Copy, Debug)]
struct Lse {
    max: f64,
    scaled: f64,
}

impl Lse {
    const EMPTY: Lse = Lse {
        max: f64::NEG_INFINITY,
        scaled: 0.0,
    };

    fn add(&mut self, x: f64) {
        if x <= self.max {
            self.scaled += (x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    fn merge(&mut self, o: Lse) {
        if o.max == f64::NEG_INFINITY {
            return;
        }
        if o.max <= self.max {
            self.scaled += o.scaled * (o.max - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - o.max).exp() + o.scaled;
            self.max = o.max;
        }
    }

    fn value(&self) -> f64 {
        self.max + self.scaled.ln()
    }
}

fn exact_sum(depth: u32, shape: fn(&Mobius) -> (u64, u128), t: i32) -> Result<Option<Rational>> {
    match t {
        0 => Ok(Some(Rational::from_integer(BigInt::from(1u8) << depth as usize))),
        t if t > 0 => {
            let e = t as u32;
            let parts = per_subtree(
                depth,
                || Some(ExactSum::new()),
                |acc, m| {
                    let (num, den) = shape(m);
                    let den = u64::try_from(den).ok().and_then(|d| d.checked_pow(e));
                    match (acc.as_mut(), den) {
                        (Some(sum), Some(d)) => sum.add((num as i128).pow(e), d),
                        _ => *acc = None,
                    }
                },
            )?;
            let mut total = ExactSum::new();
            for p in parts {
                match p {
                    Some(p) => total.merge(p),
                    None => return Ok(None),
                }
            }
            Ok(Some(total.finish()))
        }
        t if t < 0 => {
            let e = t.unsigned_abs();
            let parts = per_subtree(
                depth,
                || Some(0u128),
                |acc, m| {
                    let den = shape(m).1;
                    *acc = acc.and_then(|s| den.checked_pow(e).and_then(|p| s.checked_add(p)));
                },
            )?;
            let mut total = Some(0u128);
            for p in parts {
                total = total.and_then(|s| p.and_then(|x| s.checked_add(x)));
            }
            let Some(total) = total else {
                return Ok(None);
            };
            let num = shape(&Mobius::IDENTITY).0;
            Ok(Some(Rational::new(BigInt::from(total), BigInt::from(num).pow(e))?))
        }
        _ => Ok(None),
    }
}

/// `ln Σ_{I ∈ family} diam(I)^t`.
pub fn partition_sum(n: u32, t: f64, family: FamilyTag) -> Result<LogSum> {
    partition_probe(n, t, family, &Guards::default()).map(|p| p.log_sum)
}

/// `partition_sum / n`.
pub fn pressure_estimate(n: u32, t: f64, family: FamilyTag) -> Result<f64> {
    partition_probe(n, t, family, &Guards::default()).map(|p| p.estimate)
}

pub fn partition_probe(n: u32, t: f64, family: FamilyTag, guards: &Guards) -> Result<PressureProbe> {
    check_guard(n, guards.enumeration)?;
    if !t.is_finite() {
        return Err(domain("t must be finite"));
    }
    if n == 0 {
        return Err(domain("pressure estimates need n ≥ 1"));
    }
    let (depth, shape) = family_shape(n, family)?;
    let exact = if t.fract() == 0.0 && t.abs() <= 8.0 && n <= guards.exact {
        exact_sum(depth, shape, t as i32)?
    } else {
        None
    };
    let log_sum = match &exact {
        Some(r) => LogSum::from_rational(r)?,
        None => {
            let parts = per_subtree(
                depth,
                || Lse::EMPTY,
                |acc, m| {
                    let (num, den) = shape(m);
                    acc.add(t * ((num as f64).ln() - (den as f64).ln()));
                },
            )?;
            let mut total = Lse::EMPTY;
            for p in parts {
                total.merge(p);
            }
            LogSum::from_ln(total.value())
        }
    };
    Ok(PressureProbe {
        n,
        t,
        family,
        estimate: log_sum.per_level(n),
        log_sum,
        exact,
    })
}

/// A pair `(I, J)` with `I ∈ Cₙ` the `R`-child of `J ∈ 𝒯ₙ₋₁`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairWitness {
    /// Position of `J` in tree order.
    pub index: u64,
    /// `diam(J) / diam(I)`.
    pub ratio: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub n: u32,
    pub t: f64,
    /// `n + 1`.
    pub factor: u32,
    pub pairs: u64,
    pub min_ratio: Rational,
    pub max_ratio: Rational,
    /// Every pair has `1 ≤ diam(J)/diam(I) ≤ n + 1`.
    pub per_pair: bool,
    /// The ratio `n + 1` occurs only where `J`'s smaller denominator is 1.
    pub extremes_at_boundary: bool,
    /// Pairs breaking the per-pair bound, at most 16.
    pub witnesses: Vec<PairWitness>,
    pub log_sum_c: LogSum,
    pub log_sum_parent: LogSum,
    /// `Σ_{Cₙ} diam^t` against `(n+1)^{±|t|} Σ_{𝒯ₙ₋₁} diam^t`.
    pub sums: bool,
    /// The sum comparison used rationals only.
    pub sums_exact: bool,
}

impl SandwichReport {
    pub fn pass(&self) -> bool {
        self.per_pair && self.extremes_at_boundary && self.sums
    }
}

#[derive(Default)]
struct PairScan {
    count: u64,
    min: Option<(u64, u64)>,
    max: Option<(u64, u64)>,
    bad: Vec<(u64, u64, u64)>,
    extreme_off_boundary: bool,
}

fn less(a: (u64, u64), b: (u64, u64)) -> bool {
    (a.0 as u128) * (b.1 as u128) < (b.0 as u128) * (a.1 as u128)
}

/// Slack for comparing logarithms of sums that were not formed exactly.
const LOG_SLACK: f64 = 1e-12;

pub fn sandwich_check(n: u32, t: f64) -> Result<SandwichReport> {
    sandwich_check_guarded(n, t, &Guards::default())
}

pub fn sandwich_check_guarded(n: u32, t: f64, guards: &Guards) -> Result<SandwichReport> {
    if n < 2 {
        return Err(domain("the sandwich compares Cₙ with 𝒯ₙ₋₁ for n ≥ 2"));
    }
    check_guard(n, guards.exact)?;
    let depth = n - 1;
    let split = depth.min(SPLIT_DEPTH);
    let factor = n as u64 + 1;
    let scans = per_subtree(depth, PairScan::default, |s, m| {
        // diam(J)/diam(I) = (c + 2d)/d.
        let r = (m.c + 2 * m.d, m.d);
        if s.min.is_none_or(|x| less(r, x)) {
            s.min = Some(r);
        }
        if s.max.is_none_or(|x| less(x, r)) {
            s.max = Some(r);
        }
        if (r.0 < r.1 || r.0 > factor * r.1) && s.bad.len() < 16 {
            s.bad.push((s.count, r.0, r.1));
        }
        if r.0 == factor * r.1 && m.d.min(m.c + m.d) != 1 {
            s.extreme_off_boundary = true;
        }
        s.count += 1;
    })?;
    let per_tree = 1u64 << (depth - split);
    let mut min = None;
    let mut max = None;
    let mut witnesses = Vec::new();
    let mut extremes_at_boundary = true;
    let mut pairs = 0;
    for (k, s) in scans.into_iter().enumerate() {
        pairs += s.count;
        if let Some(x) = s.min.filter(|&x| min.is_none_or(|m| less(x, m))) {
            min = Some(x);
        }
        if let Some(x) = s.max.filter(|&x| max.is_none_or(|m| less(m, x))) {
            max = Some(x);
        }
        extremes_at_boundary &= !s.extreme_off_boundary;
        for (i, a, b) in s.bad {
            if witnesses.len() < 16 {
                witnesses.push(PairWitness {
                    index: k as u64 * per_tree + i,
                    ratio: Rational::new(a, b)?,
                });
            }
        }
    }
    let as_rational = |x: Option<(u64, u64)>| {
        let (a, b) = x.expect("level has pairs");
        Rational::new(a, b)
    };

    let c = partition_probe(n, t, FamilyTag::C, guards)?;
    let parent = partition_probe(n - 1, t, FamilyTag::All, guards)?;
    let s = t.abs();
    let (sums, sums_exact) = match (&c.exact, &parent.exact, s.fract() == 0.0) {
        (Some(sc), Some(sp), true) => {
            let f = Rational::from_integer(factor).pow(s as i32)?;
            (sc * &f >= *sp && *sc <= sp * &f, true)
        }
        _ => {
            let (lc, lp) = (c.log_sum.value(), parent.log_sum.value());
            let shift = s * (factor as f64).ln();
            let slack = LOG_SLACK * (1.0 + lp.abs());
            (lc >= lp - shift - slack && lc <= lp + shift + slack, false)
        }
    };
    Ok(SandwichReport {
        n,
        t,
        factor: factor as u32,
        pairs,
        min_ratio: as_rational(min)?,
        max_ratio: as_rational(max)?,
        per_pair: witnesses.is_empty(),
        extremes_at_boundary,
        witnesses,
        log_sum_c: c.log_sum,
        log_sum_parent: parent.log_sum,
        sums,
        sums_exact,
    })
}

/// Largest ratio of the two endpoint denominators over the intervals of
/// level `m`.
pub fn max_adjacent_ratio(m: u32) -> Result<Rational> {
    check_guard(m, Guards::default().exact)?;
    let best = per_subtree(
        m,
        || (1u64, 1u64),
        |b, node| {
            let (lo, hi) = (node.d.min(node.c + node.d), node.d.max(node.c + node.d));
            if less(*b, (hi, lo)) {
                *b = (hi, lo);
            }
        },
    )?
    .into_iter()
    .fold((1, 1), |b, x| if less(b, x) { x } else { b });
    Rational::new(best.0, best.1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvenReport {
    pub n: u32,
    pub t: f64,
    /// `ln(Σ_even diam^t / Σ_{Cₙ} diam^t)`.
    pub log_ratio: f64,
    pub lower: f64,
    pub upper: f64,
    /// Each even interval splits into two `Cₙ` members whose diameters
    /// differ by a factor in `[1, 2)`; checked in integers.
    pub split_ratio_in_range: bool,
    pub pass: bool,
}

/// Bounds on `Σ_even diam^t / Σ_{Cₙ} diam^t` from the split of each even
/// interval into two members of `Cₙ` with diameter ratio `r ∈ [1, 2)`:
/// between `1` and `2^{t−1}` for `t ≥ 0`, and in `[2^{2t−1}, 2^{t−1}]` for `t < 0`.
pub fn even_ratio_bounds(t: f64) -> (f64, f64) {
    let h = (t - 1.0) * LN_2;
    if t >= 0.0 {
        (h.min(0.0), h.max(0.0))
    } else {
        ((2.0 * t - 1.0) * LN_2, h)
    }
}

pub fn even_check(n: u32, t: f64) -> Result<EvenReport> {
    let guards = Guards::default();
    let even = partition_probe(n, t, FamilyTag::Even, &guards)?;
    let c = partition_probe(n, t, FamilyTag::C, &guards)?;
    let split_ratio_in_range = per_subtree(
        n - 2,
        || true,
        |ok, m| {
            // Members u([1/3,1/2]) and u([1/2,2/3]): ratio (2c+3d)/(c+3d).
            let (a, b) = (2 * m.c + 3 * m.d, m.c + 3 * m.d);
            *ok &= b <= a && a < 2 * b;
        },
    )?
    .into_iter()
    .all(|x| x);
    let log_ratio = even.log_sum.value() - c.log_sum.value();
    let (lower, upper) = even_ratio_bounds(t);
    let slack = LOG_SLACK * (1.0 + c.log_sum.value().abs());
    Ok(EvenReport {
        n,
        t,
        log_ratio,
        lower,
        upper,
        split_ratio_in_range,
        pass: split_ratio_in_range && log_ratio >= lower - slack && log_ratio <= upper + slack,
    })
}
