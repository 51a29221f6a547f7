//! Sum-level sets `Cₙ`: enumeration, exact and compensated measures, the
//! pullback identity and the Diophantine sets `Eₙᵉ`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_guard, domain, Error, Guards, Result};
use crate::exact_kernel::{
    farey_frontier, farey_level, visit_leaves, walk_words, Alphabet, BinaryCode, ExactSum,
    FareyNode, Fraction, Mobius, Rational, SBInterval,
};
use crate::numeric::Neumaier;

/// Which intervals of a level a family holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyTag {
    /// `Cₙ`: Farey code ends in `R`.
    C,
    /// `Cₙᶜ`: Farey code ends in `L`.
    Complement,
    /// All of `𝒯ₙ`.
    All,
    /// Adjacent pairs of `Cₙ` merged.
    Even,
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyTag::C => "c",
            FamilyTag::Complement => "c-complement",
            FamilyTag::All => "all",
            FamilyTag::Even => "even",
        })
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c" => Ok(FamilyTag::C),
            "c-complement" | "complement" => Ok(FamilyTag::Complement),
            "all" | "t" => Ok(FamilyTag::All),
            "even" => Ok(FamilyTag::Even),
            _ => Err(domain(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalFamily {
    pub level: u32,
    pub tag: FamilyTag,
    /// Disjoint, increasing.
    pub members: Vec<SBInterval>,
    /// Farey code of each member; empty for merged families.
    pub codes: Vec<BinaryCode>,
}

impl IntervalFamily {
    /// Total length, summed exactly.
    pub fn measure(&self) -> Rational {
        let mut s = ExactSum::new();
        for iv in &self.members {
            s.add(iv.right.num as i128, iv.right.den);
            s.add(-(iv.left.num as i128), iv.left.den);
        }
        s.finish()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Adjacent pairs merged into single intervals.
    pub fn merged_pairs(&self) -> Result<Vec<(Fraction, Fraction)>> {
        if self.members.len() % 2 != 0 {
            return Err(domain("family has an odd number of members"));
        }
        self.members
            .chunks(2)
            .map(|p| {
                if p[0].right != p[1].left {
                    return Err(domain(format!("{} and {} are not adjacent", p[0], p[1])));
                }
                Ok((p[0].left, p[1].right))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Compensated,
    Operator,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Compensated => "compensated",
            Method::Operator => "operator",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub exact: Option<Rational>,
    pub approx: f64,
    pub method: Method,
}

impl MeasureValue {
    pub fn exact(r: Rational) -> Self {
        Self {
            approx: r.to_f64(),
            exact: Some(r),
            method: Method::Exact,
        }
    }

    pub fn approx(v: f64, method: Method) -> Self {
        Self {
            exact: None,
            approx: v,
            method,
        }
    }
}

fn check_level(n: u32, guard: u32) -> Result<()> {
    if n == 0 {
        return Err(domain("level must be at least 1"));
    }
    check_guard(n, guard)
}

/// Children of the depth `n−1` nodes, selected by last letter, in
/// increasing order.
fn last_letter_family(n: u32, right: bool, guards: &Guards) -> Result<IntervalFamily> {
    check_level(n, guards.enumeration)?;
    let parents = farey_level(n - 1)?;
    let mut members = Vec::with_capacity(parents.len());
    let mut codes = Vec::with_capacity(parents.len());
    for (j, parent) in parents.iter().enumerate() {
        let child = parent.child(right)?;
        // The first child in interval order is L for increasing maps.
        let first = parent.map.increasing() != right;
        let mut iv = child.map.interval(n)?;
        iv.index = Some(2 * j as u64 + if first { 1 } else { 2 });
        members.push(iv);
        codes.push(BinaryCode::from_bits(Alphabet::Farey, child.code, n)?);
    }
    Ok(IntervalFamily {
        level: n,
        tag: if right {
            FamilyTag::C
        } else {
            FamilyTag::Complement
        },
        members,
        codes,
    })
}

/// `Cₙ`: intervals of level `n` whose Farey code ends in `R`.
pub fn enumerate_sum_level(n: u32) -> Result<IntervalFamily> {
    last_letter_family(n, true, &Guards::default())
}

pub fn enumerate_sum_level_guarded(n: u32, guards: &Guards) -> Result<IntervalFamily> {
    last_letter_family(n, true, guards)
}

/// `Cₙᶜ`: intervals of level `n` whose Farey code ends in `L`.
pub fn complement_family(n: u32) -> Result<IntervalFamily> {
    last_letter_family(n, false, &Guards::default())
}

pub fn complement_family_guarded(n: u32, guards: &Guards) -> Result<IntervalFamily> {
    last_letter_family(n, false, guards)
}

/// All `2ⁿ` intervals of level `n` with their Farey codes.
pub fn level_family(n: u32, guards: &Guards) -> Result<IntervalFamily> {
    check_guard(n, guards.enumeration)?;
    let nodes = farey_level(n)?;
    let mut members = Vec::with_capacity(nodes.len());
    let mut codes = Vec::with_capacity(nodes.len());
    for (k, node) in nodes.iter().enumerate() {
        let mut iv = node.map.interval(n)?;
        iv.index = Some(k as u64 + 1);
        members.push(iv);
        if n > 0 {
            codes.push(BinaryCode::from_bits(Alphabet::Farey, node.code, n)?);
        }
    }
    Ok(IntervalFamily {
        level: n,
        tag: FamilyTag::All,
        members,
        codes,
    })
}

fn fib(n: u32) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

const SPLIT_DEPTH: u32 = 12;

/// Exact `λ(Cₙ)`, the sum of `1/((c+d)(c+2d))` over depth `n−1` maps.
pub fn lambda_exact(n: u32) -> Result<MeasureValue> {
    lambda_exact_guarded(n, &Guards::default())
}

pub fn lambda_exact_guarded(n: u32, guards: &Guards) -> Result<MeasureValue> {
    check_level(n, guards.exact)?;
    if n > 60 {
        return Err(Error::Overflow);
    }
    let depth = n - 1;
    let split = depth.min(SPLIT_DEPTH);
    let frontier = farey_frontier(split)?;
    // Level-n denominators are bounded by F(n+2).
    let width = fib(n + 2) as usize + 1;
    let chunk = frontier.len().div_ceil(64).max(1);
    // Each R-child length telescopes as det·((a+b)/(c+d) − (a+2b)/(c+2d)),
    // so the numerators can be bucketed by denominator.
    let buckets = frontier
        .par_chunks(chunk)
        .map(|nodes| {
            let mut acc = vec![0i64; width];
            for node in nodes {
                visit_leaves(&node.map, depth - split, &mut |m: &Mobius| {
                    let sign = if m.increasing() { 1 } else { -1 };
                    acc[(m.c + m.d) as usize] += sign * (m.a + m.b) as i64;
                    acc[(m.c + 2 * m.d) as usize] -= sign * (m.a + 2 * m.b) as i64;
                });
            }
            acc
        })
        .reduce(
            || vec![0i64; width],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut sum = ExactSum::new();
    for (den, &num) in buckets.iter().enumerate() {
        if num != 0 {
            sum.add(num as i128, den as u64);
        }
    }
    Ok(MeasureValue::exact(sum.finish()))
}

/// Exact `λ(Cₙ)` as the sum of the cylinder lengths `1/(q_k(q_k+q_{k−1}))`
/// over all compositions `(a₁,…,a_k)` of `n`.
pub fn lambda_by_compositions(n: u32) -> Result<MeasureValue> {
    lambda_by_compositions_guarded(n, &Guards::default())
}

pub fn lambda_by_compositions_guarded(n: u32, guards: &Guards) -> Result<MeasureValue> {
    check_level(n, guards.exact)?;
    let mut sum = ExactSum::new();
    let mut err = None;
    walk_words(n, |_, s, c| {
        if s == n as u64 {
            match c.q.checked_add(c.qp).and_then(|t| t.checked_mul(c.q)) {
                Some(den) => sum.add(1, den),
                None => err = Some(Error::Overflow),
            }
        }
        s < n as u64
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(MeasureValue::exact(sum.finish()))
}

/// `λ(Cₙ)` in compensated double precision; reproducible bit for bit
/// because subtrees are merged in left-first order.
pub fn lambda_compensated(n: u32) -> Result<MeasureValue> {
    lambda_compensated_guarded(n, &Guards::default())
}

pub fn lambda_compensated_guarded(n: u32, guards: &Guards) -> Result<MeasureValue> {
    check_level(n, guards.float)?;
    if n > 60 {
        return Err(Error::Overflow);
    }
    let depth = n - 1;
    let split = depth.min(SPLIT_DEPTH + 2);
    let frontier: Vec<FareyNode> = farey_frontier(split)?;
    let partial: Vec<Neumaier> = frontier
        .par_iter()
        .map(|node| {
            let mut acc = Neumaier::new();
            visit_leaves(&node.map, depth - split, &mut |m: &Mobius| {
                let s = (m.c + m.d) as u128;
                let t = (m.c + 2 * m.d) as u128;
                acc.add(1.0 / (s * t) as f64);
            });
            acc
        })
        .collect();
    let mut total = Neumaier::new();
    for p in &partial {
        total.absorb(p);
    }
    Ok(MeasureValue::approx(total.value(), Method::Compensated))
}

/// Checks `u₀(Cₙ) ∪ u₁(Cₙ) = Cₙ₊₁` as sets of intervals, exactly.
pub fn pullback_check(n: u32) -> Result<bool> {
    pullback_check_guarded(n, &Guards::default())
}

pub fn pullback_check_guarded(n: u32, guards: &Guards) -> Result<bool> {
    check_level(n + 1, guards.enumeration)?;
    let cn = last_letter_family(n, true, guards)?;
    let next = last_letter_family(n + 1, true, guards)?;
    let mut images = Vec::with_capacity(2 * cn.len());
    for iv in &cn.members {
        for branch in [Mobius::U0, Mobius::U1] {
            let f = |x: Fraction| -> Result<Fraction> {
                let num = branch.a * x.num + branch.b * x.den;
                let den = branch.c * x.num + branch.d * x.den;
                Ok(Fraction { num, den })
            };
            let img = SBInterval::from_endpoints(f(iv.left)?, f(iv.right)?, n + 1)?;
            images.push(img.span());
        }
    }
    images.sort();
    let mut target: Vec<_> = next.members.iter().map(|iv| iv.span()).collect();
    target.sort();
    Ok(images == target)
}

/// `ℓ = ⌈n (ln n)^ε⌉`.
pub fn e_set_threshold(n: u32, eps: f64) -> Result<u64> {
    if n < 2 {
        return Err(domain("E-sets need n ≥ 2"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(domain("ε must be positive and finite"));
    }
    Ok((n as f64 * (n as f64).ln().powf(eps)).ceil() as u64)
}

/// Exact `λ(Eₙᵉ)`.
pub fn e_set_measure(n: u32, eps: f64) -> Result<MeasureValue> {
    e_set_measure_guarded(n, eps, &Guards::default())
}

pub fn e_set_measure_guarded(n: u32, eps: f64, guards: &Guards) -> Result<MeasureValue> {
    let ell = e_set_threshold(n, eps)?;
    e_set_measure_with_threshold(n, ell, guards)
}

/// `λ` of the points whose digits reach sum exactly `n` and whose next
/// digit is at least `ell`.
pub fn e_set_measure_with_threshold(n: u32, ell: u64, guards: &Guards) -> Result<MeasureValue> {
    check_level(n, guards.exact)?;
    if ell == 0 {
        return Err(domain("threshold must be at least 1"));
    }
    let mut sum = ExactSum::new();
    let mut err = None;
    walk_words(n, |_, s, c| {
        if s == n as u64 {
            if let Err(e) = add_tail(&mut sum, c.p, c.q, c.pp, c.qp, c.sign(), ell) {
                err = Some(e);
            }
        }
        s < n as u64
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(MeasureValue::exact(sum.finish()))
}

/// Adds `1/(q(ℓq + q′))` as `σ(p/q − (ℓp + p′)/(ℓq + q′))`.
pub(crate) fn add_tail(
    sum: &mut ExactSum,
    p: u64,
    q: u64,
    pp: u64,
    qp: u64,
    sign: i128,
    ell: u64,
) -> Result<()> {
    let far_num = (ell as u128 * p as u128 + pp as u128) as i128;
    let far_den = ell
        .checked_mul(q)
        .and_then(|v| v.checked_add(qp))
        .ok_or(Error::Overflow)?;
    sum.add(sign * p as i128, q);
    sum.add(-sign * far_num, far_den);
    Ok(())
}
