//! Stern–Brocot sequences and the Farey tree of inverse-branch compositions.

use std::fmt;

use serde::Serialize;

use super::rational::{Fraction, Rational};
use crate::error::{check_guard, Error, Guards, Result};

/// An interval between adjacent fractions of some Stern–Brocot sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SBInterval {
    pub left: Fraction,
    pub right: Fraction,
    pub level: u32,
    /// 1-based position inside its level, when known.
    pub index: Option<u64>,
}

impl SBInterval {
    /// Builds an interval from two endpoints in either order and checks
    /// unimodularity.
    pub fn from_endpoints(a: Fraction, b: Fraction, level: u32) -> Result<Self> {
        let (left, right) = if a <= b { (a, b) } else { (b, a) };
        let iv = Self {
            left,
            right,
            level,
            index: None,
        };
        if !iv.is_unimodular() {
            return Err(Error::Domain(format!("[{left}, {right}] is not a Stern–Brocot interval")));
        }
        Ok(iv)
    }

    /// `s′t − st′ = 1` for endpoints `s/t < s′/t′`.
    pub fn is_unimodular(&self) -> bool {
        self.left.cross(self.right) == 1
    }

    /// Denominator of the diameter `1/(t t′)`.
    pub fn diameter_den(&self) -> u128 {
        self.left.den as u128 * self.right.den as u128
    }

    pub fn diameter(&self) -> Rational {
        Rational::new(1, self.diameter_den()).expect("positive denominator")
    }

    pub fn diameter_f64(&self) -> f64 {
        1.0 / self.diameter_den() as f64
    }

    /// Same endpoints, ignoring level and index.
    pub fn same_span(&self, other: &SBInterval) -> bool {
        self.left == other.left && self.right == other.right
    }

    pub fn span(&self) -> (Fraction, Fraction) {
        (self.left, self.right)
    }

    /// Strictly interior rational point, the mediant of the endpoints.
    pub fn mediant(&self) -> Result<Fraction> {
        self.left.mediant(self.right)
    }
}

impl fmt::Display for SBInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.left, self.right)
    }
}

impl Serialize for SBInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SBInterval", 5)?;
        st.serialize_field("left", &self.left.to_string())?;
        st.serialize_field("right", &self.right.to_string())?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("diameter", &format!("1/{}", self.diameter_den()))?;
        st.end()
    }
}

/// The `2^n + 1` fractions of the `n`-th Stern–Brocot sequence on `[0, 1]`.
pub fn sb_level(n: u32) -> Result<Vec<Fraction>> {
    sb_level_guarded(n, &Guards::default())
}

pub fn sb_level_guarded(n: u32, guards: &Guards) -> Result<Vec<Fraction>> {
    check_guard(n, guards.enumeration)?;
    let mut level = vec![Fraction::ZERO, Fraction::ONE];
    for _ in 0..n {
        let mut next = Vec::with_capacity(2 * level.len() - 1);
        for w in level.windows(2) {
            next.push(w[0]);
            next.push(w[0].mediant(w[1])?);
        }
        next.push(*level.last().unwrap());
        level = next;
    }
    Ok(level)
}

/// The `2^n` intervals of level `n` in increasing order.
pub fn sb_intervals(n: u32) -> Result<Vec<SBInterval>> {
    sb_intervals_guarded(n, &Guards::default())
}

pub fn sb_intervals_guarded(n: u32, guards: &Guards) -> Result<Vec<SBInterval>> {
    let level = sb_level_guarded(n, guards)?;
    Ok(level
        .windows(2)
        .enumerate()
        .map(|(k, w)| SBInterval {
            left: w[0],
            right: w[1],
            level: n,
            index: Some(k as u64 + 1),
        })
        .collect())
}

/// Möbius transformation `x ↦ (a x + b)/(c x + d)` with non-negative
/// entries and determinant `±1`, the composition of inverse Farey branches
/// along a code (first letter outermost).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mobius {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    /// `u₀(x) = x/(1+x)`.
    pub const U0: Mobius = Mobius {
        a: 1,
        b: 0,
        c: 1,
        d: 1,
    };

    /// `u₁(x) = 1/(1+x)`.
    pub const U1: Mobius = Mobius {
        a: 0,
        b: 1,
        c: 1,
        d: 1,
    };

    /// True when the map preserves orientation.
    pub fn increasing(&self) -> bool {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128 > 0
    }

    /// `self ∘ u₀`, the L child in the Farey tree.
    pub fn child_l(&self) -> Result<Mobius> {
        Ok(Mobius {
            a: self.a.checked_add(self.b).ok_or(Error::Overflow)?,
            b: self.b,
            c: self.c.checked_add(self.d).ok_or(Error::Overflow)?,
            d: self.d,
        })
    }

    /// `self ∘ u₁`, the R child in the Farey tree.
    pub fn child_r(&self) -> Result<Mobius> {
        Ok(Mobius {
            a: self.b,
            b: self.a.checked_add(self.b).ok_or(Error::Overflow)?,
            c: self.d,
            d: self.c.checked_add(self.d).ok_or(Error::Overflow)?,
        })
    }

    pub fn child(&self, right: bool) -> Result<Mobius> {
        if right {
            self.child_r()
        } else {
            self.child_l()
        }
    }

    /// Image of `0`, the endpoint inherited from the coarser level.
    pub fn at_zero(&self) -> Fraction {
        Fraction {
            num: self.b,
            den: self.d,
        }
    }

    /// Image of `1`, the endpoint created at this node's level.
    pub fn at_one(&self) -> Result<Fraction> {
        Ok(Fraction {
            num: self.a.checked_add(self.b).ok_or(Error::Overflow)?,
            den: self.c.checked_add(self.d).ok_or(Error::Overflow)?,
        })
    }

    pub fn interval(&self, level: u32) -> Result<SBInterval> {
        let z = self.at_zero();
        let o = self.at_one()?;
        let (left, right) = if self.increasing() { (z, o) } else { (o, z) };
        Ok(SBInterval {
            left,
            right,
            level,
            index: None,
        })
    }
}

/// A Farey tree node: the inverse-branch composition along a code together
/// with the code itself (bit `i` from the top is letter `i`, `1 = R`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FareyNode {
    pub map: Mobius,
    pub code: u64,
    pub depth: u32,
}

impl FareyNode {
    pub const ROOT: FareyNode = FareyNode {
        map: Mobius::IDENTITY,
        code: 0,
        depth: 0,
    };

    pub fn child(&self, right: bool) -> Result<FareyNode> {
        Ok(FareyNode {
            map: self.map.child(right)?,
            code: (self.code << 1) | right as u64,
            depth: self.depth + 1,
        })
    }

    /// The two children in increasing interval order.
    pub fn ordered_children(&self) -> Result<[FareyNode; 2]> {
        let l = self.child(false)?;
        let r = self.child(true)?;
        Ok(if self.map.increasing() { [l, r] } else { [r, l] })
    }

    pub fn ends_in_r(&self) -> bool {
        self.depth > 0 && self.code & 1 == 1
    }
}

/// All nodes at `depth` in increasing order of their intervals.
pub fn farey_level(depth: u32) -> Result<Vec<FareyNode>> {
    if depth > 63 {
        return Err(Error::Overflow);
    }
    let mut level = vec![FareyNode::ROOT];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for node in &level {
            next.extend(node.ordered_children()?);
        }
        level = next;
    }
    Ok(level)
}

/// All nodes at `depth` in canonical code order (L before R), the order of
/// a left-first depth-first traversal.
pub fn farey_frontier(depth: u32) -> Result<Vec<FareyNode>> {
    if depth > 63 {
        return Err(Error::Overflow);
    }
    let mut level = vec![FareyNode::ROOT];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for node in &level {
            next.push(node.child(false)?);
            next.push(node.child(true)?);
        }
        level = next;
    }
    Ok(level)
}

/// Visits the maps of all descendants of `root` at `extra` more levels,
/// left-first.
pub(crate) fn visit_leaves<F: FnMut(&Mobius)>(root: &Mobius, extra: u32, f: &mut F) {
    if extra == 0 {
        f(root);
        return;
    }
    let l = Mobius {
        a: root.a + root.b,
        b: root.b,
        c: root.c + root.d,
        d: root.d,
    };
    visit_leaves(&l, extra - 1, f);
    let r = Mobius {
        a: root.b,
        b: root.a + root.b,
        c: root.d,
        d: root.c + root.d,
    };
    visit_leaves(&r, extra - 1, f);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fr(s: &str) -> Fraction {
        let (p, q) = s.split_once('/').unwrap();
        Fraction::new(p.parse().unwrap(), q.parse().unwrap()).unwrap()
    }

    fn level_strings(n: u32) -> Vec<String> {
        sb_level(n).unwrap().iter().map(|f| f.to_string()).collect()
    }

    #[test]
    fn first_levels() {
        assert_eq!(level_strings(0), ["0/1", "1/1"]);
        assert_eq!(level_strings(2), ["0/1", "1/3", "1/2", "2/3", "1/1"]);
        assert_eq!(
            level_strings(3),
            ["0/1", "1/4", "1/3", "2/5", "1/2", "3/5", "2/3", "3/4", "1/1"]
        );
    }

    #[test]
    fn intervals_are_unimodular_and_indexed() {
        let ivs = sb_intervals(2).unwrap();
        let spans: Vec<_> = ivs.iter().map(|i| (i.left, i.right)).collect();
        assert_eq!(
            spans,
            [
                (fr("0/1"), fr("1/3")),
                (fr("1/3"), fr("1/2")),
                (fr("1/2"), fr("2/3")),
                (fr("2/3"), fr("1/1"))
            ]
        );
        for n in 0..=12 {
            let ivs = sb_intervals(n).unwrap();
            assert_eq!(ivs.len(), 1 << n);
            for (k, iv) in ivs.iter().enumerate() {
                assert!(iv.is_unimodular());
                assert_eq!(iv.index, Some(k as u64 + 1));
            }
        }
    }

    #[test]
    fn guard_rejects_large_levels() {
        let g = Guards {
            enumeration: 5,
            ..Guards::default()
        };
        assert!(matches!(
            sb_level_guarded(6, &g),
            Err(Error::LevelTooLarge { n: 6, guard: 5 })
        ));
        assert!(sb_level(31).is_err());
    }

    #[test]
    fn farey_level_matches_sb_intervals() {
        for n in 0..=10 {
            let nodes = farey_level(n).unwrap();
            let ivs = sb_intervals(n).unwrap();
            for (node, iv) in nodes.iter().zip(&ivs) {
                assert!(node.map.interval(n).unwrap().same_span(iv));
            }
        }
    }

    #[test]
    fn frontier_is_left_first_order() {
        let f = farey_frontier(3).unwrap();
        let codes: Vec<u64> = f.iter().map(|n| n.code).collect();
        assert_eq!(codes, (0..8).collect::<Vec<_>>());
        let mut seen = Vec::new();
        visit_leaves(&Mobius::IDENTITY, 3, &mut |m| seen.push(*m));
        assert_eq!(seen, f.iter().map(|n| n.map).collect::<Vec<_>>());
    }
}
