//! Checks that `T̂ⁿφ₀` decreases on `C₁` and stays non-decreasing and concave.

use std::fmt;

use serde::Serialize;

use super::grid::{Basis, DensityGrid, FareyOperator};
use crate::error::{domain, Result};

/// Slack for grid comparisons.
pub const GRID_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    NotDecreasing,
    NotMonotone,
    NotConcave,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::NotDecreasing => "not-decreasing",
            ViolationKind::NotMonotone => "not-monotone",
            ViolationKind::NotConcave => "not-concave",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub n: u64,
    pub node: usize,
    pub x: f64,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub n_max: u64,
    pub m: usize,
    /// `2x/(1+x)² < x` at every node of `[1/2, 1]`, in integer arithmetic.
    pub first_step_exact: bool,
    /// Smallest `T̂^{n−1}φ₀ − T̂ⁿφ₀` seen on `[1/2, 1]`.
    pub min_gap: f64,
    pub first_violation: Option<Violation>,
}

impl MonotoneReport {
    pub fn pass(&self) -> bool {
        self.first_step_exact && self.first_violation.is_none()
    }
}

fn shape_violation(v: &[f64]) -> Option<(usize, ViolationKind)> {
    if let Some(i) = (1..v.len()).find(|&i| v[i] < v[i - 1] - GRID_SLACK) {
        return Some((i, ViolationKind::NotMonotone));
    }
    (1..v.len() - 1)
        .find(|&i| v[i] < 0.5 * (v[i - 1] + v[i + 1]) - GRID_SLACK)
        .map(|i| (i, ViolationKind::NotConcave))
}

pub fn monotone_class_check(n_max: u64, m: usize) -> Result<MonotoneReport> {
    if n_max == 0 {
        return Err(domain("n_max must be at least 1"));
    }
    if m < 2 || m % 2 != 0 {
        return Err(domain("grid size must be even"));
    }
    let mm = m as u128;
    let first_step_exact = (m / 2..=m).all(|i| 2 * mm * mm < (mm + i as u128).pow(2));

    let op = FareyOperator::new(m)?;
    let mut prev = DensityGrid::from_fn(m, Basis::Mu, |x| x)?.values().to_vec();
    let mut next = vec![0.0; m + 1];
    let mut min_gap = f64::INFINITY;
    let mut first_violation = None;
    let found = |n: u64, node: usize, kind| Violation {
        n,
        node,
        x: node as f64 / m as f64,
        kind,
    };
    if let Some((node, kind)) = shape_violation(&prev) {
        first_violation = Some(found(0, node, kind));
    }
    for n in 1..=n_max {
        if first_violation.is_some() {
            break;
        }
        op.dual_apply_slice(&prev, &mut next);
        for i in m / 2..=m {
            let gap = prev[i] - next[i];
            min_gap = min_gap.min(gap);
            if gap <= -GRID_SLACK && first_violation.is_none() {
                first_violation = Some(found(n, i, ViolationKind::NotDecreasing));
            }
        }
        if first_violation.is_none() {
            first_violation = shape_violation(&next).map(|(i, k)| found(n, i, k));
        }
        std::mem::swap(&mut prev, &mut next);
    }
    Ok(MonotoneReport {
        n_max,
        m,
        first_step_exact,
        min_gap,
        first_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passes_on_moderate_grid() {
        let r = monotone_class_check(40, 1 << 10).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(r.min_gap > 0.0);
        assert!(monotone_class_check(0, 8).is_err());
        assert!(monotone_class_check(3, 7).is_err());
    }

    #[test]
    fn shape_detector() {
        assert_eq!(shape_violation(&[0.0, 1.0, 0.5]), Some((2, ViolationKind::NotMonotone)));
        assert_eq!(shape_violation(&[0.0, 0.1, 1.0]), Some((1, ViolationKind::NotConcave)));
        assert_eq!(shape_violation(&[0.0, 0.6, 1.0]), None);
    }
}
