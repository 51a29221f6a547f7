use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// What a grid's values are a density of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// Density with respect to Lebesgue measure (`Lⁿ1`).
    #[serde(rename = "d")]
    Lebesgue,
    /// Density with respect to `dμ = dx/x` (`T̂ⁿφ₀`).
    #[serde(rename = "h")]
    Mu,
}

impl Basis {
    pub fn tag(self) -> u32 {
        match self {
            Basis::Lebesgue => 0,
            Basis::Mu => 1,
        }
    }

    pub fn from_tag(tag: u32) -> Option<Self> {
        match tag {
            0 => Some(Basis::Lebesgue),
            1 => Some(Basis::Mu),
            _ => None,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Lebesgue => "d",
            Basis::Mu => "h",
        })
    }
}

/// Values at the `M + 1` nodes `i/M`, read as a piecewise-linear function.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid {
    values: Vec<f64>,
    basis: Basis,
}

impl DensityGrid {
    pub fn from_fn(m: usize, basis: Basis, f: impl Fn(f64) -> f64) -> Result<Self> {
        if m == 0 {
            return Err(domain("grid needs at least one interval"));
        }
        let values = (0..=m).map(|i| f(i as f64 / m as f64)).collect();
        Self::from_values(values, basis)
    }

    pub fn from_values(values: Vec<f64>, basis: Basis) -> Result<Self> {
        if values.len() < 2 {
            return Err(domain("grid needs at least two nodes"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(domain(format!("grid value {v} is not finite and non-negative")));
        }
        Ok(Self { values, basis })
    }

    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.m() as f64
    }

    /// Piecewise-linear interpolant at `x ∈ [0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        let m = self.m();
        let t = (x.clamp(0.0, 1.0)) * m as f64;
        let i = (t.floor() as usize).min(m - 1);
        let w = t - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Composite Simpson rule over `[0, 1]`; needs an even `M`.
    pub fn integral(&self) -> Result<f64> {
        simpson(&self.values, 1.0 / self.m() as f64)
    }

    /// Composite Simpson rule over `[1/2, 1]`; needs `M` divisible by 4.
    pub fn integral_upper_half(&self) -> Result<f64> {
        let m = self.m();
        if m % 4 != 0 {
            return Err(domain("grid size must be a multiple of 4"));
        }
        simpson(&self.values[m / 2..], 1.0 / m as f64)
    }
}

fn simpson(v: &[f64], h: f64) -> Result<f64> {
    let n = v.len() - 1;
    if n % 2 != 0 {
        return Err(domain("Simpson's rule needs an even number of intervals"));
    }
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, &x) in v.iter().enumerate().take(n).skip(1) {
        if i % 2 == 1 {
            odd += x;
        } else {
            even += x;
        }
    }
    Ok(h / 3.0 * (v[0] + v[n] + 4.0 * odd + 2.0 * even))
}

/// Precomputed interpolation stencils of the two inverse branches at the
/// nodes of a fixed grid.
#[derive(Clone, Debug)]
pub struct FareyOperator {
    m: usize,
    idx0: Vec<u32>,
    w0: Vec<f64>,
    idx1: Vec<u32>,
    w1: Vec<f64>,
}

const CHUNK: usize = 4096;

impl FareyOperator {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > u32::MAX as usize / 2 {
            return Err(domain("unsupported grid size"));
        }
        let stencil = |num: u128, den: u128| {
            let i = (num / den) as usize;
            let w = (num % den) as f64 / den as f64;
            if i >= m {
                (m as u32 - 1, 1.0)
            } else {
                (i as u32, w)
            }
        };
        let mut out = Self {
            m,
            idx0: Vec::with_capacity(m + 1),
            w0: Vec::with_capacity(m + 1),
            idx1: Vec::with_capacity(m + 1),
            w1: Vec::with_capacity(m + 1),
        };
        let mm = m as u128;
        for i in 0..=mm {
            // u₀(i/M)·M = M i/(M + i), u₁(i/M)·M = M²/(M + i).
            let (a, wa) = stencil(mm * i, mm + i);
            let (b, wb) = stencil(mm * mm, mm + i);
            out.idx0.push(a);
            out.w0.push(wa);
            out.idx1.push(b);
            out.w1.push(wb);
        }
        Ok(out)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn check(&self, g: &DensityGrid, basis: Basis) -> Result<()> {
        if g.m() != self.m {
            return Err(domain(format!("grid has M = {}, operator M = {}", g.m(), self.m)));
        }
        if g.basis() != basis {
            return Err(domain(format!("expected a {basis}-basis grid")));
        }
        Ok(())
    }

    #[inline]
    fn lerp(v: &[f64], i: u32, w: f64) -> f64 {
        let i = i as usize;
        v[i] * (1.0 - w) + v[i + 1] * w
    }

    /// `(Lf)(x) = [f(u₀x) + f(u₁x)]/(1+x)²` at every node.
    pub fn pf_apply_slice(&self, src: &[f64], dst: &mut [f64]) {
        let m = self.m as f64;
        dst.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
            for (k, y) in out.iter_mut().enumerate() {
                let i = c * CHUNK + k;
                let x = i as f64 / m;
                let s = Self::lerp(src, self.idx0[i], self.w0[i]) + Self::lerp(src, self.idx1[i], self.w1[i]);
                *y = s / ((1.0 + x) * (1.0 + x));
            }
        });
    }

    /// `(T̂g)(x) = [g(u₀x) + x g(u₁x)]/(1+x)` at every node.
    pub fn dual_apply_slice(&self, src: &[f64], dst: &mut [f64]) {
        let m = self.m as f64;
        dst.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
            for (k, y) in out.iter_mut().enumerate() {
                let i = c * CHUNK + k;
                let x = i as f64 / m;
                let s = Self::lerp(src, self.idx0[i], self.w0[i]) + x * Self::lerp(src, self.idx1[i], self.w1[i]);
                *y = s / (1.0 + x);
            }
        });
    }

    pub fn pf_apply(&self, f: &DensityGrid) -> Result<DensityGrid> {
        self.check(f, Basis::Lebesgue)?;
        let mut out = vec![0.0; self.m + 1];
        self.pf_apply_slice(f.values(), &mut out);
        Ok(DensityGrid {
            values: out,
            basis: Basis::Lebesgue,
        })
    }

    pub fn dual_apply(&self, g: &DensityGrid) -> Result<DensityGrid> {
        self.check(g, Basis::Mu)?;
        let mut out = vec![0.0; self.m + 1];
        self.dual_apply_slice(g.values(), &mut out);
        Ok(DensityGrid {
            values: out,
            basis: Basis::Mu,
        })
    }
}

/// One application of the Perron–Frobenius operator of the Farey map.
pub fn pf_apply(f: &DensityGrid) -> Result<DensityGrid> {
    FareyOperator::new(f.m())?.pf_apply(f)
}

/// One application of the dual operator `T̂`.
pub fn dual_apply(g: &DensityGrid) -> Result<DensityGrid> {
    FareyOperator::new(g.m())?.dual_apply(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    const M: usize = 1 << 12;

    #[test]
    fn pf_of_constant() {
        let one = DensityGrid::from_fn(M, Basis::Lebesgue, |_| 1.0).unwrap();
        let l = pf_apply(&one).unwrap();
        assert_eq!(l.values()[0], 2.0);
        assert_eq!(l.values()[M], 0.5);
        for (i, &v) in l.values().iter().enumerate() {
            let x = i as f64 / M as f64;
            assert!((v - 2.0 / ((1.0 + x) * (1.0 + x))).abs() < 1e-15);
        }
        assert!((l.integral_upper_half().unwrap() - 1.0 / 3.0).abs() < 1e-13);
        let zero = DensityGrid::from_fn(M, Basis::Lebesgue, |_| 0.0).unwrap();
        assert!(pf_apply(&zero).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dual_examples() {
        let phi = DensityGrid::from_fn(M, Basis::Mu, |x| x).unwrap();
        let t = dual_apply(&phi).unwrap();
        assert!((t.values()[M] - 0.5).abs() < 1e-15);
        for (i, &v) in t.values().iter().enumerate() {
            let x = i as f64 / M as f64;
            assert!((v - 2.0 * x / ((1.0 + x) * (1.0 + x))).abs() < 1e-7);
        }
        let c = DensityGrid::from_fn(M, Basis::Mu, |_| 1.0).unwrap();
        let tc = dual_apply(&c).unwrap();
        assert!(tc.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        // (T̂g)(1) = g(1/2).
        let g = DensityGrid::from_fn(M, Basis::Mu, |x| x.sqrt()).unwrap();
        assert!((dual_apply(&g).unwrap().values()[M] - g.values()[M / 2]).abs() < 1e-15);
    }

    #[test]
    fn basis_and_size_checked() {
        let op = FareyOperator::new(8).unwrap();
        let d = DensityGrid::from_fn(8, Basis::Lebesgue, |_| 1.0).unwrap();
        let h = DensityGrid::from_fn(8, Basis::Mu, |_| 1.0).unwrap();
        assert!(op.dual_apply(&d).is_err());
        assert!(op.pf_apply(&h).is_err());
        let d16 = DensityGrid::from_fn(16, Basis::Lebesgue, |_| 1.0).unwrap();
        assert!(op.pf_apply(&d16).is_err());
        assert!(DensityGrid::from_values(vec![1.0, -1.0], Basis::Mu).is_err());
        assert!(DensityGrid::from_fn(6, Basis::Mu, |_| 1.0).unwrap().integral_upper_half().is_err());
    }

    #[test]
    fn mass_is_conserved() {
        let m = 1 << 16;
        let op = FareyOperator::new(m).unwrap();
        let mut f = DensityGrid::from_fn(m, Basis::Lebesgue, |_| 1.0).unwrap();
        let mut mass = 1.0;
        for _ in 0..20 {
            f = op.pf_apply(&f).unwrap();
            let next = f.integral().unwrap();
            assert!((next - mass).abs() < 1e-8, "{mass} -> {next}");
            mass = next;
        }
    }

    #[test]
    fn conjugation_with_phi() {
        // T̂(g) = φ₀ · L(g/φ₀) away from 0.
        let g = DensityGrid::from_fn(M, Basis::Mu, |x| x / (1.0 + x)).unwrap();
        let f = DensityGrid::from_fn(M, Basis::Lebesgue, |x| 1.0 / (1.0 + x)).unwrap();
        let tg = dual_apply(&g).unwrap();
        let lf = pf_apply(&f).unwrap();
        for i in 1..=M {
            let x = i as f64 / M as f64;
            assert!((tg.values()[i] - x * lf.values()[i]).abs() < 1e-6);
        }
    }
}
