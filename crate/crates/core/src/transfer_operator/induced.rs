//! Iteration of `Lⁿ1` restricted to `[1/2, 1]` through a renewal recurrence.
//!
//! Writing `h_j` for `L^j 1` on `[1/2, 1]`, every excursion of the Farey
//! map below `1/2` returns after a known number of steps, which gives
//!
//! ```text
//! h_j(x) = 1/(1 + j x)² + Σ_{k=0}^{j−1} h_{j−1−k}(z_k(x)) w_k(x),
//! z_k = (1 + k x)/(1 + (k+1) x),   w_k = 1/(1 + (k+1) x)²,
//! ```
//!
//! with `h_0 = 1` and `λ(C_{j+1}) = ∫_{1/2}^1 h_j`. Each `h_j` is stored as
//! a Chebyshev series on `[1/2, 1]`. The first `HEAD` terms of the history
//! sum are evaluated directly. For the remaining terms `1 − z_k = 1/(k + c)`
//! with `c = 1 + 1/x`, so `h` is replaced by its Taylor polynomial at `z = 1`
//! and the powers `(k + c)^{−s}` by a sum of exponentials, which turns the
//! history sum into a fixed-size state updated once per step.

use crate::error::{Error, Result};

pub(crate) const DEG: usize = 24;
const NODES: usize = DEG + 1;
pub(crate) const HEAD: usize = 32;
pub(crate) const TAYLOR: usize = 10;
const POWERS: usize = TAYLOR + 1;
const U_MIN: f64 = -28.0;
const U_MAX: f64 = 1.5;
const U_STEP: f64 = 0.25;

fn exp_nodes() -> usize {
    ((U_MAX - U_MIN) / U_STEP).round() as usize + 1
}

/// Identifies the discretisation in checkpoints.
pub(crate) fn layout() -> u64 {
    DEG as u64 | (HEAD as u64) << 8 | (TAYLOR as u64) << 16 | (exp_nodes() as u64) << 24
}

fn gamma_int(s: usize) -> f64 {
    (1..s).map(|k| k as f64).product()
}

/// Chebyshev polynomials `T_0(t) … T_DEG(t)`.
fn cheb_row(t: f64) -> [f64; NODES] {
    let mut row = [0.0; NODES];
    row[0] = 1.0;
    row[1] = t;
    for m in 2..NODES {
        row[m] = 2.0 * t * row[m - 1] - row[m - 2];
    }
    row
}

/// Shared tables for one discretisation.
struct Tables {
    x: [f64; NODES],
    /// `coef = dct · values`.
    dct: [[f64; NODES]; NODES],
    /// `∫_{1/2}^1 Σ c_m T_m = quad · c`.
    quad: [f64; NODES],
    /// `head[k][i][m] = T_m(4 z_k(x_i) − 3) w_k(x_i)`.
    head: Vec<[[f64; NODES]; NODES]>,
    /// Taylor coefficients in `v = 1 − z`: `a = taylor · c`.
    taylor: [[f64; NODES]; POWERS],
    /// `decay[r] = e^{−t_r}`.
    decay: Vec<f64>,
    /// `tail[i][p][r]`, the weight of state `S_{r,p}` at node `i`.
    tail: Vec<[Vec<f64>; POWERS]>,
}

impl Tables {
    fn new() -> Self {
        let n = NODES as f64;
        let mut t = [0.0; NODES];
        let mut x = [0.0; NODES];
        for i in 0..NODES {
            t[i] = (std::f64::consts::PI * (i as f64 + 0.5) / n).cos();
            x[i] = (t[i] + 3.0) / 4.0;
        }
        let mut dct = [[0.0; NODES]; NODES];
        for (i, &ti) in t.iter().enumerate() {
            let row = cheb_row(ti);
            for m in 0..NODES {
                dct[m][i] = row[m] * if m == 0 { 1.0 / n } else { 2.0 / n };
            }
        }
        let mut quad = [0.0; NODES];
        for (m, q) in quad.iter_mut().enumerate() {
            if m % 2 == 0 {
                *q = 0.25 * 2.0 / (1.0 - (m * m) as f64);
            }
        }
        let mut head = Vec::with_capacity(HEAD);
        for k in 0..HEAD {
            let mut block = [[0.0; NODES]; NODES];
            for (i, &xi) in x.iter().enumerate() {
                let den = 1.0 + (k as f64 + 1.0) * xi;
                let z = (1.0 + k as f64 * xi) / den;
                let row = cheb_row(4.0 * z - 3.0);
                let w = 1.0 / (den * den);
                for m in 0..NODES {
                    block[i][m] = row[m] * w;
                }
            }
            head.push(block);
        }
        // T_m(1 − 4v) = Σ_p (−4)^p T_m^{(p)}(1)/p! v^p with
        // T_m^{(p)}(1) = Π_{l<p} (m² − l²)/(2l + 1).
        let mut taylor = [[0.0; NODES]; POWERS];
        for m in 0..NODES {
            let mut d = 1.0;
            let mut fact = 1.0;
            for (p, row) in taylor.iter_mut().enumerate() {
                if p > m {
                    break;
                }
                row[m] = (-4.0f64).powi(p as i32) * d / fact;
                let l = p as f64;
                d *= ((m * m) as f64 - l * l) / (2.0 * l + 1.0);
                fact *= l + 1.0;
            }
        }
        let r_count = exp_nodes();
        let ts: Vec<f64> = (0..r_count)
            .map(|r| (U_MIN + r as f64 * U_STEP).exp())
            .collect();
        let decay = ts.iter().map(|t| (-t).exp()).collect();
        // (k + c)^{−s} ≈ Σ_r U_STEP t_r^s e^{−(k + c) t_r}/Γ(s); the factor
        // e^{−(HEAD + c) t_r} is folded into the weights.
        let tail = x
            .iter()
            .map(|&xi| {
                let c = 1.0 + 1.0 / xi;
                std::array::from_fn(|p| {
                    let s = p + 2;
                    let g = gamma_int(s);
                    ts.iter()
                        .map(|&tr| {
                            U_STEP * tr.powi(s as i32) * (-(HEAD as f64 + c) * tr).exp() / g / (xi * xi)
                        })
                        .collect()
                })
            })
            .collect();
        Self {
            x,
            dct,
            quad,
            head,
            taylor,
            decay,
            tail,
        }
    }
}

fn tables() -> &'static Tables {
    static TABLES: std::sync::OnceLock<Tables> = std::sync::OnceLock::new();
    TABLES.get_or_init(Tables::new)
}

/// Renewal-recurrence engine for `λ(Cₙ)`, `O(1)` work per step.
#[derive(Clone, Debug)]
pub struct InducedEngine {
    /// Index of the newest series `h_j`.
    j: u64,
    /// `coefs[j mod HEAD]`.
    coefs: Vec<[f64; NODES]>,
    /// `taylor[j mod (HEAD + 1)]`.
    taylor: Vec<[f64; POWERS]>,
    /// `state[p][r]`.
    state: Vec<Vec<f64>>,
    lambda: f64,
}

impl Default for InducedEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl InducedEngine {
    pub fn new() -> Self {
        let tb = tables();
        let mut first = [0.0; NODES];
        first[0] = 1.0;
        let mut e = Self {
            j: 0,
            coefs: vec![[0.0; NODES]; HEAD],
            taylor: vec![[0.0; POWERS]; HEAD + 1],
            state: vec![vec![0.0; tb.decay.len()]; POWERS],
            lambda: 0.0,
        };
        e.store(first);
        e
    }

    /// `n` such that [`lambda`](Self::lambda) is `λ(Cₙ)`.
    pub fn n(&self) -> u64 {
        self.j + 1
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn store(&mut self, c: [f64; NODES]) {
        let tb = tables();
        let mut a = [0.0; POWERS];
        for (p, ap) in a.iter_mut().enumerate() {
            *ap = (0..NODES).map(|m| tb.taylor[p][m] * c[m]).sum();
        }
        self.lambda = (0..NODES).map(|m| tb.quad[m] * c[m]).sum();
        self.coefs[(self.j % HEAD as u64) as usize] = c;
        self.taylor[(self.j % (HEAD as u64 + 1)) as usize] = a;
    }

    pub fn advance(&mut self) {
        let tb = tables();
        let jn = self.j + 1;
        let head_len = (jn as usize).min(HEAD);
        if jn > HEAD as u64 {
            // S(J) = e^{−t} S(J−1) + a_{J−1−HEAD}.
            let a = self.taylor[((jn - 1 - HEAD as u64) % (HEAD as u64 + 1)) as usize];
            for (p, row) in self.state.iter_mut().enumerate() {
                for (s, d) in row.iter_mut().zip(&tb.decay) {
                    *s = *s * d + a[p];
                }
            }
        }
        let mut values = [0.0; NODES];
        for (i, v) in values.iter_mut().enumerate() {
            let d = 1.0 + jn as f64 * tb.x[i];
            let mut acc = 1.0 / (d * d);
            for k in 0..head_len {
                let c = &self.coefs[((jn - 1 - k as u64) % HEAD as u64) as usize];
                let row = &tb.head[k][i];
                acc += row.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
            }
            if jn > HEAD as u64 {
                for p in 0..POWERS {
                    acc += tb.tail[i][p]
                        .iter()
                        .zip(&self.state[p])
                        .map(|(w, s)| w * s)
                        .sum::<f64>();
                }
            }
            *v = acc;
        }
        let mut c = [0.0; NODES];
        for (m, cm) in c.iter_mut().enumerate() {
            *cm = tb.dct[m].iter().zip(&values).map(|(a, b)| a * b).sum();
        }
        self.j = jn;
        self.store(c);
    }

    /// Advances until `n() == n`.
    pub fn advance_to(&mut self, n: u64) {
        while self.n() < n {
            self.advance();
        }
    }

    /// Flat state for checkpoints: `j`, the coefficient ring, the Taylor
    /// ring and the exponential-sum state.
    pub fn state(&self) -> Vec<f64> {
        let mut out = vec![self.j as f64];
        out.extend(self.coefs.iter().flatten());
        out.extend(self.taylor.iter().flatten());
        out.extend(self.state.iter().flatten());
        out
    }

    pub fn state_len() -> usize {
        1 + HEAD * NODES + (HEAD + 1) * POWERS + POWERS * exp_nodes()
    }

    pub fn from_state(values: &[f64]) -> Result<Self> {
        if values.len() != Self::state_len() {
            return Err(Error::Checkpoint(format!(
                "induced state has {} values, expected {}",
                values.len(),
                Self::state_len()
            )));
        }
        let j = values[0];
        if !(j >= 0.0 && j.fract() == 0.0) {
            return Err(Error::Checkpoint("corrupt step counter".into()));
        }
        let mut it = values[1..].iter().copied();
        let mut take = |n: usize| -> Vec<f64> { it.by_ref().take(n).collect() };
        let coefs = (0..HEAD)
            .map(|_| take(NODES).try_into().unwrap())
            .collect::<Vec<[f64; NODES]>>();
        let taylor = (0..=HEAD)
            .map(|_| take(POWERS).try_into().unwrap())
            .collect::<Vec<[f64; POWERS]>>();
        let state = (0..POWERS).map(|_| take(exp_nodes())).collect();
        let j = j as u64;
        let tb = tables();
        let c = coefs[(j % HEAD as u64) as usize];
        let lambda = (0..NODES).map(|m| tb.quad[m] * c[m]).sum();
        Ok(Self {
            j,
            coefs,
            taylor,
            state,
            lambda,
        })
    }
}

/// `λ(Cₙ)` from the renewal engine.
pub fn lambda_induced(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(crate::error::domain("level must be at least 1"));
    }
    let mut e = InducedEngine::new();
    e.advance_to(n);
    Ok(e.lambda())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_sum_matches_powers() {
        let ts: Vec<f64> = (0..exp_nodes())
            .map(|r| (U_MIN + r as f64 * U_STEP).exp())
            .collect();
        for s in 2..=TAYLOR + 2 {
            for y in [34.0, 35.7, 100.0, 1234.5, 1e5, 2e6] {
                let approx: f64 = ts
                    .iter()
                    .map(|t| U_STEP * t.powi(s as i32) * (-y * t).exp())
                    .sum::<f64>()
                    / gamma_int(s);
                let exact = y.powi(-(s as i32));
                assert!(((approx - exact) / exact).abs() < 1e-12 * 4f64.powi(s as i32), "s={s} y={y}");
            }
        }
    }

    #[test]
    fn first_values() {
        let mut e = InducedEngine::new();
        assert!((e.lambda() - 0.5).abs() < 1e-15);
        e.advance();
        assert!((e.lambda() - 1.0 / 3.0).abs() < 1e-15);
        e.advance();
        assert!((e.lambda() - 0.3).abs() < 1e-15);
        e.advance();
        assert!((e.lambda() - 39.0 / 140.0).abs() < 1e-15);
        assert_eq!(e.n(), 4);
    }

    #[test]
    fn state_round_trip() {
        let mut e = InducedEngine::new();
        e.advance_to(50);
        let mut r = InducedEngine::from_state(&e.state()).unwrap();
        assert_eq!(r.lambda(), e.lambda());
        e.advance_to(80);
        r.advance_to(80);
        assert_eq!(r.lambda(), e.lambda());
        assert!(InducedEngine::from_state(&[1.0, 2.0]).is_err());
    }
}
