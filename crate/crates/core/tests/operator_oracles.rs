use std::f64::consts::PI;

use sumlevel::sum_level::lambda_exact;
use sumlevel::transfer_operator::{lambda_induced, lambda_operator, monotone_class_check};

const N: usize = 32;

/// Barycentric interpolant through Chebyshev points of the first kind on [1/2, 1].
struct Cheb {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Cheb {
    fn new() -> Self {
        let theta = |i: usize| (2 * i + 1) as f64 * PI / (2 * N) as f64;
        Self {
            nodes: (0..N).map(|i| 0.75 + 0.25 * theta(i).cos()).collect(),
            weights: (0..N).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * theta(i).sin()).collect(),
        }
    }

    fn eval(&self, values: &[f64], x: f64) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..N {
            let d = x - self.nodes[i];
            if d == 0.0 {
                return values[i];
            }
            let w = self.weights[i] / d;
            num += w * values[i];
            den += w;
        }
        num / den
    }
}

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// λ(C₁), …, λ(C_n) from the renewal recurrence summed term by term.
fn renewal_oracle(n: usize) -> Vec<f64> {
    let cheb = Cheb::new();
    let quad: Vec<(f64, f64)> = gauss_legendre(40).into_iter().map(|(t, w)| (0.75 + 0.25 * t, 0.25 * w)).collect();
    let mut hist: Vec<Vec<f64>> = vec![vec![1.0; N]];
    let mut out = vec![0.5];
    for j in 1..n {
        let h_at = |x: f64| {
            let mut s = 1.0 / (1.0 + j as f64 * x).powi(2);
            for k in 0..j {
                let a = 1.0 + (k + 1) as f64 * x;
                let z = (1.0 + k as f64 * x) / a;
                s += cheb.eval(&hist[j - 1 - k], z) / (a * a);
            }
            s
        };
        let values: Vec<f64> = cheb.nodes.iter().map(|&x| h_at(x)).collect();
        out.push(quad.iter().map(|&(x, w)| w * cheb.eval(&values, x)).sum());
        hist.push(values);
    }
    out
}

#[test]
fn induced_engine_matches_direct_renewal_sum() {
    let oracle = renewal_oracle(400);
    for n in [1usize, 2, 10, 33, 34, 100, 250, 400] {
        let v = lambda_induced(n as u64).unwrap();
        let rel = (v - oracle[n - 1]).abs() / oracle[n - 1];
        assert!(rel < 1e-11, "n={n}: {v} vs {} ({rel:e})", oracle[n - 1]);
    }
}

#[test]
fn grid_operator_tracks_exact_values() {
    let m = 1 << 16;
    for n in 1..=20u32 {
        let exact = lambda_exact(n).unwrap().approx;
        let v = lambda_operator(n as u64, m).unwrap().approx;
        assert!(((v - exact) / exact).abs() < 1e-4, "n={n}");
    }
    assert!((lambda_operator(2, m).unwrap().approx - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn dual_iterates_stay_in_class() {
    let r = monotone_class_check(100, 1 << 14).unwrap();
    assert!(r.pass(), "{r:?}");
}
