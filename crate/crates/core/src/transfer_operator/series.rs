//! Long operator runs, asymptotic series and checkpoint-driven resumption.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::checkpoint::Checkpoint;
use super::grid::{Basis, DensityGrid, FareyOperator};
use super::induced::{self, InducedEngine};
use crate::error::{domain, Error, Result};
use crate::exact_kernel::Rational;
use crate::numeric::Neumaier;
use crate::sum_level::{lambda_exact, MeasureValue, Method};

/// Discretisation used for operator iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Renewal recurrence on `[1/2, 1]` with spectral accuracy.
    Induced,
    /// Uniform grid with piecewise-linear interpolation.
    Grid,
}

impl Engine {
    fn tag(self) -> u32 {
        match self {
            Engine::Grid => 0,
            Engine::Induced => 1,
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Induced => "induced",
            Engine::Grid => "grid",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "induced" => Ok(Engine::Induced),
            "grid" => Ok(Engine::Grid),
            _ => Err(domain(format!("unknown engine {s:?}"))),
        }
    }
}

pub const DEFAULT_GRID: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OperatorConfig {
    pub engine: Engine,
    pub grid: usize,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            engine: Engine::Induced,
            grid: DEFAULT_GRID,
        }
    }
}

impl OperatorConfig {
    pub fn grid(m: usize) -> Self {
        Self {
            engine: Engine::Grid,
            grid: m,
        }
    }
}

/// `Lⁿ1` on a uniform grid with `λ(Cₙ₊₁)` read off by Simpson's rule.
#[derive(Clone, Debug)]
pub struct GridEngine {
    op: FareyOperator,
    f: Vec<f64>,
    scratch: Vec<f64>,
    n: u64,
    lambda: f64,
}

impl GridEngine {
    pub fn new(m: usize) -> Result<Self> {
        if m < 4 || m % 4 != 0 {
            return Err(domain("grid size must be a positive multiple of 4"));
        }
        let op = FareyOperator::new(m)?;
        let f = vec![1.0; m + 1];
        let mut e = Self {
            op,
            scratch: vec![0.0; m + 1],
            f,
            n: 1,
            lambda: 0.0,
        };
        e.update_lambda()?;
        Ok(e)
    }

    fn update_lambda(&mut self) -> Result<()> {
        let g = DensityGrid::from_values(self.f.clone(), Basis::Lebesgue)?;
        self.lambda = g.integral_upper_half()?;
        Ok(())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn density(&self) -> Result<DensityGrid> {
        DensityGrid::from_values(self.f.clone(), Basis::Lebesgue)
    }

    pub fn advance(&mut self) -> Result<()> {
        self.op.pf_apply_slice(&self.f, &mut self.scratch);
        std::mem::swap(&mut self.f, &mut self.scratch);
        self.n += 1;
        self.update_lambda()
    }

    fn from_state(m: usize, n: u64, values: &[f64]) -> Result<Self> {
        if values.len() != m + 1 {
            return Err(Error::Checkpoint("grid state has the wrong length".into()));
        }
        let mut e = Self::new(m)?;
        e.f = values.to_vec();
        e.n = n;
        e.update_lambda()?;
        Ok(e)
    }
}

/// `λ(Cₙ)` from `n − 1` grid applications of `L` to the constant 1.
pub fn lambda_operator(n: u64, m: usize) -> Result<MeasureValue> {
    lambda_operator_with(n, &OperatorConfig::grid(m))
}

pub fn lambda_operator_with(n: u64, config: &OperatorConfig) -> Result<MeasureValue> {
    if n == 0 {
        return Err(domain("level must be at least 1"));
    }
    let v = match config.engine {
        Engine::Induced => induced::lambda_induced(n)?,
        Engine::Grid => {
            let mut e = GridEngine::new(config.grid)?;
            while e.n() < n {
                e.advance()?;
            }
            e.lambda()
        }
    };
    Ok(MeasureValue::approx(v, Method::Operator))
}

enum AnyEngine {
    Induced(InducedEngine),
    Grid(GridEngine),
}

impl AnyEngine {
    fn new(config: &OperatorConfig) -> Result<Self> {
        Ok(match config.engine {
            Engine::Induced => AnyEngine::Induced(InducedEngine::new()),
            Engine::Grid => AnyEngine::Grid(GridEngine::new(config.grid)?),
        })
    }

    fn n(&self) -> u64 {
        match self {
            AnyEngine::Induced(e) => e.n(),
            AnyEngine::Grid(e) => e.n(),
        }
    }

    fn lambda(&self) -> f64 {
        match self {
            AnyEngine::Induced(e) => e.lambda(),
            AnyEngine::Grid(e) => e.lambda(),
        }
    }

    fn advance(&mut self) -> Result<()> {
        match self {
            AnyEngine::Induced(e) => {
                e.advance();
                Ok(())
            }
            AnyEngine::Grid(e) => e.advance(),
        }
    }

    fn state(&self) -> Vec<f64> {
        match self {
            AnyEngine::Induced(e) => e.state(),
            AnyEngine::Grid(e) => e.f.clone(),
        }
    }
}

fn header(config: &OperatorConfig) -> (u64, u64) {
    match config.engine {
        Engine::Induced => (induced::DEG as u64, induced::layout()),
        Engine::Grid => (config.grid as u64, 0),
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Checkpoint file; resumed from when it exists.
    pub checkpoint: Option<PathBuf>,
    /// Iterations between checkpoint writes.
    pub every: u64,
    /// Cesàro sums use exact values of `λ(C_k)` for `k` up to this level.
    pub exact_prefix: u32,
}

impl RunOptions {
    pub fn new() -> Self {
        Self {
            checkpoint: None,
            every: 10_000,
            exact_prefix: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaSample {
    pub n: u64,
    pub lambda: f64,
    /// `Σ_{k ≤ n} λ(C_k)`.
    pub cesaro: f64,
}

/// Runs one operator iteration past every requested level, recording
/// `λ(Cₙ)` and the running Cesàro sum there.
pub fn run_lambda(targets: &[u64], config: &OperatorConfig, opts: &RunOptions) -> Result<Vec<LambdaSample>> {
    let mut targets: Vec<u64> = targets.to_vec();
    targets.sort_unstable();
    targets.dedup();
    if targets.first() == Some(&0) {
        return Err(domain("levels start at 1"));
    }
    let Some(&last) = targets.last() else {
        return Ok(Vec::new());
    };
    let prefix: Vec<f64> = (1..=opts.exact_prefix)
        .map(|k| lambda_exact(k).map(|m| m.approx))
        .collect::<Result<_>>()?;
    let cesaro_term = |n: u64, v: f64| -> f64 {
        if n as usize <= prefix.len() {
            prefix[n as usize - 1]
        } else {
            v
        }
    };

    let (m_field, layout) = header(config);
    let mut recorded: Vec<LambdaSample> = Vec::new();
    let mut ces = Neumaier::new();
    let mut engine = match opts.checkpoint.as_ref().filter(|p| p.exists()) {
        Some(path) => {
            let ck = Checkpoint::load(path)?;
            if ck.engine != config.engine.tag() || ck.m != m_field || ck.layout != layout || ck.basis != Basis::Lebesgue.tag() {
                return Err(Error::Checkpoint(format!(
                    "{} was written by a different engine or grid size",
                    path.display()
                )));
            }
            let state_len = match config.engine {
                Engine::Induced => InducedEngine::state_len(),
                Engine::Grid => config.grid + 1,
            };
            if ck.values.len() < state_len + 4 {
                return Err(Error::Checkpoint("checkpoint payload too short".into()));
            }
            let (state, extra) = ck.values.split_at(state_len);
            let engine = match config.engine {
                Engine::Induced => AnyEngine::Induced(InducedEngine::from_state(state)?),
                Engine::Grid => AnyEngine::Grid(GridEngine::from_state(config.grid, ck.n, state)?),
            };
            if engine.n() != ck.n {
                return Err(Error::Checkpoint("step counter disagrees with header".into()));
            }
            ces = Neumaier::from_parts(extra[0], extra[1]);
            if extra[2] as u32 != opts.exact_prefix {
                return Err(Error::Checkpoint("checkpoint used a different exact prefix".into()));
            }
            let count = extra[3] as usize;
            if extra.len() != 4 + 3 * count {
                return Err(Error::Checkpoint("corrupt sample table".into()));
            }
            for t in extra[4..].chunks_exact(3) {
                recorded.push(LambdaSample {
                    n: t[0] as u64,
                    lambda: t[1],
                    cesaro: t[2],
                });
            }
            engine
        }
        None => {
            let e = AnyEngine::new(config)?;
            ces.add(cesaro_term(1, e.lambda()));
            e
        }
    };

    let resumed_at = engine.n();
    let mut out = Vec::with_capacity(targets.len());
    for &t in targets.iter().filter(|&&t| t < resumed_at) {
        match recorded.iter().find(|s| s.n == t) {
            Some(s) => out.push(*s),
            None => {
                return Err(Error::Checkpoint(format!(
                    "checkpoint is already at n = {resumed_at}, past the requested n = {t}"
                )))
            }
        }
    }
    let save = |engine: &AnyEngine, ces: &Neumaier, recorded: &[LambdaSample]| -> Result<()> {
        let Some(path) = &opts.checkpoint else {
            return Ok(());
        };
        let mut values = engine.state();
        let (s, c) = ces.parts();
        values.extend([s, c, opts.exact_prefix as f64, recorded.len() as f64]);
        for r in recorded {
            values.extend([r.n as f64, r.lambda, r.cesaro]);
        }
        Checkpoint {
            engine: config.engine.tag(),
            basis: Basis::Lebesgue.tag(),
            m: m_field,
            layout,
            n: engine.n(),
            values,
        }
        .save(path)
    };

    let mut pending = targets.iter().filter(|&&t| t >= resumed_at).peekable();
    loop {
        let n = engine.n();
        if pending.peek() == Some(&&n) {
            let s = LambdaSample {
                n,
                lambda: engine.lambda(),
                cesaro: ces.value(),
            };
            if !recorded.iter().any(|r| r.n == n) {
                recorded.push(s);
            }
            out.push(s);
            pending.next();
        }
        if n >= last {
            break;
        }
        engine.advance()?;
        ces.add(cesaro_term(engine.n(), engine.lambda()));
        if opts.every > 0 && engine.n() % opts.every == 0 {
            save(&engine, &ces, &recorded)?;
        }
    }
    save(&engine, &ces, &recorded)?;
    Ok(out)
}

/// Which law an asymptotic series tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    LambdaCn,
    Cesaro,
    Wandering,
    ReturnSeq,
    RatioToLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticSeries {
    pub law: Law,
    pub entries: Vec<(u64, f64)>,
}

impl AsymptoticSeries {
    pub fn new(law: Law, entries: Vec<(u64, f64)>) -> Result<Self> {
        if entries.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(domain("series indices must increase strictly"));
        }
        if entries.iter().any(|e| !e.1.is_finite()) {
            return Err(domain("series values must be finite"));
        }
        Ok(Self { law, entries })
    }

    /// Whether `|value − limit|` decreases strictly along the series.
    pub fn deviation_strictly_decreasing(&self, limit: f64) -> bool {
        deviation_strictly_decreasing(&self.entries.iter().map(|e| e.1).collect::<Vec<_>>(), limit)
    }
}

pub fn deviation_strictly_decreasing(values: &[f64], limit: f64) -> bool {
    values
        .windows(2)
        .all(|w| (w[1] - limit).abs() < (w[0] - limit).abs())
}

/// `Wₙ(C₁) = μ(⋃_{k<n} T^{−k} C₁) = log(n + 1)`.
pub fn wandering_rate(n: u64) -> f64 {
    ((n + 1) as f64).ln()
}

/// `νₙ = n / Wₙ(C₁)`.
pub fn return_sequence(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(domain("return sequence starts at n = 1"));
    }
    Ok(n as f64 / wandering_rate(n))
}

/// Which levels a series reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// `1, 10, 100, …` up to and including `n_max`.
    Decades,
    /// Every `k`-th level and `n_max`.
    Every(u64),
    Explicit(Vec<u64>),
}

impl Sampling {
    pub fn points(&self, n_max: u64) -> Vec<u64> {
        let mut v: Vec<u64> = match self {
            Sampling::Decades => std::iter::successors(Some(1u64), |x| x.checked_mul(10))
                .take_while(|&x| x <= n_max)
                .collect(),
            Sampling::Every(k) => (1..=n_max).filter(|n| n % (*k).max(1) == 0).collect(),
            Sampling::Explicit(v) => v.iter().copied().filter(|&x| x >= 1 && x <= n_max).collect(),
        };
        v.push(n_max);
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CesaroSeries {
    pub sums: AsymptoticSeries,
    /// `Σ_{k≤n} λ(C_k) / (n / log₂ n)` for `n ≥ 2`.
    pub ratios: AsymptoticSeries,
    /// `Σ_{k ≤ n_max} λ(C_k)` exactly, for small `n_max`.
    pub exact_sum: Option<Rational>,
}

pub fn cesaro_series(
    n_max: u64,
    sampling: &Sampling,
    config: &OperatorConfig,
    opts: &RunOptions,
) -> Result<CesaroSeries> {
    if n_max == 0 {
        return Err(domain("n_max must be at least 1"));
    }
    let samples = run_lambda(&sampling.points(n_max), config, opts)?;
    let sums = samples.iter().map(|s| (s.n, s.cesaro)).collect();
    let ratios = samples
        .iter()
        .filter(|s| s.n >= 2)
        .map(|s| (s.n, s.cesaro / (s.n as f64 / (s.n as f64).log2())))
        .collect();
    let exact_sum = if n_max <= crate::error::DEFAULT_EXACT_GUARD as u64 {
        let mut total = Rational::zero();
        for k in 1..=n_max as u32 {
            total = total + lambda_exact(k)?.exact.expect("exact value");
        }
        Some(total)
    } else {
        None
    };
    Ok(CesaroSeries {
        sums: AsymptoticSeries::new(Law::Cesaro, sums)?,
        ratios: AsymptoticSeries::new(Law::RatioToLimit, ratios)?,
        exact_sum,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrendRow {
    pub n: u64,
    pub lambda: f64,
    /// `λ(Cₙ) log₂ n`.
    pub r: f64,
    /// `W_{n−1}(C₁) λ(Cₙ) = λ(Cₙ) log n`.
    pub w_lambda: f64,
    pub cesaro: f64,
    /// `Σ_{k≤n} λ(C_k) / (n / log₂ n)`.
    pub cesaro_ratio: f64,
}

/// The quantities behind the asymptotic laws at the requested levels.
pub fn trend_rows(targets: &[u64], config: &OperatorConfig, opts: &RunOptions) -> Result<Vec<TrendRow>> {
    if targets.iter().any(|&n| n < 2) {
        return Err(domain("trend rows need n ≥ 2"));
    }
    let samples = run_lambda(targets, config, opts)?;
    Ok(samples
        .iter()
        .map(|s| {
            let nf = s.n as f64;
            TrendRow {
                n: s.n,
                lambda: s.lambda,
                r: s.lambda * nf.log2(),
                w_lambda: wandering_rate(s.n - 1) * s.lambda,
                cesaro: s.cesaro,
                cesaro_ratio: s.cesaro / (nf / nf.log2()),
            }
        })
        .collect())
}
