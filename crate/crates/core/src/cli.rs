//! Command-line front end: argument parsing, dispatch and table output.

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::diophantine::{monte_carlo, sample_one, DigitEvent, DEFAULT_BITS};
use crate::error::{domain, Error, Guards, Result};
use crate::exact_kernel::{
    apply_code, cf_cylinder_interval, code_of, code_to_cylinder, cylinder_to_farey, cylinder_to_sb, Alphabet,
    BinaryCode, CFWord, Rational,
};
use crate::pressure::{partition_probe, sandwich_check_guarded};
use crate::sum_level::{
    e_set_measure_guarded, enumerate_sum_level_guarded, complement_family_guarded, lambda_compensated_guarded,
    lambda_exact_guarded, level_family, FamilyTag, MeasureValue, Method,
};
use crate::transfer_operator::{
    monotone_class_check, run_lambda, Engine, OperatorConfig, RunOptions, DEFAULT_GRID,
};

/// Environment variable naming a directory for operator checkpoints.
pub const CHECKPOINT_DIR_VAR: &str = "SUMLEVEL_CHECKPOINT_DIR";

pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_CHECKPOINT: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "sumlevel", version, about = "Sum-level sets of continued fractions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Largest level for interval enumeration.
    #[arg(long, global = true, default_value_t = crate::error::DEFAULT_ENUMERATION_GUARD)]
    pub enumeration_guard: u32,
    /// Largest level for exact rational sums.
    #[arg(long, global = true, default_value_t = crate::error::DEFAULT_EXACT_GUARD)]
    pub exact_guard: u32,
    /// Largest level for compensated floating-point sums.
    #[arg(long, global = true, default_value_t = crate::error::DEFAULT_FLOAT_GUARD)]
    pub float_guard: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// λ(Cₙ), or λ(Eₙᵉ) with --eps.
    Measure(MeasureArgs),
    /// Intervals of Cₙ, Cₙᶜ, 𝒯ₙ or the even intervals with their codes.
    Enumerate(EnumerateArgs),
    /// Translate a code or a cylinder between the three codings.
    Codes(CodesArgs),
    /// Operator fidelity, trend and class checks.
    OperatorCheck(OperatorCheckArgs),
    /// Partition sums and pressure estimates.
    Pressure(PressureArgs),
    /// Digit statistics and Monte Carlo checks of random points.
    Dioph(DiophArgs),
}

#[derive(Args, Debug, Clone)]
pub struct LevelRange {
    /// A single level.
    #[arg(long, conflicts_with_all = ["from", "to"])]
    pub n: Option<u64>,
    #[arg(long, requires = "to")]
    pub from: Option<u64>,
    #[arg(long, requires = "from")]
    pub to: Option<u64>,
}

impl LevelRange {
    fn levels(&self) -> Result<Vec<u64>> {
        match (self.n, self.from, self.to) {
            (Some(n), _, _) => Ok(vec![n]),
            (None, Some(a), Some(b)) if a <= b => Ok((a..=b).collect()),
            (None, Some(_), Some(_)) => Err(domain("--from must not exceed --to")),
            _ => Err(domain("give --n or --from/--to")),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OperatorArgs {
    #[arg(long, value_enum, default_value_t = EngineArg::Induced)]
    pub engine: EngineArg,
    /// Grid size M for the grid engine.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Checkpoint file for long operator runs.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Iterations between checkpoint writes.
    #[arg(long, default_value_t = 10_000)]
    pub checkpoint_every: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Induced,
    Grid,
}

impl OperatorArgs {
    fn config(&self) -> OperatorConfig {
        OperatorConfig {
            engine: match self.engine {
                EngineArg::Induced => Engine::Induced,
                EngineArg::Grid => Engine::Grid,
            },
            grid: self.grid,
        }
    }

    fn options(&self) -> RunOptions {
        let config = self.config();
        let checkpoint = self.checkpoint.clone().or_else(|| {
            std::env::var_os(CHECKPOINT_DIR_VAR).map(|dir| {
                let name = match config.engine {
                    Engine::Induced => "induced.ckpt".to_string(),
                    Engine::Grid => format!("grid-{}.ckpt", config.grid),
                };
                PathBuf::from(dir).join(name)
            })
        });
        RunOptions {
            checkpoint,
            every: self.checkpoint_every,
            ..RunOptions::new()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Compensated,
    Operator,
    Auto,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub levels: LevelRange,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Measure Eₙᵉ instead of Cₙ (exact only).
    #[arg(long)]
    pub eps: Option<f64>,
    #[command(flatten)]
    pub operator: OperatorArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Coding {
    Farey,
    Sb,
    Cf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    C,
    CComplement,
    All,
    Even,
}

impl From<FamilyArg> for FamilyTag {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::C => FamilyTag::C,
            FamilyArg::CComplement => FamilyTag::Complement,
            FamilyArg::All => FamilyTag::All,
            FamilyArg::Even => FamilyTag::Even,
        }
    }
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Coding::Farey)]
    pub coding: Coding,
    #[arg(long, value_enum, default_value_t = FamilyArg::C)]
    pub family: FamilyArg,
}

#[derive(Args, Debug)]
pub struct CodesArgs {
    /// A word over {A,B} or {L,R}.
    #[arg(long, conflicts_with = "cylinder", required_unless_present = "cylinder")]
    pub code: Option<String>,
    /// A digit word such as [[1,2]].
    #[arg(long)]
    pub cylinder: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    /// λ from the operator against exact values.
    Fidelity,
    /// λ(Cₙ)·log₂n and λ(Cₙ)·log n at the requested levels.
    Trend,
    /// Σ_{k≤n} λ(C_k) / (n / log₂ n) at the requested levels.
    Cesaro,
    /// Decrease and shape of the dual iterates of x.
    Monotone,
}

#[derive(Args, Debug)]
pub struct OperatorCheckArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [CheckKind::Fidelity, CheckKind::Monotone])]
    pub check: Vec<CheckKind>,
    /// Largest level for fidelity and monotone checks.
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Levels for trend and Cesàro checks.
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<u64>>,
    /// Grid size for fidelity and monotone checks.
    #[arg(long)]
    pub check_grid: Option<usize>,
    #[command(flatten)]
    pub operator: OperatorArgs,
}

#[derive(Args, Debug)]
pub struct PressureArgs {
    #[command(flatten)]
    pub levels: LevelRange,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0])]
    pub t: Vec<f64>,
    #[arg(long, value_enum, default_value_t = FamilyArg::All)]
    pub family: FamilyArg,
    /// Report the sandwich check between Cₙ and 𝒯ₙ₋₁ instead.
    #[arg(long)]
    pub sandwich: bool,
}

#[derive(Args, Debug)]
pub struct DiophArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_BITS)]
    pub bits: u32,
    /// Statistic indices.
    #[arg(long, value_delimiter = ',', default_values_t = [3u64, 5, 10, 20])]
    pub n: Vec<u64>,
    /// Monte Carlo event instead of statistics: c:N, e:N:EPS or theta:N:EPS.
    #[arg(long)]
    pub event: Option<String>,
}

#[derive(Serialize)]
struct MeasureRow {
    n: u64,
    method: Method,
    exact: Option<Rational>,
    approx: f64,
}

#[derive(Serialize)]
struct EnumerateRow {
    n: u32,
    index: Option<u64>,
    code: Option<String>,
    left: String,
    right: String,
    diameter: Rational,
}

#[derive(Serialize)]
struct CodesRow {
    code: String,
    alphabet: &'static str,
    left: String,
    right: String,
    diameter: Rational,
    cylinder: Option<String>,
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    n: u64,
    value: f64,
    reference: f64,
    pass: bool,
}

#[derive(Serialize)]
struct PressureRow {
    n: u32,
    t: f64,
    family: FamilyTag,
    log_sum: f64,
    estimate: f64,
}

#[derive(Serialize)]
struct SandwichRow {
    n: u32,
    t: f64,
    factor: u32,
    min_ratio: Rational,
    max_ratio: Rational,
    per_pair: bool,
    sums: bool,
    sums_exact: bool,
    pass: bool,
}

#[derive(Serialize)]
struct DiophRow {
    sample_id: u64,
    n: u64,
    khintchine: Option<f64>,
    algebraic: Option<f64>,
    theta: Option<usize>,
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct MonteCarloRow {
    event: String,
    samples: u64,
    hits: u64,
    frequency: f64,
    exact: Rational,
    sigma: f64,
    z: f64,
    within_4_sigma: bool,
}

fn emit<T: Serialize>(rows: &[T], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(csv_error)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows).map_err(|e| Error::Io(e.into()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Io(io::Error::other(format!("{other:?}"))),
    }
}

fn measure(args: &MeasureArgs, guards: &Guards, format: Format, out: &mut dyn Write) -> Result<()> {
    let levels = args.levels.levels()?;
    let mut rows = Vec::new();
    if let Some(eps) = args.eps {
        for &n in &levels {
            let v = e_set_measure_guarded(to_u32(n)?, eps, guards)?;
            rows.push(row(n, v));
        }
        return emit(&rows, format, out);
    }
    let pick = |n: u64| match args.method {
        MethodArg::Auto if n <= guards.exact as u64 => Method::Exact,
        MethodArg::Auto if n <= guards.float as u64 => Method::Compensated,
        MethodArg::Auto | MethodArg::Operator => Method::Operator,
        MethodArg::Exact => Method::Exact,
        MethodArg::Compensated => Method::Compensated,
    };
    let operator_levels: Vec<u64> = levels.iter().copied().filter(|&n| pick(n) == Method::Operator).collect();
    let samples = if operator_levels.is_empty() {
        Vec::new()
    } else {
        run_lambda(&operator_levels, &args.operator.config(), &args.operator.options())?
    };
    for &n in &levels {
        let v = match pick(n) {
            Method::Exact => lambda_exact_guarded(to_u32(n)?, guards)?,
            Method::Compensated => lambda_compensated_guarded(to_u32(n)?, guards)?,
            Method::Operator => {
                let s = samples.iter().find(|s| s.n == n).expect("sampled level");
                MeasureValue::approx(s.lambda, Method::Operator)
            }
        };
        rows.push(row(n, v));
    }
    emit(&rows, format, out)
}

fn row(n: u64, v: MeasureValue) -> MeasureRow {
    MeasureRow {
        n,
        method: v.method,
        exact: v.exact,
        approx: v.approx,
    }
}

fn to_u32(n: u64) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::LevelTooLarge {
        n,
        guard: u32::MAX as u64,
    })
}

fn enumerate(args: &EnumerateArgs, guards: &Guards, format: Format, out: &mut dyn Write) -> Result<()> {
    let n = args.n;
    let family = match args.family {
        FamilyArg::C | FamilyArg::Even => enumerate_sum_level_guarded(n, guards)?,
        FamilyArg::CComplement => complement_family_guarded(n, guards)?,
        FamilyArg::All => level_family(n, guards)?,
    };
    let mut rows = Vec::new();
    if args.family == FamilyArg::Even {
        for (k, (l, r)) in family.merged_pairs()?.into_iter().enumerate() {
            rows.push(EnumerateRow {
                n,
                index: Some(k as u64 + 1),
                code: None,
                left: l.to_string(),
                right: r.to_string(),
                diameter: r.to_rational() - l.to_rational(),
            });
        }
        return emit(&rows, format, out);
    }
    for iv in &family.members {
        let code = if n == 0 {
            None
        } else {
            Some(match args.coding {
                Coding::Farey => code_of(iv, Alphabet::Farey)?.to_string(),
                Coding::Sb => code_of(iv, Alphabet::SternBrocot)?.to_string(),
                Coding::Cf => match code_to_cylinder(&code_of(iv, Alphabet::Farey)?) {
                    Ok(w) => w.to_string(),
                    Err(Error::Untranslatable(_)) => String::new(),
                    Err(e) => return Err(e),
                },
            })
        };
        rows.push(EnumerateRow {
            n,
            index: iv.index,
            code: code.filter(|c| !c.is_empty()),
            left: iv.left.to_string(),
            right: iv.right.to_string(),
            diameter: iv.diameter(),
        });
    }
    emit(&rows, format, out)
}

fn alphabet_name(a: Alphabet) -> &'static str {
    match a {
        Alphabet::Farey => "farey",
        Alphabet::SternBrocot => "sb",
    }
}

fn codes(args: &CodesArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    let codes: Vec<BinaryCode> = match (&args.code, &args.cylinder) {
        (Some(c), _) => vec![c.parse()?],
        (None, Some(w)) => {
            let word: CFWord = w.parse()?;
            vec![cylinder_to_farey(&word)?, cylinder_to_sb(&word)?]
        }
        (None, None) => return Err(domain("give --code or --cylinder")),
    };
    let mut rows = Vec::new();
    for code in codes {
        let iv = apply_code(&code)?;
        let cylinder = match code_to_cylinder(&code) {
            Ok(w) => {
                debug_assert!(cf_cylinder_interval(&w)?.same_span(&iv));
                Some(w.to_string())
            }
            Err(Error::Untranslatable(_)) => None,
            Err(e) => return Err(e),
        };
        rows.push(CodesRow {
            code: code.to_string(),
            alphabet: alphabet_name(code.alphabet()),
            left: iv.left.to_string(),
            right: iv.right.to_string(),
            diameter: iv.diameter(),
            cylinder,
        });
    }
    emit(&rows, format, out)
}

/// A check name, its limit and the sampled `(n, value)` pairs.
type NamedSeries = (&'static str, f64, Vec<(u64, f64)>);

fn strictly_closer(values: &[f64], limit: f64) -> Vec<bool> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| i == 0 || (v - limit).abs() < (values[i - 1] - limit).abs())
        .collect()
}

fn operator_check(args: &OperatorCheckArgs, guards: &Guards, format: Format, out: &mut dyn Write) -> Result<()> {
    let mut rows = Vec::new();
    for &kind in &args.check {
        match kind {
            CheckKind::Fidelity => {
                let n_max = args.n_max.unwrap_or(20).min(guards.exact as u64);
                let m = args.check_grid.unwrap_or(DEFAULT_GRID);
                let targets: Vec<u64> = (1..=n_max).collect();
                let samples = run_lambda(&targets, &OperatorConfig::grid(m), &RunOptions::new())?;
                for s in samples {
                    let exact = lambda_exact_guarded(to_u32(s.n)?, guards)?.approx;
                    let tol = if s.n == 2 { 1e-12 } else { 1e-4 * exact };
                    rows.push(CheckRow {
                        check: "fidelity",
                        n: s.n,
                        value: s.lambda,
                        reference: exact,
                        pass: (s.lambda - exact).abs() <= tol,
                    });
                }
            }
            CheckKind::Trend | CheckKind::Cesaro => {
                let default: Vec<u64> = if kind == CheckKind::Trend {
                    vec![100, 1000, 10_000, 100_000, 1_000_000]
                } else {
                    vec![1000, 10_000, 100_000]
                };
                let points = args.points.clone().unwrap_or(default);
                if points.iter().any(|&n| n < 2) {
                    return Err(domain("trend points must be at least 2"));
                }
                let samples = run_lambda(&points, &args.operator.config(), &args.operator.options())?;
                let series: Vec<NamedSeries> = if kind == CheckKind::Trend {
                    vec![
                        (
                            "r_n",
                            1.0,
                            samples.iter().map(|s| (s.n, s.lambda * (s.n as f64).log2())).collect(),
                        ),
                        (
                            "w_lambda",
                            std::f64::consts::LN_2,
                            samples.iter().map(|s| (s.n, s.lambda * (s.n as f64).ln())).collect(),
                        ),
                    ]
                } else {
                    vec![(
                        "cesaro_ratio",
                        1.0,
                        samples
                            .iter()
                            .map(|s| (s.n, s.cesaro / (s.n as f64 / (s.n as f64).log2())))
                            .collect(),
                    )]
                };
                for (name, limit, vals) in series {
                    let closer = strictly_closer(&vals.iter().map(|v| v.1).collect::<Vec<_>>(), limit);
                    for ((n, v), pass) in vals.into_iter().zip(closer) {
                        rows.push(CheckRow {
                            check: name,
                            n,
                            value: v,
                            reference: limit,
                            pass,
                        });
                    }
                }
            }
            CheckKind::Monotone => {
                let n_max = args.n_max.unwrap_or(100);
                let m = args.check_grid.unwrap_or(1 << 14);
                let r = monotone_class_check(n_max, m)?;
                rows.push(CheckRow {
                    check: "monotone",
                    n: r.first_violation.map_or(n_max, |v| v.n),
                    value: r.min_gap,
                    reference: 0.0,
                    pass: r.pass(),
                });
            }
        }
    }
    emit(&rows, format, out)
}

fn pressure(args: &PressureArgs, guards: &Guards, format: Format, out: &mut dyn Write) -> Result<()> {
    let levels = args.levels.levels()?;
    if args.sandwich {
        let mut rows = Vec::new();
        for &n in &levels {
            for &t in &args.t {
                let r = sandwich_check_guarded(to_u32(n)?, t, guards)?;
                rows.push(SandwichRow {
                    n: r.n,
                    t,
                    factor: r.factor,
                    pass: r.pass(),
                    min_ratio: r.min_ratio,
                    max_ratio: r.max_ratio,
                    per_pair: r.per_pair,
                    sums: r.sums,
                    sums_exact: r.sums_exact,
                });
            }
        }
        return emit(&rows, format, out);
    }
    let mut rows = Vec::new();
    for &n in &levels {
        for &t in &args.t {
            let p = partition_probe(to_u32(n)?, t, args.family.into(), guards)?;
            rows.push(PressureRow {
                n: p.n,
                t,
                family: p.family,
                log_sum: p.log_sum.value(),
                estimate: p.estimate,
            });
        }
    }
    emit(&rows, format, out)
}

fn parse_event(s: &str) -> Result<DigitEvent> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || domain(format!("cannot parse event {s:?}; use c:N, e:N:EPS or theta:N:EPS"));
    let n = || parts.get(1).and_then(|v| v.parse::<u32>().ok()).ok_or_else(bad);
    let eps = || parts.get(2).and_then(|v| v.parse::<f64>().ok()).ok_or_else(bad);
    match (parts[0], parts.len()) {
        ("c", 2) => Ok(DigitEvent::SumLevel { n: n()? }),
        ("e", 3) => Ok(DigitEvent::ESet { n: n()?, eps: eps()? }),
        ("theta", 3) => Ok(DigitEvent::ThetaTail { n: n()?, eps: eps()? }),
        _ => Err(bad()),
    }
}

fn dioph(args: &DiophArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    if args.samples == 0 {
        return Err(domain("--samples must be at least 1"));
    }
    if let Some(ev) = &args.event {
        let event = parse_event(ev)?;
        let r = monte_carlo(event, args.seed, args.samples, args.bits)?;
        let rows = [MonteCarloRow {
            event: ev.clone(),
            samples: r.samples,
            hits: r.hits,
            frequency: r.frequency,
            within_4_sigma: r.within(4.0),
            exact: r.exact,
            sigma: r.sigma,
            z: r.z,
        }];
        return emit(&rows, format, out);
    }
    let mut rows = Vec::new();
    for id in 0..args.samples {
        let s = sample_one(args.seed, id, args.bits)?;
        for &n in &args.n {
            let row = match s.stats(&[n]) {
                Ok(v) => {
                    let r = v[0];
                    DiophRow {
                        sample_id: id,
                        n,
                        khintchine: r.khintchine,
                        algebraic: r.algebraic,
                        theta: Some(r.theta),
                        ratio: r.ratio,
                    }
                }
                Err(Error::InsufficientDepth(_)) => DiophRow {
                    sample_id: id,
                    n,
                    khintchine: None,
                    algebraic: None,
                    theta: None,
                    ratio: None,
                },
                Err(e) => return Err(e),
            };
            rows.push(row);
        }
    }
    emit(&rows, format, out)
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::LevelTooLarge { .. } => EXIT_GUARD,
        Error::Checkpoint(_) => EXIT_CHECKPOINT,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_DOMAIN,
    }
}

/// Runs a parsed command, writing its table to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let guards = Guards {
        enumeration: cli.enumeration_guard,
        exact: cli.exact_guard,
        float: cli.float_guard,
    };
    let f = cli.format;
    match &cli.command {
        Command::Measure(a) => measure(a, &guards, f, out),
        Command::Enumerate(a) => enumerate(a, &guards, f, out),
        Command::Codes(a) => codes(a, f, out),
        Command::OperatorCheck(a) => operator_check(a, &guards, f, out),
        Command::Pressure(a) => pressure(a, &guards, f, out),
        Command::Dioph(a) => dioph(a, f, out),
    }
}

/// Parses `args`, runs the command against stdout and returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sumlevel: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("sumlevel").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        run(&cli, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn measure_table() {
        let t = table(&["measure", "--n", "4", "--method", "exact"]).unwrap();
        let mut lines = t.lines();
        assert_eq!(lines.next(), Some("n,method,exact,approx"));
        assert!(lines.next().unwrap().starts_with("4,exact,39/140,0.27857142857142"));
        let t = table(&["measure", "--from", "30", "--to", "30"]).unwrap();
        assert!(t.lines().nth(1).unwrap().starts_with("30,compensated,,0.1732226290165"));
    }

    #[test]
    fn enumerate_listing() {
        let t = table(&["enumerate", "--n", "4", "--coding", "farey"]).unwrap();
        let codes: Vec<&str> = t.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
        assert_eq!(codes, ["LLLR", "LLRR", "LRRR", "LRLR", "RRLR", "RRRR", "RLRR", "RLLR"]);
        assert!(t.starts_with("n,index,code,left,right,diameter\n"));
    }

    #[test]
    fn codes_table() {
        let t = table(&["codes", "--cylinder", "[[1,2]]"]).unwrap();
        assert_eq!(
            t,
            "code,alphabet,left,right,diameter,cylinder\nRLR,farey,2/3,3/4,1/12,\"[[1,2]]\"\nBBA,sb,2/3,3/4,1/12,\"[[1,2]]\"\n"
        );
        let t = table(&["codes", "--code", "RL"]).unwrap();
        assert!(t.ends_with("RL,farey,2/3,1/1,1/3,\n"));
    }

    #[test]
    fn pressure_and_json() {
        let t = table(&["pressure", "--n", "5", "--t", "0,1"]).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "n,t,family,log_sum,estimate");
        assert_eq!(lines[2], "5,1.0,all,0.0,0.0");
        let j = table(&["--format", "json", "measure", "--n", "2", "--method", "exact"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v[0]["exact"], "1/3");
    }

    #[test]
    fn exit_codes() {
        let guard = table(&["measure", "--n", "40", "--method", "exact"]).unwrap_err();
        assert_eq!(exit_code(&guard), EXIT_GUARD);
        assert_eq!(main_with(["sumlevel", "measure", "--bogus"]), EXIT_USAGE);
        assert_eq!(main_with(["sumlevel", "dioph", "--samples", "3"]), EXIT_USAGE);
        let e = table(&["codes", "--code", "AL"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_DOMAIN);
    }
}
