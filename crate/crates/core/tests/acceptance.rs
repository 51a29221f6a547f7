//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p sumlevel --test acceptance`.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::Instant;

use sumlevel::diophantine::{monte_carlo, DigitEvent, DEFAULT_BITS};
use sumlevel::error::Result;
use sumlevel::exact_kernel::{
    apply_code, cf_cylinder_interval, code_of, code_to_cylinder, walk_words, Alphabet, CFWord, Fraction, Rational,
};
use sumlevel::pressure::{partition_probe, pressure_estimate, sandwich_check};
use sumlevel::sum_level::{
    e_set_measure, e_set_threshold, enumerate_sum_level, lambda_by_compositions, lambda_exact, pullback_check,
    FamilyTag,
};
use sumlevel::transfer_operator::{run_lambda, trend_rows, OperatorConfig, RunOptions};
use sumlevel::Guards;

const SEED: u64 = 20240601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn exact(n: u32) -> Result<Rational> {
    Ok(lambda_exact(n)?.exact.expect("exact sum"))
}

fn golden_values() -> Result<Outcome> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_sumlevel"))
        .args(["measure", "--from", "1", "--to", "4", "--method", "exact"])
        .output()?;
    let secs = start.elapsed().as_secs_f64();
    let text = String::from_utf8_lossy(&out.stdout);
    let got: Vec<&str> = text.lines().skip(1).filter_map(|l| l.split(',').nth(2)).collect();
    let want = ["1/2", "1/3", "3/10", "39/140"];
    outcome(
        out.status.success() && got == want && secs < 1.0,
        format!("{} in {secs:.3} s", got.join(" ")),
    )
}

fn strict_decrease() -> Result<Outcome> {
    let values = (1..=25).map(exact).collect::<Result<Vec<_>>>()?;
    let bad: Vec<usize> = (0..24).filter(|&i| values[i + 1] >= values[i]).map(|i| i + 1).collect();
    outcome(bad.is_empty(), format!("λ(C₂₅) = {:.15}, violations at {bad:?}", values[24].to_f64()))
}

fn pullback() -> Result<Outcome> {
    let bad: Vec<u32> = (1..=15).filter(|&n| !pullback_check(n).unwrap_or(false)).collect();
    outcome(bad.is_empty(), format!("n = 1..15, failures {bad:?}"))
}

fn dual_representation() -> Result<Outcome> {
    let mut bad = Vec::new();
    for n in 1..=20 {
        if exact(n)? != lambda_by_compositions(n)?.exact.expect("exact sum") {
            bad.push(n);
        }
    }
    outcome(bad.is_empty(), format!("n = 1..20, mismatches {bad:?}"))
}

fn operator_fidelity() -> Result<Outcome> {
    let targets: Vec<u64> = (1..=20).collect();
    let samples = run_lambda(&targets, &OperatorConfig::grid(1 << 16), &RunOptions::new())?;
    let mut worst = (0u64, 0.0f64);
    for s in &samples {
        let e = exact(s.n as u32)?.to_f64();
        let rel = (s.lambda - e).abs() / e;
        if rel > worst.1 {
            worst = (s.n, rel);
        }
    }
    let at_two = (samples[1].lambda - 1.0 / 3.0).abs();
    outcome(
        worst.1 <= 1e-4 && at_two <= 1e-12,
        format!("max rel err {:.2e} at n={}, |λ₂ − 1/3| = {at_two:.1e}", worst.1, worst.0),
    )
}

fn strictly_closer(values: &[f64], limit: f64) -> bool {
    values.windows(2).all(|w| (w[1] - limit).abs() < (w[0] - limit).abs())
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" ")
}

fn trends() -> Result<(Outcome, Outcome)> {
    let targets = [100, 1_000, 10_000, 100_000, 1_000_000];
    let rows = trend_rows(&targets, &OperatorConfig::default(), &RunOptions::new())?;
    let r: Vec<f64> = rows.iter().map(|t| t.r).collect();
    let w: Vec<f64> = rows.iter().map(|t| t.w_lambda).collect();
    let c: Vec<f64> = rows[1..4].iter().map(|t| t.cesaro_ratio).collect();
    let six = Outcome {
        pass: strictly_closer(&r, 1.0) && strictly_closer(&w, std::f64::consts::LN_2),
        detail: format!("r_n: {}; W·λ: {} (→ {:.6})", fmt_list(&r), fmt_list(&w), std::f64::consts::LN_2),
    };
    let seven = Outcome {
        pass: strictly_closer(&c, 1.0),
        detail: format!("ratios at 10³,10⁴,10⁵: {}", fmt_list(&c)),
    };
    Ok((six, seven))
}

fn pressure() -> Result<Outcome> {
    let guards = Guards::default();
    let mut special = true;
    for n in 1..=20 {
        special &= pressure_estimate(n, 1.0, FamilyTag::All)? == 0.0;
        special &= pressure_estimate(n, 0.0, FamilyTag::All)? == std::f64::consts::LN_2;
        special &= partition_probe(n, 1.0, FamilyTag::All, &guards)?.exact == Some(Rational::one());
    }
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 2..=15 {
        for t in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
            let r = sandwich_check(n, t)?;
            checked += r.pairs;
            if !(r.pass() && r.per_pair) {
                failures.push((n, t));
            }
        }
    }
    outcome(
        special && failures.is_empty(),
        format!("special values exact: {special}; sandwich over {checked} pairs, failures {failures:?}"),
    )
}

fn e_set_sandwich() -> Result<Outcome> {
    let mut bad = Vec::new();
    for n in 5..=20 {
        let c = exact(n)?;
        for eps in [0.5, 1.0] {
            let ell = Rational::from_integer(e_set_threshold(n, eps)?);
            let e = e_set_measure(n, eps)?.exact.expect("exact sum");
            if !(c.clone() / ell.clone() <= e && e <= Rational::from_integer(2) * c.clone() / ell) {
                bad.push((n, eps));
            }
        }
    }
    outcome(bad.is_empty(), format!("n = 5..20, ε ∈ {{0.5, 1}}, failures {bad:?}"))
}

fn sampler() -> Result<Outcome> {
    let events = [
        DigitEvent::SumLevel { n: 5 },
        DigitEvent::SumLevel { n: 10 },
        DigitEvent::SumLevel { n: 15 },
        DigitEvent::ESet { n: 15, eps: 0.5 },
        DigitEvent::ThetaTail { n: 15, eps: 0.5 },
    ];
    let mut pass = true;
    let mut zs = Vec::new();
    let mut hits = Vec::new();
    for ev in events {
        let r = monte_carlo(ev, SEED, 100_000, DEFAULT_BITS)?;
        pass &= r.within(4.0);
        zs.push(format!("{:+.2}", r.z));
        hits.push(r.hits);
    }
    let deterministic = monte_carlo(events[0], SEED, 100_000, DEFAULT_BITS)?.hits == hits[0];
    outcome(
        pass && deterministic,
        format!("z = {} (C₅ C₁₀ C₁₅ E₁₅ θ-tail), repeatable: {deterministic}", zs.join(" ")),
    )
}

type Span = (Fraction, Fraction);

fn coding_bijections() -> Result<Outcome> {
    let mut agree = true;
    for n in 1..=12u32 {
        let fam = enumerate_sum_level(n)?;
        let direct: BTreeSet<Span> = fam.members.iter().map(|iv| iv.span()).collect();
        let mut farey = BTreeSet::new();
        let mut sb = BTreeSet::new();
        let mut cf = BTreeSet::new();
        for (iv, code) in fam.members.iter().zip(&fam.codes) {
            farey.insert(apply_code(code)?.span());
            sb.insert(apply_code(&code_of(iv, Alphabet::SternBrocot)?)?.span());
            cf.insert(cf_cylinder_interval(&code_to_cylinder(code)?)?.span());
        }
        let mut comps = BTreeSet::new();
        let mut err = None;
        walk_words(n, |w, s, _| {
            if s == n as u64 {
                match CFWord::new(w.to_vec()).and_then(|w| cf_cylinder_interval(&w)) {
                    Ok(iv) => {
                        comps.insert(iv.span());
                    }
                    Err(e) => err = Some(e),
                }
            }
            s < n as u64
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        agree &= direct.len() == 1 << (n - 1) && [&farey, &sb, &cf, &comps].iter().all(|s| **s == direct);
    }
    let listings: [(&[&str], &[&str]); 4] = [
        (&["R"], &["B"]),
        (&["LR", "RR"], &["AB", "BA"]),
        (&["LLR", "LRR", "RLR", "RRR"], &["AAB", "ABA", "BAB", "BBA"]),
        (
            &["LLLR", "LLRR", "LRRR", "LRLR", "RRLR", "RRRR", "RLRR", "RLLR"],
            &["AAAB", "AABA", "ABAB", "ABBA", "BAAB", "BABA", "BBAB", "BBBA"],
        ),
    ];
    let mut listed = true;
    for (n, (farey, sb)) in (1..).zip(listings) {
        let fam = enumerate_sum_level(n)?;
        let f: BTreeSet<String> = fam.codes.iter().map(|c| c.to_string()).collect();
        let s: BTreeSet<String> = fam
            .members
            .iter()
            .map(|iv| code_of(iv, Alphabet::SternBrocot).map(|c| c.to_string()))
            .collect::<Result<_>>()?;
        listed &= f == farey.iter().map(|c| c.to_string()).collect();
        listed &= s == sb.iter().map(|c| c.to_string()).collect();
    }
    let c4: Vec<String> = enumerate_sum_level(4)?.codes.iter().map(|c| c.to_string()).collect();
    listed &= c4 == listings[3].0;
    outcome(
        agree && listed,
        format!("representations agree for n ≤ 12: {agree}; C₁–C₄ listings reproduced: {listed}"),
    )
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |id: &str, name: &str, started: Instant, result: Result<Outcome>| {
        let secs = started.elapsed().as_secs_f64();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        println!(
            "{} {id:>2} {name}: {detail} [{secs:.1} s]",
            if pass { "PASS" } else { "FAIL" }
        );
    };
    let t = Instant::now();
    report("1", "golden values", t, golden_values());
    let t = Instant::now();
    report("2", "strict decrease", t, strict_decrease());
    let t = Instant::now();
    report("3", "pullback identity", t, pullback());
    let t = Instant::now();
    report("4", "Farey tree vs compositions", t, dual_representation());
    let t = Instant::now();
    report("5", "operator fidelity", t, operator_fidelity());
    let t = Instant::now();
    match trends() {
        Ok((six, seven)) => {
            report("6", "wandering-rate trend", t, Ok(six));
            report("7", "Cesàro trend", t, Ok(seven));
        }
        Err(e) => {
            let msg = e.to_string();
            report("6", "wandering-rate trend", t, Err(e));
            report("7", "Cesàro trend", t, Err(sumlevel::Error::Domain(msg)));
        }
    }
    let t = Instant::now();
    report("8", "pressure", t, pressure());
    let t = Instant::now();
    report("9", "E-set sandwich", t, e_set_sandwich());
    let t = Instant::now();
    report("10", "sampler consistency", t, sampler());
    let t = Instant::now();
    report("11", "coding bijections", t, coding_bijections());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
