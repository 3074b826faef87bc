//! The acceptance suite, shared by `dimerlab verify` and the test harness.

use std::fmt;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;

use crate::aggregate::{pressure_series, OnDemand};
use crate::enumerate::{enumerate_trees, enumerate_trees_bruteforce, resume, EnumerationJob, Reduction};
use crate::error::Result;
use crate::oracle::{
    count_matchings_2d, lambda2_constant, matching::count_transfer, monomer_dimer_pressure_oracle,
    per_site_entropy_2d, Geometry,
};
use crate::series::{a_series, b_reference, b_reference_str, diagnostics, in_lambda3_bounds, jbar, jbar_general, jbar_pairs};
use crate::weight::Ursell;

pub const CRITERIA: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Soft gate missed; reported, not failed.
    Reported,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Reported => "SOFT",
            Verdict::Skipped => "SKIP",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
    /// Individual conditions making up the criterion.
    pub checks: Vec<(&'static str, bool)>,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {} ({:.2}s, budget {}s): {}",
            self.verdict,
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Skip the s ≥ 5 enumerations.
    pub quick: bool,
    pub threads: Option<usize>,
    /// Scratch space for the determinism check; a fresh temp dir otherwise.
    pub scratch: Option<PathBuf>,
}

const NAMES: [&str; CRITERIA] = [
    "J-bar consistency",
    "A-series reproduction",
    "B reference and diagnostics",
    "lambda3 bounds",
    "enumerator oracle equivalence",
    "Ursell pipeline vs oracles",
    "matching-count oracles",
    "determinism",
    "performance envelope",
];

const BUDGETS_SECS: [u64; CRITERIA] = [1, 1, 1, 1, 120, 600, 300, 300, 24 * 3600];

/// Named sub-checks and a human-readable summary.
/// Name of the sub-check comparing the 12×12 torus entropy with λ₂.
pub const ENTROPY_TOLERANCE_CHECK: &str = "12x12 torus entropy within 5e-3 of lambda2";

type Check = (Vec<(&'static str, bool)>, String);

pub fn run_all(opts: &VerifyOptions) -> Vec<Outcome> {
    (1..=CRITERIA).map(|id| run(id, opts)).collect()
}

/// Runs criterion `id` (1-based).
pub fn run(id: usize, opts: &VerifyOptions) -> Outcome {
    assert!((1..=CRITERIA).contains(&id), "criterion {id}");
    let name = NAMES[id - 1];
    let budget = Duration::from_secs(BUDGETS_SECS[id - 1]);
    if id == 9 && opts.quick {
        return Outcome {
            id,
            name,
            verdict: Verdict::Skipped,
            detail: "skipped in quick mode".into(),
            elapsed: Duration::ZERO,
            budget,
            checks: Vec::new(),
        };
    }
    let start = Instant::now();
    let result = match id {
        1 => jbar_consistency(),
        2 => a_series_values(),
        3 => b_reference_values(),
        4 => bounds(),
        5 => enumerator_equivalence(),
        6 => ursell_pipeline(),
        7 => matching_oracles(),
        8 => determinism(opts),
        _ => return performance(opts, name, budget),
    };
    let elapsed = start.elapsed();
    let (verdict, detail, mut checks) = match result {
        Ok((checks, d)) => {
            let all = checks.iter().all(|c| c.1);
            let v = if all { Verdict::Pass } else { Verdict::Fail };
            (v, d, checks)
        }
        Err(e) => (Verdict::Fail, format!("error: {e}"), vec![("ran without error", false)]),
    };
    let on_time = elapsed <= budget;
    checks.push(("within time budget", on_time));
    let (verdict, detail) = match (verdict, on_time) {
        (Verdict::Pass, false) => (Verdict::Fail, format!("{detail}; over time budget")),
        other => (other.0, detail),
    };
    Outcome {
        id,
        name,
        verdict,
        detail,
        elapsed,
        budget,
        checks,
    }
}

fn jbar_consistency() -> Result<Check> {
    let pairs = jbar_pairs();
    let mut bad = Vec::new();
    for &(d, i) in &pairs {
        if jbar_general(i, d)? != jbar(d, i)? {
            bad.push(format!("(d={d}, i={i})"));
        }
    }
    Ok((
        vec![("all 18 pairs present", pairs.len() == 18), ("exact agreement", bad.is_empty())],
        if bad.is_empty() {
            format!("{} pairs agree exactly", pairs.len())
        } else {
            format!("mismatch at {}", bad.join(", "))
        },
    ))
}

const A_EXPECTED: [(usize, [&str; 4]); 2] = [
    (2, ["0.1931", "0.2556", "0.2687", "0.2784"]),
    (3, ["0.3959", "0.4375", "0.4433", "0.4462"]),
];

fn a_series_values() -> Result<Check> {
    let mut got = Vec::new();
    let mut ok = true;
    for (d, expect) in A_EXPECTED {
        for (r, e) in expect.iter().enumerate() {
            let v = a_series(d, r)?.display();
            ok &= v == *e;
            got.push(v);
        }
    }
    Ok((vec![("eight values at 4 places", ok)], got.join(" ")))
}

const B_EXPECTED: [(usize, [&str; 6]); 2] = [
    (2, ["0.1931", "0.2556", "0.2921", "0.2992", "0.2905", "0.2814"]),
    (3, ["0.3959", "0.4375", "0.4538", "0.4524", "0.4468", "0.4445"]),
];

fn b_reference_values() -> Result<Check> {
    let mut ok = true;
    for (d, expect) in B_EXPECTED {
        for (r, e) in expect.iter().enumerate() {
            let exact = crate::precision::Decimal::from_rational(&b_reference(d, r)?, 20);
            ok &= b_reference_str(d, r)? == *e && exact.to_fixed(4) == *e;
        }
    }
    let diag = diagnostics(2)?;
    let peak = b_reference_str(2, diag.b_peak)?;
    Ok((
        vec![
            ("stored values reproduced", ok),
            ("d=2 peak at r=3 (0.2992)", diag.b_peak == 3 && peak == "0.2992"),
            ("strictly decreasing after peak", diag.b_decreasing_after_peak),
        ],
        format!(
            "12 stored values; d=2 peak r={} ({peak}), decreasing after: {}",
            diag.b_peak, diag.b_decreasing_after_peak
        ),
    ))
}

fn bounds() -> Result<Check> {
    let a = a_series(3, 3)?;
    let a_in = in_lambda3_bounds(&a.value.to_rational());
    let diag = diagnostics(3)?;
    let t = &diag.transferred[2];
    let shown = t.estimate.to_fixed(4);
    Ok((
        vec![
            ("A3(3) = 0.4462 in bounds", a_in && a.display() == "0.4462"),
            ("transferred 0.4533 in bounds", t.in_bounds && shown == "0.4533"),
        ],
        format!(
            "A3(3)={} in bounds: {a_in}; transferred={shown} in bounds: {}",
            a.display(),
            t.in_bounds
        ),
    ))
}

fn enumerator_equivalence() -> Result<Check> {
    let mut cases: Vec<(usize, usize)> = (1..=2).flat_map(|d| (1..=4).map(move |s| (d, s))).collect();
    cases.extend((1..=3).map(|s| (3, s)));
    let mut bad = Vec::new();
    for &(d, s) in &cases {
        let fast = enumerate_trees(&EnumerationJob::new(d, s))?;
        let slow = enumerate_trees_bruteforce(d, s, 2 * s + 2)?;
        if fast.counts != slow.counts {
            bad.push(format!("({d},{s})"));
        }
    }
    let total = |d, s| enumerate_trees(&EnumerationJob::new(d, s)).map(|t| t.total());
    let hand = [(1, 2, 3u32), (1, 3, 11), (2, 2, 7)];
    let mut hand_ok = true;
    for (d, s, n) in hand {
        hand_ok &= total(d, s)? == BigUint::from(n);
    }
    Ok((
        vec![("fast = brute force", bad.is_empty()), ("hand totals", hand_ok)],
        format!(
            "{} cases identical{}; hand totals {}",
            cases.len() - bad.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!(", differ at {}", bad.join(" "))
            },
            if hand_ok { "match" } else { "differ" }
        ),
    ))
}

fn ursell_pipeline() -> Result<Check> {
    let u = Ursell::new();
    let src = OnDemand::default();
    let mut parts = Vec::new();
    let mut checks = Vec::new();
    for (d, order, label) in [(1, 4, "d=1 through order 4"), (2, 3, "d=2 through order 3")] {
        let engine: Vec<BigRational> = pressure_series(d, order, &u, &src)?.into_iter().map(|c| c.value).collect();
        let oracle = monomer_dimer_pressure_oracle(d, order)?.coefficients;
        checks.push((label, engine == oracle));
        let shown: Vec<String> = engine.iter().map(crate::display::fraction).collect();
        parts.push(format!("d={d}: [{}] {}", shown.join(", "), if engine == oracle { "=" } else { "!=" }));
    }
    Ok((checks, parts.join("; ")))
}

fn matching_oracles() -> Result<Check> {
    let (mut a, mut b) = (BigUint::from(1u32), BigUint::from(2u32));
    let mut fib = true;
    for n in 2..=20 {
        fib &= count_matchings_2d(Geometry::Open, 2, n)?.count == b;
        let next = &a + &b;
        a = b;
        b = next;
    }
    let dp = count_matchings_2d(Geometry::Open, 8, 8)?.count;
    let tm = count_transfer(Geometry::Open, 8, 8)?;
    let grid = dp == tm && dp == BigUint::from(12_988_816u32);

    let table = per_site_entropy_2d(&[4, 6, 8, 10, 12])?;
    let last = table.rows.last().expect("five sizes").error.to_f64().abs();

    let lam = lambda2_constant();
    let tight = lam.error < BigRational::new(1.into(), 10_000_000_000i64.into()) / BigRational::from_integer(2.into());
    let lam_ok = tight && lam.value.to_fixed(10) == "0.2915609040" && lam.value.to_fixed(5) == "0.29156";

    let errors: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("{}:{:.5}", r.size, r.error.to_f64()))
        .collect();
    Ok((
        vec![
            ("2xn Fibonacci for n <= 20", fib),
            ("8x8 open grid by two methods", grid),
            (ENTROPY_TOLERANCE_CHECK, last < 5e-3),
            ("monotone approach to lambda2", table.monotone),
            ("lambda2 to 10 places, rounds to 0.29156", lam_ok),
        ],
        format!(
            "fibonacci {fib}; 8x8 open {dp} (dp) / {tm} (transfer); entropy error {} monotone {} final {last:.5} vs 5e-3; lambda2 {}",
            errors.join(" "),
            table.monotone,
            lam.value.to_fixed(10)
        ),
    ))
}

fn scratch_dir(opts: &VerifyOptions) -> Result<(PathBuf, bool)> {
    if let Some(p) = &opts.scratch {
        std::fs::create_dir_all(p).map_err(|e| crate::Error::io(p, e))?;
        return Ok((p.clone(), false));
    }
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    let p = std::env::temp_dir().join(format!("dimerlab-verify-{}-{nanos}", std::process::id()));
    std::fs::create_dir_all(&p).map_err(|e| crate::Error::io(&p, e))?;
    Ok((p, true))
}

fn determinism(opts: &VerifyOptions) -> Result<Check> {
    let (dir, owned) = scratch_dir(opts)?;
    let result = determinism_in(&dir, opts);
    if owned {
        let _ = std::fs::remove_dir_all(&dir);
    }
    result
}

fn determinism_in(dir: &std::path::Path, opts: &VerifyOptions) -> Result<Check> {
    let job = |threads: usize, name: &str| {
        let mut j = EnumerationJob::new(2, 4);
        j.threads = Some(threads);
        j.checkpoint_interval = 8;
        j.output = Some(dir.join(name));
        j
    };
    let many = opts.threads.unwrap_or(4).max(2);
    enumerate_trees(&job(1, "one.tsv"))?;
    enumerate_trees(&job(many, "many.tsv"))?;
    let mut killed = job(many, "resumed.tsv");
    killed.stop_after_checkpoints = Some(2);
    let partial = enumerate_trees(&killed)?;
    let interrupted = !partial.is_complete();
    killed.stop_after_checkpoints = None;
    resume(&dir.join("resumed.tsv"), &killed)?;

    let read = |n: &str| std::fs::read(dir.join(n)).map_err(|e| crate::Error::io(dir.join(n), e));
    let (a, b, c) = (read("one.tsv")?, read("many.tsv")?, read("resumed.tsv")?);
    let same = a == b && b == c;
    Ok((
        vec![("byte-identical tallies", same), ("run was interrupted", interrupted)],
        format!("1 thread, {many} threads, stop after 2 checkpoints + resume: identical {same}, run was interrupted {interrupted}"),
    ))
}

fn performance(opts: &VerifyOptions, name: &'static str, budget: Duration) -> Outcome {
    let start = Instant::now();
    let targets = [((3usize, 5usize), Duration::from_secs(30 * 60)), ((2, 6), Duration::from_secs(24 * 3600))];
    let mut parts = Vec::new();
    let mut consistent = true;
    let mut in_time = true;
    let mut error = None;
    for ((d, s), limit) in targets {
        let timed = |reduction| -> Result<(crate::enumerate::PatternTally, Duration)> {
            let mut j = EnumerationJob::new(d, s);
            j.threads = opts.threads;
            j.reduction = reduction;
            let t0 = Instant::now();
            Ok((enumerate_trees(&j)?, t0.elapsed()))
        };
        match timed(Reduction::Hyperoctahedral).and_then(|r| Ok((r, timed(Reduction::None)?))) {
            Ok(((red, t_red), (plain, t_plain))) => {
                let same = red.counts == plain.counts;
                consistent &= same;
                in_time &= t_red <= limit;
                parts.push(format!(
                    "(d={d}, s={s}) {} trees, {} patterns, {:.2}s reduced / {:.2}s plain, stable {same}",
                    red.total(),
                    red.counts.len(),
                    t_red.as_secs_f64(),
                    t_plain.as_secs_f64()
                ));
            }
            Err(e) => error = Some(e),
        }
    }
    let (verdict, detail) = match &error {
        Some(e) => (Verdict::Fail, format!("error: {e}")),
        None if !consistent => (Verdict::Fail, parts.join("; ")),
        None if !in_time => (Verdict::Reported, parts.join("; ")),
        None => (Verdict::Pass, parts.join("; ")),
    };
    Outcome {
        id: 9,
        name,
        verdict,
        detail,
        elapsed: start.elapsed(),
        budget,
        checks: vec![
            ("tallies stable across reduction", consistent && error.is_none()),
            ("within envelope", in_time),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass() {
        let opts = VerifyOptions::default();
        for id in [1, 2, 3, 4] {
            let o = run(id, &opts);
            assert_eq!(o.verdict, Verdict::Pass, "{}", o.line());
        }
    }

    #[test]
    fn quick_mode_skips_performance() {
        let o = run(9, &VerifyOptions { quick: true, ..Default::default() });
        assert_eq!(o.verdict, Verdict::Skipped);
        assert!(o.line().starts_with("SKIP [9]"));
    }
}
