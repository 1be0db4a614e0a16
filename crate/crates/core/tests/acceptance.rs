//! End-to-end acceptance checks. Each test prints one `criterion N:` line
//! before asserting, so `--nocapture` gives a pass/fail summary.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng as _;
use rand_distr::StandardNormal;

use eqgrowth::closure::{closed_form_ivp, closed_form_power, coverage_fraction, simulate_ode, ClosureParams, Position};
use eqgrowth::growth::{bootstrap_ci, fit_nonlinear, fit_power_law_min, oos_forecast, select_model, GrowthSeries, ModelKind};
use eqgrowth::ingest::{monthly_series, parse_log, CountMode};
use eqgrowth::rng::{stream, STREAM_NOISE};
use eqgrowth::sweep::{analyze, read_records, run_sweep, AnalyzeOptions, Report, SweepPlan};
use eqgrowth::term::{count_terms, enumerate_terms, walk_terms, Domain, Substrate, Term};

fn report(n: u32, ok: bool, detail: String) {
    println!("criterion {n}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
}

fn synthetic(model: ModelKind, p: &[f64], len: usize) -> GrowthSeries {
    GrowthSeries::from_counts((1..=len).map(|t| model.eval(p, t as f64))).unwrap()
}

/// `n · (1 + σ z)`, clipped at zero.
fn noisy(clean: &GrowthSeries, sigma: f64, seed: u64) -> GrowthSeries {
    let mut rng = stream(seed, STREAM_NOISE);
    let n = clean.n().iter().map(|&v| {
        let z: f64 = rng.sample(StandardNormal);
        (v * (1.0 + sigma * z)).max(0.0)
    });
    GrowthSeries::new(clean.t().to_vec(), n.collect()).unwrap()
}

const FAMILIES: [(ModelKind, &[f64]); 5] = [
    (ModelKind::PowerLaw, &[3.0, 0.6]),
    (ModelKind::StretchedExp, &[1000.0, 80.0, 0.7]),
    (ModelKind::SaturatingPl, &[5.0, 0.9, 0.01]),
    (ModelKind::Linear, &[10.0, 3.0]),
    (ModelKind::LogNormal, &[1000.0, 4.0, 0.8]),
];

#[test]
fn criterion_01_fit_recovery() {
    let mut worst_rel = 0.0f64;
    let mut worst_time = Duration::ZERO;
    let mut all_converged = true;
    for (model, truth) in FAMILIES {
        let s = synthetic(model, truth, 200);
        let start = Instant::now();
        let f = fit_nonlinear(model, &s);
        worst_time = worst_time.max(start.elapsed());
        all_converged &= f.converged && !f.degenerate;
        for (got, want) in f.params.iter().zip(truth) {
            worst_rel = worst_rel.max((got / want - 1.0).abs());
        }
    }
    let ok = all_converged && worst_rel < 1e-3 && worst_time < Duration::from_secs(1);
    report(1, ok, format!("worst relative error {worst_rel:.2e}, slowest fit {worst_time:?}, all converged {all_converged}"));
    assert!(ok);
}

#[test]
fn criterion_02_aic_selection() {
    let start = Instant::now();
    let mut hits = Vec::new();
    for (fi, (model, truth)) in FAMILIES.into_iter().enumerate() {
        let clean = synthetic(model, truth, 200);
        let mut n = 0;
        for trial in 0..100u64 {
            let s = noisy(&clean, 0.01, 1000 * fi as u64 + trial);
            let fits = select_model(&s, &ModelKind::ALL).unwrap();
            n += usize::from(fits[0].model == model);
        }
        hits.push((model, n));
    }
    let elapsed = start.elapsed();
    let ok = hits.iter().all(|&(_, n)| n >= 90) && elapsed < Duration::from_secs(60);
    let detail: Vec<String> = hits.iter().map(|(m, n)| format!("{}={n}/100", m.as_str())).collect();
    report(2, ok, format!("{} in {elapsed:?}", detail.join(" ")));
    assert!(ok);
}

#[test]
fn criterion_03_ode_limits() {
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for k in [0.0, 0.25, 0.5, 0.75] {
        let p = ClosureParams { big_k: 1.0, k, mu: 0.0, n0: 0.0 };
        let s = simulate_ode(&p, 100.0, 0.01).unwrap();
        let exact = closed_form_power(1.0, k, 100.0).unwrap();
        let rel = (s.n()[99] / exact - 1.0).abs();
        worst = worst.max(rel);
        lines.push(format!("k={k}: {rel:.1e}"));
    }
    // The solution is polynomial in t for k ∈ {0, 0.5, 0.75}, which RK4
    // integrates exactly; k = 0.25 from S(0) = 1 exercises the truncation error.
    let err = |dt: f64| {
        let p = ClosureParams { big_k: 1.0, k: 0.25, mu: 0.0, n0: 1.0 };
        let s = simulate_ode(&p, 100.0, dt).unwrap();
        (s.n()[99] - closed_form_ivp(1.0, 0.25, 1.0, 100.0).unwrap()).abs()
    };
    let ratio = err(0.5) / err(0.25);
    let ok = worst < 1e-3 && (12.0..=20.0).contains(&ratio);
    report(3, ok, format!("relative error at t=100 [{}], dt-halving error ratio {ratio:.2}", lines.join(", ")));
    assert!(ok);
}

#[test]
fn criterion_04_oos_directionality() {
    let start = Instant::now();
    let pair = [ModelKind::PowerLaw, ModelKind::SaturatingPl];
    let rmse = |s: &GrowthSeries, m: ModelKind| {
        oos_forecast(s, 100, &pair).unwrap().into_iter().find(|r| r.model == m).unwrap().rmse_oos
    };
    // knee (μ t^k = 1) at t = 120, inside the held-out half of 200 points
    let mu = 120f64.powf(-0.9);
    let sat_clean = synthetic(ModelKind::SaturatingPl, &[5.0, 0.9, mu], 200);
    let pl_clean = synthetic(ModelKind::PowerLaw, &[3.0, 0.6], 200);
    let (mut sat_wins, mut pl_wins) = (0, 0);
    for seed in 0..5 {
        let s = noisy(&sat_clean, 0.01, 40 + seed);
        sat_wins += usize::from(rmse(&s, ModelKind::SaturatingPl) < rmse(&s, ModelKind::PowerLaw));
        let s = noisy(&pl_clean, 0.01, 50 + seed);
        pl_wins += usize::from(rmse(&s, ModelKind::PowerLaw) < rmse(&s, ModelKind::SaturatingPl));
    }
    let elapsed = start.elapsed();
    let ok = sat_wins == 5 && pl_wins == 5 && elapsed < Duration::from_secs(10);
    report(4, ok, format!("saturating data: saturating wins {sat_wins}/5; power-law data: power-law wins {pl_wins}/5; {elapsed:?}"));
    assert!(ok);
}

#[test]
fn criterion_05_bootstrap_coverage() {
    let start = Instant::now();
    let truth = [5.0, 0.9, 0.01];
    let clean = synthetic(ModelKind::SaturatingPl, &truth, 200);
    let mut covered = 0;
    for rep in 0..100u64 {
        let s = noisy(&clean, 0.01, 7000 + rep);
        let base = fit_nonlinear(ModelKind::SaturatingPl, &s);
        let ci = bootstrap_ci(&base, &s, 500, rep);
        let k = ci.interval("k").unwrap();
        covered += usize::from(k.lower95 <= truth[1] && truth[1] <= k.upper95);
    }
    let elapsed = start.elapsed();
    let ok = covered >= 90 && elapsed < Duration::from_secs(300);
    report(5, ok, format!("95% CI covers true k in {covered}/100 replications, {elapsed:?}"));
    assert!(ok);
}

#[test]
fn criterion_06_enumeration() {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for (domain, max_depth) in [(Domain::Bool, 4), (Domain::Arith, 4), (Domain::List, 3)] {
        let spec = Substrate::new(domain);
        for &sort in spec.principal_sorts() {
            for d in 1..=max_depth {
                let expected = count_terms(&spec, sort, d);
                let mut walked = 0u64;
                walk_terms(&spec, sort, d, &mut |_| walked += 1);
                if BigUint::from(walked) != expected {
                    mismatches.push(format!("{domain:?}/{sort} d={d}: walk {walked} vs {expected}"));
                }
                if let Ok(terms) = enumerate_terms(&spec, sort, d, 1_000_000) {
                    let distinct: BTreeSet<String> = terms.iter().map(|t| t.to_string()).collect();
                    if BigUint::from(distinct.len()) != expected || terms.len() != distinct.len() {
                        mismatches.push(format!("{domain:?}/{sort} d={d}: materialised {}", terms.len()));
                    }
                }
                checked += 1;
            }
        }
    }
    let mut full = true;
    for domain in Domain::ALL {
        let spec = Substrate::new(domain);
        for &sort in spec.principal_sorts() {
            full &= coverage_fraction(&Term::pvar(0, sort), &spec, 3, Position::Root).unwrap() == 1.0;
        }
    }
    let elapsed = start.elapsed();
    let ok = mismatches.is_empty() && full && elapsed < Duration::from_secs(60);
    report(6, ok, format!("{checked} (domain, sort, depth) counts checked, mismatches {mismatches:?}, coverage(A) = 1: {full}, {elapsed:?}"));
    assert!(ok);
}

struct Short {
    report: Report,
    sweep_time: Duration,
    regress_time: Duration,
    _dir: tempfile::TempDir,
}

fn run(plan: &SweepPlan, dir: &Path) -> (PathBuf, Duration) {
    let out = dir.join("trajectories.jsonl");
    let start = Instant::now();
    let summary = run_sweep(plan, &out, None, None).unwrap();
    assert_eq!(summary.failed, 0);
    (out, start.elapsed())
}

/// The short-range grid, shared by the sweep and regression criteria.
fn short() -> &'static Short {
    static CELL: OnceLock<Short> = OnceLock::new();
    CELL.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let (out, sweep_time) = run(&SweepPlan::short_range(), dir.path());
        let records = read_records(&out).unwrap();
        let opts = AnalyzeOptions { windows: vec![], ..AnalyzeOptions::default() };
        let start = Instant::now();
        let report = analyze(&records, &opts);
        Short { report, sweep_time, regress_time: start.elapsed(), _dir: dir }
    })
}

#[test]
fn criterion_07_sweep_replication() {
    let s = short();
    let d = |dom: Domain| s.report.domains.iter().find(|x| x.domain == dom).unwrap();
    let (ar, bo, li) = (d(Domain::Arith), d(Domain::Bool), d(Domain::List));
    let band = |x: f64| (0.4..=1.0).contains(&x);
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get()) as u32;
    // the 30-minute target is stated for 8 cores
    let budget = Duration::from_secs(30 * 60) * 8 / cores.min(8);
    let checks = [
        ("configs/domain >= 200", ar.n >= 200 && bo.n >= 200 && li.n >= 200),
        ("arith b in band", band(ar.mean_b)),
        ("bool b in band", band(bo.mean_b)),
        ("arith, bool > list", ar.mean_b > li.mean_b && bo.mean_b > li.mean_b),
        ("list b<0.1 in [0.25,0.60]", (0.25..=0.60).contains(&li.frac_b_lt_0_1)),
        ("novelty + arith/bool", ar.novelty_effect > 0.0 && bo.novelty_effect > 0.0),
        ("novelty - list", li.novelty_effect < 0.0),
        ("runtime", s.sweep_time < budget),
    ];
    let ok = checks.iter().all(|c| c.1);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    report(
        7,
        ok,
        format!(
            "mean b arith {:.3} bool {:.3} list {:.3}; list b<0.1 {:.1}%; novelty effect {:+.3}/{:+.3}/{:+.3}; n {}/{}/{}; sweep {:?} on {cores} core(s); failed {failed:?}",
            ar.mean_b, bo.mean_b, li.mean_b, 100.0 * li.frac_b_lt_0_1, ar.novelty_effect, bo.novelty_effect, li.novelty_effect, ar.n, bo.n, li.n, s.sweep_time
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_08_regression_shape() {
    let s = short();
    let r = &s.report.regression;
    let within_ab = r.within["arith+bool"].r2_mean;
    let within_l = r.within["list"].r2_mean;
    let transfer = r.transfer.as_ref().unwrap().r2;
    let pooled = r.pooled.as_ref().unwrap().r2_mean;
    let ok = within_ab >= 0.5
        && within_l >= 0.5
        && transfer < 0.0
        && pooled > transfer
        && pooled >= within_ab.max(within_l) - 0.1
        && s.regress_time < Duration::from_secs(60);
    report(
        8,
        ok,
        format!("within arith+bool {within_ab:.3}, list {within_l:.3}; transfer {transfer:.3}; pooled {pooled:.3}; analysis {:?}", s.regress_time),
    );
    assert!(ok);
}

#[test]
fn criterion_09_long_range_window_shift() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let (out, _) = run(&SweepPlan::long_range(), dir.path());
    let records = read_records(&out).unwrap();
    let opts = AnalyzeOptions { split: Some(100), ..AnalyzeOptions::default() };
    let rep = analyze(&records, &opts);
    let elapsed = start.elapsed();

    let early: BTreeSet<ModelKind> = rep
        .trajectories
        .iter()
        .flat_map(|t| t.windows.iter().filter(|w| w.window <= 50).map(|w| w.winner))
        .collect();
    let seeds = rep.trajectories.len();
    let sat_in_sample = rep
        .trajectories
        .iter()
        .filter(|t| {
            t.windows.iter().find(|w| w.window == 500).is_some_and(|w| w.aic[&ModelKind::SaturatingPl] < w.aic[&ModelKind::PowerLaw])
        })
        .count();
    let oos = |key: &str, m: ModelKind| rep.oos.iter().find(|o| o.key == key && o.model == m).map(|o| o.rmse);
    let pl_oos = rep
        .trajectories
        .iter()
        .filter(|t| match (oos(&t.key, ModelKind::PowerLaw), oos(&t.key, ModelKind::SaturatingPl)) {
            (Some(p), Some(s)) => p < s,
            _ => false,
        })
        .count();
    let ok = seeds == 5 && early.len() >= 2 && 2 * sat_in_sample > seeds && 2 * pl_oos > seeds && elapsed < Duration::from_secs(20 * 60);
    let early: Vec<&str> = early.iter().map(|m| m.as_str()).collect();
    report(
        9,
        ok,
        format!(
            "winners at windows <= 50 {early:?}; saturating beats power-law AIC at 500 on {sat_in_sample}/{seeds}; power-law wins OOS at split 100 on {pl_oos}/{seeds}; {elapsed:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_ingestion_exactness() {
    let start = Instant::now();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/small.log");
    let records = parse_log(std::io::BufReader::new(std::fs::File::open(path).unwrap())).unwrap();
    let commits = monthly_series(&records, CountMode::Commits, None).unwrap();
    let months: Vec<String> = commits.months.iter().map(|m| m.to_string()).collect();
    let files = monthly_series(&records, CountMode::NewFiles, Some("Mathlib/**/*.lean")).unwrap();
    let top = monthly_series(&records, CountMode::NewFiles, Some("Mathlib/*.lean")).unwrap();
    let log_ok = months == ["2021-05", "2021-06", "2021-07", "2021-08", "2021-09"]
        && commits.increments == [3, 0, 2, 0, 1]
        && commits.cumulative == [3, 3, 5, 5, 6]
        && files.increments == [3, 0, 1, 0, 0]
        && files.cumulative == [3, 3, 4, 4, 4]
        && top.increments == [1, 0, 0, 0, 0];

    let s = GrowthSeries::new(vec![3.0, 6.0, 8.75], vec![170_000.0, 1_000_000.0, 2_100_000.0]).unwrap();
    let f = fit_power_law_min(&s, 3);
    let b = f.params[1];
    let fit_ok = (b / 2.87 - 1.0).abs() <= 0.05;
    let elapsed = start.elapsed();
    let ok = log_ok && fit_ok && elapsed < Duration::from_secs(1);
    report(
        10,
        ok,
        format!("fixture log hand-check {log_ok}; three-point refit a = {:.1}, b = {b:.3} (target 2.87 ± 5%): {fit_ok}; {elapsed:?}", f.params[0]),
    );
    assert!(ok);
}
