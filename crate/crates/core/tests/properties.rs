use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eqgrowth::closure::{coverage_fraction, simulate_ode, ClosureParams, Position};
use eqgrowth::discovery::{discover, random_term, run, ArchConfig, FilterKind, GeneratorKind, RuleSet};
use eqgrowth::growth::{bootstrap_ci, fit_nonlinear, fit_power_law, oos_forecast, percentile, GrowthSeries, ModelKind};
use eqgrowth::ingest::{monthly_series, parse_log, write_log, CommitRecord, CountMode, YearMonth};
use eqgrowth::regress::{fit_gbm, kfold_indices, r2_score, GbmParams};
use eqgrowth::term::{eval, generalize, instantiate, match_term, Domain, Substitution, Substrate, Term};

fn domain() -> impl Strategy<Value = Domain> {
    prop_oneof![Just(Domain::Arith), Just(Domain::Bool), Just(Domain::List)]
}

fn concrete_term(spec: &Substrate, seed: u64, depth: u32) -> Term {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sorts = spec.principal_sorts();
    random_term(spec, sorts[(seed as usize) % sorts.len()], depth, &mut rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eval_is_deterministic(d in domain(), seed in any::<u64>(), depth in 1u32..5) {
        let spec = Substrate::new(d);
        let t = concrete_term(&spec, seed, depth);
        let env = spec.random_environment(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        prop_assert_eq!(eval(&t, &env), eval(&t, &env));
    }

    #[test]
    fn size_and_depth_bookkeeping(d in domain(), seed in any::<u64>(), depth in 1u32..6) {
        let t = concrete_term(&Substrate::new(d), seed, depth);
        prop_assert_eq!(t.recomputed_size_depth(), (t.size(), t.depth()));
        prop_assert!(t.depth() <= depth);
    }

    #[test]
    fn generalize_then_instantiate_restores_terms(d in domain(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let spec = Substrate::new(d);
        let (l, r) = (concrete_term(&spec, s1, 4), concrete_term(&spec, s2, 4));
        let (gl, gr) = generalize(&l, &r);
        prop_assert!(gl.free_vars().is_empty() && gr.free_vars().is_empty());
        let mut order = l.free_vars();
        for v in r.free_vars() {
            if !order.contains(&v) {
                order.push(v);
            }
        }
        let mut back = Substitution::default();
        for (i, v) in order.into_iter().enumerate() {
            back.bind(i as u16, Term::var(v));
        }
        prop_assert_eq!(instantiate(&gl, &back), l);
        prop_assert_eq!(instantiate(&gr, &back), r);
    }

    #[test]
    fn match_then_instantiate_reproduces_the_term(d in domain(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let spec = Substrate::new(d);
        let t = concrete_term(&spec, s1, 4);
        let other = concrete_term(&spec, s2, 3);
        let (pattern, _) = generalize(&t, &other);
        let sigma = match_term(&pattern, &t).expect("a generalization matches its source");
        prop_assert_eq!(instantiate(&pattern, &sigma), t.clone());
        if let Some(sigma) = match_term(&pattern, &other) {
            prop_assert_eq!(instantiate(&pattern, &sigma), other);
        }
    }

    #[test]
    fn coverage_fractions_lie_in_unit_interval(s in any::<u64>()) {
        let spec = Substrate::new(Domain::Bool);
        let t = concrete_term(&spec, s, 3);
        let (pattern, _) = generalize(&t, &t);
        let f = coverage_fraction(&pattern, &spec, 3, Position::Root).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        // instantiating a variable never enlarges the coverage set
        prop_assert!(coverage_fraction(&t, &spec, 3, Position::Root).unwrap() <= f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn discovery_is_monotone_deterministic_and_size_decreasing(
        d in domain(),
        g in prop_oneof![Just(GeneratorKind::Random), Just(GeneratorKind::Compositional), Just(GeneratorKind::Freq), Just(GeneratorKind::MdlGreedy)],
        f in prop_oneof![Just(FilterKind::Any), Just(FilterKind::Novelty)],
        depth in 2u32..5,
        seed in 0u64..1000,
    ) {
        let spec = Substrate::new(d);
        let c = ArchConfig { domain: d, generator: g, filter: f, depth, batch_size: 40, seed, epochs: 8 };
        let a = run(&spec, &c);
        prop_assert_eq!(a.trajectory.sizes.len(), 8);
        prop_assert!(a.trajectory.sizes.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(&discover(&spec, &c), &a.trajectory);
        for rule in a.rules.rules() {
            prop_assert!(rule.lhs.size() > rule.rhs.size());
        }
        // with size-decreasing rules normalization takes fewer steps than the term has nodes
        let mut rules: RuleSet = a.rules.clone();
        for s in 0..20 {
            let t = concrete_term(&spec, seed * 31 + s, depth + 1);
            let n = rules.normalize(&t);
            prop_assert!(n.steps < t.size() as usize);
        }
    }

    #[test]
    fn log_ols_is_exact_on_noise_free_power_laws(a in 0.1f64..1000.0, b in -1.0f64..3.0, len in 5usize..200) {
        let s = GrowthSeries::from_counts((1..=len).map(|t| a * (t as f64).powf(b))).unwrap();
        let f = fit_power_law(&s);
        prop_assert!((f.params[0] - a).abs() <= 1e-9 * a);
        prop_assert!((f.params[1] - b).abs() <= 1e-10);
    }

    #[test]
    fn saturating_never_loses_to_power_law_in_rss(a in 0.5f64..50.0, b in 0.2f64..1.5, noise in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(noise);
        let s = GrowthSeries::from_counts((1..=60).map(|t| {
            let e: f64 = rand::Rng::gen_range(&mut rng, -0.05..0.05);
            a * (t as f64).powf(b) * (1.0 + e)
        })).unwrap();
        let pl = fit_nonlinear(ModelKind::PowerLaw, &s);
        let seeded = eqgrowth::growth::fit_from_starts(ModelKind::SaturatingPl, &s, &[vec![pl.params[0], pl.params[1], 0.0]]);
        prop_assert!(seeded.rss <= pl.rss * (1.0 + 1e-9), "{} > {}", seeded.rss, pl.rss);
    }

    #[test]
    fn forecasts_ignore_held_out_values(split in 10usize..40, bump in 1.0f64..1e4) {
        let base: Vec<f64> = (1..=50).map(|t| 2.0 * (t as f64).powf(0.8)).collect();
        let mut changed = base.clone();
        for v in &mut changed[split..] {
            *v += bump;
        }
        let models = [ModelKind::PowerLaw, ModelKind::Linear];
        let a = oos_forecast(&GrowthSeries::from_counts(base).unwrap(), split, &models).unwrap();
        let b = oos_forecast(&GrowthSeries::from_counts(changed).unwrap(), split, &models).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(&x.fit.params, &y.fit.params);
        }
    }

    #[test]
    fn bootstrap_percentiles_are_ordered(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = GrowthSeries::from_counts((1..=40).map(|t| {
            let e: f64 = rand::Rng::gen_range(&mut rng, -0.03..0.03);
            5.0 * (t as f64).powf(0.9) * (1.0 + e)
        })).unwrap();
        let base = fit_nonlinear(ModelKind::PowerLaw, &s);
        let r = bootstrap_ci(&base, &s, 60, seed);
        for p in &r.params {
            prop_assert!(p.lower95 <= p.upper95, "{p:?}");
        }
    }

    #[test]
    fn percentile_is_monotone_in_q(mut xs in prop::collection::vec(-1e6f64..1e6, 1..50), q1 in 0.0f64..100.0, q2 in 0.0f64..100.0) {
        xs.sort_by(f64::total_cmp);
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        prop_assert!(percentile(&xs, lo) <= percentile(&xs, hi));
        prop_assert!(percentile(&xs, 0.0) == xs[0] && percentile(&xs, 100.0) == xs[xs.len() - 1]);
    }

    #[test]
    fn simulated_growth_is_strictly_increasing(big_k in 0.1f64..5.0, k in 0.0f64..0.95, mu in 0.0f64..0.01, n0 in 0.0f64..10.0) {
        let s = simulate_ode(&ClosureParams { big_k, k, mu, n0 }, 60.0, 0.05).unwrap();
        prop_assert!(s.n().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn folds_partition_the_samples(n in 2usize..300, folds in 2usize..10, seed in any::<u64>()) {
        prop_assume!(folds <= n);
        let parts = kfold_indices(n, folds, seed);
        prop_assert_eq!(parts.len(), folds);
        let mut all: Vec<usize> = parts.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn gbm_training_loss_never_increases(seed in 0u64..1000, n in 10usize..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rand::Rng::gen_range(&mut rng, 0.0..1.0)).collect()).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * 2.0 - r[1] + rand::Rng::gen_range(&mut rng, -0.1..0.1)).collect();
        let p = GbmParams { n_estimators: 40, ..GbmParams::default() };
        let m = fit_gbm(&x, &y, &p).unwrap();
        prop_assert!(m.train_mse.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let again = fit_gbm(&x, &y, &p).unwrap();
        prop_assert_eq!(&m.train_mse, &again.train_mse);
        let (lo, hi) = y.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        let max_leaf = m.trees.iter().map(|t| t.max_leaf()).fold(0.0, f64::max);
        let margin = p.learning_rate * max_leaf * m.trees.len() as f64;
        for r in &x {
            let v = m.predict(r);
            prop_assert!(v >= lo - margin && v <= hi + margin);
        }
    }

    #[test]
    fn predicting_the_mean_scores_zero(y in prop::collection::vec(-10.0f64..10.0, 2..50)) {
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        prop_assume!(y.iter().any(|v| (v - mean).abs() > 1e-9));
        prop_assert!(r2_score(&y, &vec![mean; y.len()]).abs() < 1e-12);
    }
}

fn records() -> impl Strategy<Value = Vec<CommitRecord>> {
    let path = prop_oneof![
        Just("Mathlib/Algebra/Basic.lean".to_string()),
        Just("Mathlib/Order.lean".to_string()),
        Just("Archive/X.lean".to_string()),
        Just("docs/a b.md".to_string()),
    ];
    prop::collection::vec((2019i32..2025, 1u32..13, prop::collection::vec(path, 0..4)), 1..40).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (y, m, added_paths))| CommitRecord {
                hash: format!("{i:040x}"),
                month: YearMonth::new(y, m).unwrap(),
                added_paths,
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn printed_logs_parse_back(recs in records()) {
        let mut buf = Vec::new();
        write_log(&recs, &mut buf).unwrap();
        prop_assert_eq!(parse_log(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn monthly_series_is_order_free_and_cumulative(recs in records(), rot in 0usize..40) {
        for (mode, glob) in [(CountMode::Commits, None), (CountMode::NewFiles, Some("Mathlib/**/*.lean"))] {
            let a = monthly_series(&recs, mode, glob).unwrap();
            let mut shuffled = recs.clone();
            shuffled.reverse();
            let k = rot % shuffled.len();
            shuffled.rotate_left(k);
            prop_assert_eq!(&monthly_series(&shuffled, mode, glob).unwrap(), &a);
            prop_assert!(a.cumulative.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(*a.cumulative.last().unwrap(), a.increments.iter().sum::<u64>());
            prop_assert!(a.months.windows(2).all(|w| w[0].succ() == w[1]));
        }
        prop_assert_eq!(monthly_series(&recs, CountMode::Commits, None).unwrap().total(), recs.len() as u64);
    }
}
