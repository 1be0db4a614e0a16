use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::run::SweepRecord;
use crate::discovery::{ArchConfig, FilterKind, Trajectory};
use crate::growth::{fit_power_law, oos_forecast, select_model, GrowthSeries, ModelKind};
use crate::regress::{kfold_cv, pooled_eval, transfer_eval, CvReport, DatasetRow, FeatureOptions, GbmParams, TransferReport};
use crate::term::Domain;

pub const DEFAULT_WINDOWS: [usize; 6] = [30, 50, 100, 200, 300, 500];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyzeOptions {
    pub windows: Vec<usize>,
    pub models: Vec<ModelKind>,
    /// Prefix length for out-of-sample forecasts; skipped for shorter trajectories.
    pub split: Option<usize>,
    pub histogram_width: f64,
    pub features: FeatureOptions,
    pub folds: usize,
    pub shuffle_seed: u64,
    pub gbm: GbmParams,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            windows: DEFAULT_WINDOWS.to_vec(),
            models: ModelKind::ALL.to_vec(),
            split: None,
            histogram_width: 0.1,
            features: FeatureOptions::default(),
            folds: 5,
            shuffle_seed: 0,
            gbm: GbmParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowFit {
    pub window: usize,
    pub winner: ModelKind,
    /// AIC per model on this prefix, `+∞` when the fit failed.
    pub aic: BTreeMap<ModelKind, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OosRow {
    pub key: String,
    pub model: ModelKind,
    pub split: usize,
    pub rmse: f64,
    pub mape: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub key: String,
    pub config: ArchConfig,
    pub final_size: usize,
    pub sizes: Vec<usize>,
    pub a: f64,
    pub b: f64,
    pub log_r2: Option<f64>,
    pub degenerate: bool,
    pub windows: Vec<WindowFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainSummary {
    pub domain: Domain,
    pub n: usize,
    pub mean_b: f64,
    pub max_b: f64,
    pub count_b_gt_1: usize,
    pub frac_b_lt_0_1: f64,
    pub mean_b_any: f64,
    pub mean_b_novelty: f64,
    /// `mean_b_novelty − mean_b_any`.
    pub novelty_effect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowCount {
    pub window: usize,
    pub domain: Domain,
    pub model: ModelKind,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    pub domain: Domain,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegressionSummary {
    pub features: Vec<String>,
    /// Within-substrate cross-validation, keyed by group name (`arith+bool`, `list`).
    pub within: BTreeMap<String, CvReport>,
    /// Train on arith+bool, test on list.
    pub transfer: Option<TransferReport>,
    pub pooled: Option<CvReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub options: AnalyzeOptions,
    pub trajectories: Vec<TrajectoryRow>,
    pub domains: Vec<DomainSummary>,
    pub window_counts: Vec<WindowCount>,
    pub histogram: Vec<HistogramBin>,
    pub oos: Vec<OosRow>,
    pub dataset: Vec<DatasetRow>,
    pub regression: RegressionSummary,
    pub errors: Vec<String>,
}

fn analyze_one(t: &Trajectory, opts: &AnalyzeOptions) -> (TrajectoryRow, Vec<OosRow>) {
    let series = GrowthSeries::from_trajectory(t);
    let pl = fit_power_law(&series);
    let mut windows = Vec::new();
    if opts.models.len() >= 2 {
        for &w in &opts.windows {
            if series.len() < w {
                continue;
            }
            let Ok(fits) = select_model(&series.prefix(w), &opts.models) else { continue };
            windows.push(WindowFit {
                window: w,
                winner: fits[0].model,
                aic: fits.iter().map(|f| (f.model, f.aic)).collect(),
            });
        }
    }
    let key = t.config.key();
    let oos = match opts.split {
        Some(split) if split >= 4 && split < series.len() => oos_forecast(&series, split, &opts.models)
            .map(|rs| {
                rs.into_iter()
                    .map(|r| OosRow { key: key.clone(), model: r.model, split, rmse: r.rmse_oos, mape: r.mape_oos })
                    .collect()
            })
            .unwrap_or_default(),
        _ => Vec::new(),
    };
    let row = TrajectoryRow {
        key,
        config: t.config.clone(),
        final_size: t.sizes.last().copied().unwrap_or(0),
        sizes: t.sizes.clone(),
        a: pl.params[0],
        b: if pl.degenerate { 0.0 } else { pl.params[1] },
        log_r2: pl.log_r2,
        degenerate: pl.degenerate,
        windows,
    };
    (row, oos)
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn summarize(domain: Domain, rows: &[&TrajectoryRow]) -> DomainSummary {
    let bs = || rows.iter().map(|r| r.b);
    let by_filter = |f: FilterKind| mean(rows.iter().filter(|r| r.config.filter == f).map(|r| r.b));
    let (any, nov) = (by_filter(FilterKind::Any), by_filter(FilterKind::Novelty));
    DomainSummary {
        domain,
        n: rows.len(),
        mean_b: mean(bs()),
        max_b: bs().fold(f64::NEG_INFINITY, f64::max),
        count_b_gt_1: bs().filter(|&b| b > 1.0).count(),
        frac_b_lt_0_1: bs().filter(|&b| b < 0.1).count() as f64 / rows.len() as f64,
        mean_b_any: any,
        mean_b_novelty: nov,
        novelty_effect: nov - any,
    }
}

fn histogram(domain: Domain, rows: &[&TrajectoryRow], width: f64) -> Vec<HistogramBin> {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for r in rows {
        *counts.entry((r.b / width).floor() as i64).or_default() += 1;
    }
    let (Some(&lo), Some(&hi)) = (counts.keys().next(), counts.keys().next_back()) else { return vec![] };
    (lo..=hi)
        .map(|i| HistogramBin {
            domain,
            lo: i as f64 * width,
            hi: (i + 1) as f64 * width,
            count: counts.get(&i).copied().unwrap_or(0),
        })
        .collect()
}

fn regression(dataset: &[DatasetRow], opts: &AnalyzeOptions) -> RegressionSummary {
    let feats = opts.features;
    let groups: [(&str, &[Domain]); 2] = [("arith+bool", &[Domain::Arith, Domain::Bool]), ("list", &[Domain::List])];
    let pick = |ds: &[Domain]| -> Vec<DatasetRow> { dataset.iter().filter(|r| ds.contains(&r.domain)).cloned().collect() };
    let mut within = BTreeMap::new();
    for (name, ds) in groups {
        let rows = pick(ds);
        let (x, y) = DatasetRow::matrix(&rows, feats);
        if let Ok(r) = kfold_cv(&x, &y, opts.folds, opts.shuffle_seed, &opts.gbm) {
            within.insert(name.to_string(), r);
        }
    }
    let (train, test) = (pick(groups[0].1), pick(groups[1].1));
    let transfer = (!test.is_empty())
        .then(|| {
            let (tx, ty) = DatasetRow::matrix(&train, feats);
            let (sx, sy) = DatasetRow::matrix(&test, feats);
            transfer_eval(&tx, &ty, &sx, &sy, &opts.gbm).ok()
        })
        .flatten();
    let pooled = pooled_eval(dataset, feats, opts.folds, opts.shuffle_seed, &opts.gbm).ok();
    RegressionSummary { features: crate::regress::feature_names(feats), within, transfer, pooled }
}

/// Fits every trajectory and aggregates. Rows are ordered by config key, so
/// record order in the input does not matter.
pub fn analyze(records: &[SweepRecord], opts: &AnalyzeOptions) -> Report {
    let mut trajectories: Vec<&Trajectory> = Vec::new();
    let mut errors = Vec::new();
    for r in records {
        match r {
            SweepRecord::Trajectory(t) => trajectories.push(t),
            SweepRecord::Error(e) => errors.push(format!("{}: {}", e.key, e.error)),
        }
    }
    trajectories.sort_by_key(|t| t.config.key());
    trajectories.dedup_by_key(|t| t.config.key());
    errors.sort();
    let results: Vec<(TrajectoryRow, Vec<OosRow>)> = trajectories.par_iter().map(|t| analyze_one(t, opts)).collect();
    let (rows, oos): (Vec<TrajectoryRow>, Vec<Vec<OosRow>>) = results.into_iter().unzip();

    let mut domains = Vec::new();
    let mut hist = Vec::new();
    let mut window_counts = Vec::new();
    for d in Domain::ALL {
        let sel: Vec<&TrajectoryRow> = rows.iter().filter(|r| r.config.domain == d).collect();
        if sel.is_empty() {
            continue;
        }
        domains.push(summarize(d, &sel));
        hist.extend(histogram(d, &sel, opts.histogram_width));
        for &w in &opts.windows {
            for &m in &opts.models {
                let count = sel.iter().filter(|r| r.windows.iter().any(|f| f.window == w && f.winner == m)).count();
                if sel.iter().any(|r| r.windows.iter().any(|f| f.window == w)) {
                    window_counts.push(WindowCount { window: w, domain: d, model: m, count });
                }
            }
        }
    }
    let dataset: Vec<DatasetRow> = rows
        .iter()
        .map(|r| DatasetRow {
            domain: r.config.domain,
            generator: r.config.generator,
            filter: r.config.filter,
            depth: r.config.depth,
            batch_size: r.config.batch_size,
            seed: r.config.seed,
            b: r.b,
            degenerate: r.degenerate,
        })
        .collect();
    let regression = regression(&dataset, opts);
    Report {
        options: opts.clone(),
        trajectories: rows,
        domains,
        window_counts,
        histogram: hist,
        oos: oos.concat(),
        dataset,
        regression,
        errors,
    }
}
