use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::dataset::{DatasetRow, FeatureOptions};
use super::gbm::{fit_gbm, GbmError, GbmParams};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvReport {
    pub folds: usize,
    pub shuffle_seed: u64,
    pub r2: Vec<f64>,
    pub mae: Vec<f64>,
    pub r2_mean: f64,
    /// Population standard deviation over folds.
    pub r2_std: f64,
    pub mae_mean: f64,
    /// Out-of-fold `(actual, predicted)` in sample order.
    pub pairs: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    /// Against the test-set mean.
    pub r2: f64,
    pub mae: f64,
    pub mean_pred: f64,
    pub mean_actual: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub pairs: Vec<(f64, f64)>,
}

/// Coefficient of determination against the mean of `actual`.
///
/// A constant `actual` scores 1 when predicted exactly and 0 otherwise.
pub fn r2_score(actual: &[f64], pred: &[f64]) -> f64 {
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    let ss_res: f64 = actual.iter().zip(pred).map(|(a, p)| (a - p).powi(2)).sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    1.0 - ss_res / ss_tot
}

fn mae(actual: &[f64], pred: &[f64]) -> f64 {
    actual.iter().zip(pred).map(|(a, p)| (a - p).abs()).sum::<f64>() / actual.len() as f64
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Held-out index sets: a seeded shuffle cut into `folds` contiguous blocks,
/// the first `n % folds` blocks one longer.
pub fn kfold_indices(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng::stream(seed, rng::STREAM_FOLDS));
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = n / folds + usize::from(f < n % folds);
        out.push(perm[start..start + len].to_vec());
        start += len;
    }
    out
}

pub fn kfold_cv(x: &[Vec<f64>], y: &[f64], folds: usize, shuffle_seed: u64, params: &GbmParams) -> Result<CvReport, GbmError> {
    if folds < 2 || y.len() < folds {
        return Err(GbmError::TooFewSamples { min: folds.max(2), got: y.len() });
    }
    let sets = kfold_indices(y.len(), folds, shuffle_seed);
    let results = sets
        .par_iter()
        .map(|test| {
            let mut held = vec![false; y.len()];
            for &i in test {
                held[i] = true;
            }
            let (tx, ty): (Vec<Vec<f64>>, Vec<f64>) =
                (0..y.len()).filter(|&i| !held[i]).map(|i| (x[i].clone(), y[i])).unzip();
            let model = fit_gbm(&tx, &ty, params)?;
            let pred: Vec<f64> = test.iter().map(|&i| model.predict(&x[i])).collect();
            let actual: Vec<f64> = test.iter().map(|&i| y[i]).collect();
            Ok((r2_score(&actual, &pred), mae(&actual, &pred), pred))
        })
        .collect::<Result<Vec<_>, GbmError>>()?;
    let mut pairs = vec![(0.0, 0.0); y.len()];
    for (test, (_, _, pred)) in sets.iter().zip(&results) {
        for (&i, &p) in test.iter().zip(pred) {
            pairs[i] = (y[i], p);
        }
    }
    let r2: Vec<f64> = results.iter().map(|r| r.0).collect();
    let maes: Vec<f64> = results.iter().map(|r| r.1).collect();
    let r2_mean = mean(&r2);
    let r2_std = (r2.iter().map(|v| (v - r2_mean).powi(2)).sum::<f64>() / r2.len() as f64).sqrt();
    Ok(CvReport { folds, shuffle_seed, r2_mean, r2_std, mae_mean: mean(&maes), r2, mae: maes, pairs })
}

/// Fits on one population and scores another.
pub fn transfer_eval(
    train_x: &[Vec<f64>],
    train_y: &[f64],
    test_x: &[Vec<f64>],
    test_y: &[f64],
    params: &GbmParams,
) -> Result<TransferReport, GbmError> {
    let model = fit_gbm(train_x, train_y, params)?;
    let pred: Vec<f64> = test_x.iter().map(|r| model.predict(r)).collect();
    Ok(TransferReport {
        r2: r2_score(test_y, &pred),
        mae: mae(test_y, &pred),
        mean_pred: mean(&pred),
        mean_actual: mean(test_y),
        n_train: train_y.len(),
        n_test: test_y.len(),
        pairs: test_y.iter().copied().zip(pred).collect(),
    })
}

/// Cross-validation over all rows with the domain one-hot switched on.
pub fn pooled_eval(
    rows: &[DatasetRow],
    opts: FeatureOptions,
    folds: usize,
    shuffle_seed: u64,
    params: &GbmParams,
) -> Result<CvReport, GbmError> {
    let (x, y) = DatasetRow::matrix(rows, FeatureOptions { domain: true, ..opts });
    kfold_cv(&x, &y, folds, shuffle_seed, params)
}

/// `actual,predicted` rows for plotting.
pub fn write_pairs_csv<W: Write>(pairs: &[(f64, f64)], mut w: W) -> std::io::Result<()> {
    writeln!(w, "actual,predicted")?;
    for (a, p) in pairs {
        writeln!(w, "{a},{p}")?;
    }
    Ok(())
}
