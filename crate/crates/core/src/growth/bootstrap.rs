use rand::Rng as _;
use serde::Serialize;

use super::fit::{fit_from_starts, FitResult};
use super::series::GrowthSeries;
use crate::rng;

pub const DEFAULT_RESAMPLES: usize = 500;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamInterval {
    pub name: &'static str,
    pub lower95: f64,
    pub upper95: f64,
    pub point: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub params: Vec<ParamInterval>,
    pub n_resamples: usize,
    pub failed_fraction: f64,
    /// More than half of the resamples failed to converge.
    pub degenerate: bool,
}

impl BootstrapResult {
    pub fn interval(&self, name: &str) -> Option<&ParamInterval> {
        self.params.iter().find(|p| p.name == name)
    }
}

/// Linear-interpolated percentile of sorted data, `q` in [0, 100].
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Residual-resampling intervals around a converged `base` fit.
///
/// Each resample adds residuals drawn with replacement to the fitted curve,
/// clips negative values to zero and refits from the base parameters.
pub fn bootstrap_ci(base: &FitResult, series: &GrowthSeries, n_resamples: usize, seed: u64) -> BootstrapResult {
    let fitted: Vec<f64> = series.t().iter().map(|&t| base.predict(t)).collect();
    let residuals: Vec<f64> = series.n().iter().zip(&fitted).map(|(n, f)| n - f).collect();
    let mut rng = rng::stream(seed, rng::STREAM_BOOTSTRAP);
    let np = base.params.len();
    let mut draws: Vec<Vec<f64>> = vec![Vec::with_capacity(n_resamples); np];
    let mut failed = 0usize;
    let start = [base.params.clone()];
    for _ in 0..n_resamples {
        let values: Vec<f64> =
            fitted.iter().map(|f| (f + residuals[rng.gen_range(0..residuals.len())]).max(0.0)).collect();
        let resampled = series.with_values(values).expect("clipped values are valid");
        let fit = fit_from_starts(base.model, &resampled, &start);
        if fit.converged {
            for (d, v) in draws.iter_mut().zip(&fit.params) {
                d.push(*v);
            }
        } else {
            failed += 1;
        }
    }
    let params = base
        .model
        .param_names()
        .iter()
        .zip(draws.iter_mut())
        .zip(&base.params)
        .map(|((&name, d), &point)| {
            if d.is_empty() {
                return ParamInterval { name, lower95: f64::NAN, upper95: f64::NAN, point };
            }
            d.sort_by(f64::total_cmp);
            ParamInterval { name, lower95: percentile(d, 2.5), upper95: percentile(d, 97.5), point }
        })
        .collect();
    let failed_fraction = if n_resamples == 0 { 0.0 } else { failed as f64 / n_resamples as f64 };
    BootstrapResult { params, n_resamples, failed_fraction, degenerate: failed_fraction > 0.5 }
}
