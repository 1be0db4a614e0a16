use std::cmp::Ordering;
use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::lm::{self, levenberg_marquardt};
use super::models::ModelKind;
use super::series::GrowthSeries;

/// Minimum number of points with `n ≥ 1` for a log-space power-law fit.
pub const MIN_LOG_POINTS: usize = 4;

pub const SATURATING_K_GRID: [f64; 5] = [0.3, 0.6, 0.9, 1.2, 2.0];
pub const SATURATING_MU_GRID: [f64; 4] = [1e-4, 1e-3, 1e-2, 0.0];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FitError {
    #[error("model selection needs at least two candidate models")]
    TooFewModels,
    #[error("series has {0} points; at least {1} are needed")]
    TooFewPoints(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub model: ModelKind,
    pub params: Vec<f64>,
    /// Linear-space residual sum of squares.
    pub rss: f64,
    pub r2: f64,
    pub aic: f64,
    pub bic: f64,
    pub converged: bool,
    pub degenerate: bool,
    pub start_point: Vec<f64>,
    /// Coefficient of determination of the log-log regression (power law only).
    pub log_r2: Option<f64>,
    pub n_points: usize,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.model.param_names().iter().position(|&p| p == name).map(|i| self.params[i])
    }

    pub fn predict(&self, t: f64) -> f64 {
        self.model.eval(&self.params, t)
    }

    /// Selection class: usable fits first, then degenerate ones, then failures.
    fn class(&self) -> u8 {
        match (self.converged, self.degenerate) {
            (true, false) => 0,
            (true, true) => 1,
            (false, _) => 2,
        }
    }
}

/// AIC with linear-space residuals: `n ln(rss/n) + 2p`.
pub fn aic(rss: f64, n: usize, p: usize) -> f64 {
    let n = n as f64;
    n * (rss.max(f64::MIN_POSITIVE) / n).ln() + 2.0 * p as f64
}

/// BIC: `n ln(rss/n) + p ln n`.
pub fn bic(rss: f64, n: usize, p: usize) -> f64 {
    let nf = n as f64;
    nf * (rss.max(f64::MIN_POSITIVE) / nf).ln() + p as f64 * nf.ln()
}

fn r_squared(ss_res: f64, values: &[f64]) -> f64 {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let ss_tot: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}

fn finish(model: ModelKind, series: &GrowthSeries, params: Vec<f64>, rss: f64, converged: bool, start: Vec<f64>) -> FitResult {
    let n = series.len();
    let p = model.n_params();
    let degenerate = converged && model.is_degenerate(&params, series);
    FitResult {
        model,
        r2: r_squared(rss, series.n()),
        aic: if converged { aic(rss, n, p) } else { f64::INFINITY },
        bic: if converged { bic(rss, n, p) } else { f64::INFINITY },
        converged,
        degenerate,
        start_point: start,
        log_r2: None,
        n_points: n,
        params,
        rss,
    }
}

struct LogOls {
    a: f64,
    b: f64,
    log_r2: f64,
}

fn log_ols(series: &GrowthSeries) -> Option<LogOls> {
    log_ols_min(series, MIN_LOG_POINTS)
}

fn log_ols_min(series: &GrowthSeries, min_points: usize) -> Option<LogOls> {
    let pts: Vec<(f64, f64)> =
        series.t().iter().zip(series.n()).filter(|(_, &n)| n >= 1.0).map(|(&t, &n)| (t.ln(), n.ln())).collect();
    if pts.len() < min_points.max(2) {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    let ln_a = my - b * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - ln_a - b * p.0).powi(2)).sum();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    Some(LogOls { a: ln_a.exp(), b, log_r2: r_squared(sse, &ys) })
}

/// Ordinary least squares on `(ln t, ln n)` over the points with `n ≥ 1`.
///
/// With fewer than [`MIN_LOG_POINTS`] such points the fit is flat (`b = 0`)
/// and flagged degenerate. RSS, R² and AIC are reported in linear space.
pub fn fit_power_law(series: &GrowthSeries) -> FitResult {
    fit_power_law_min(series, MIN_LOG_POINTS)
}

/// [`fit_power_law`] with a custom minimum point count (at least two), for
/// short fixtures such as yearly snapshots.
pub fn fit_power_law_min(series: &GrowthSeries, min_points: usize) -> FitResult {
    match log_ols_min(series, min_points) {
        Some(ols) => {
            let params = vec![ols.a, ols.b];
            let rss = lm::rss(ModelKind::PowerLaw, &params, series);
            let mut fit = finish(ModelKind::PowerLaw, series, params.clone(), rss, true, params);
            fit.log_r2 = Some(ols.log_r2);
            fit
        }
        None => {
            let mean = if series.is_empty() { 0.0 } else { series.n().iter().sum::<f64>() / series.len() as f64 };
            let params = vec![mean, 0.0];
            let rss = lm::rss(ModelKind::PowerLaw, &params, series);
            let mut fit = finish(ModelKind::PowerLaw, series, params.clone(), rss, true, params);
            fit.degenerate = true;
            fit
        }
    }
}

/// Start points for the multi-start search.
pub fn start_points(model: ModelKind, series: &GrowthSeries) -> Vec<Vec<f64>> {
    let t = series.t();
    let n = series.n();
    let (t0, n0) = (t[0], n[0].max(1e-3));
    let t_max = *t.last().expect("non-empty series");
    let n_max = n.iter().copied().fold(0.0, f64::max).max(1e-3);
    let pl = log_ols(series).map(|o| (o.a, o.b));
    match model {
        ModelKind::PowerLaw => {
            let mut s = Vec::new();
            if let Some((a, b)) = pl {
                s.push(vec![a, b]);
            }
            s.push(vec![n_max / t_max, 1.0]);
            s
        }
        ModelKind::Linear => {
            let k = t.len() as f64;
            let mt = t.iter().sum::<f64>() / k;
            let mn = n.iter().sum::<f64>() / k;
            let sxx: f64 = t.iter().map(|x| (x - mt).powi(2)).sum();
            let sxy: f64 = t.iter().zip(n).map(|(x, y)| (x - mt) * (y - mn)).sum();
            let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
            vec![vec![mn - b * mt, b]]
        }
        ModelKind::SaturatingPl => {
            let mut s = Vec::new();
            for &k in &SATURATING_K_GRID {
                for &mu in &SATURATING_MU_GRID {
                    let w = t0.powf(k);
                    s.push(vec![n0 * (1.0 + mu * w) / w, k, mu]);
                }
            }
            if let Some((a, b)) = pl {
                s.push(vec![a, b, 0.0]);
            }
            s
        }
        ModelKind::StretchedExp => {
            let mut s = Vec::new();
            for fa in [1.05, 1.5, 3.0, 10.0] {
                for ft in [0.25, 0.5, 1.0, 2.0, 5.0] {
                    for beta in [0.5, 1.0] {
                        s.push(vec![fa * n_max, ft * t_max, beta]);
                    }
                }
            }
            s
        }
        ModelKind::LogNormal => {
            let lt = t_max.ln();
            let mut s = Vec::new();
            for fa in [1.05, 1.5, 3.0] {
                for m in [0.5 * lt, lt - 1.0, lt, lt + 1.0] {
                    for sd in [0.5, 1.0, 2.0] {
                        s.push(vec![fa * n_max, m, sd]);
                    }
                }
            }
            s
        }
    }
}

/// Linear-space least squares from every start point; the lowest-RSS
/// converged run wins, or the lowest-RSS run when none converged.
pub fn fit_nonlinear(model: ModelKind, series: &GrowthSeries) -> FitResult {
    fit_from_starts(model, series, &start_points(model, series))
}

pub fn fit_from_starts(model: ModelKind, series: &GrowthSeries, starts: &[Vec<f64>]) -> FitResult {
    let mut best: Option<(lm::LmOutcome, &Vec<f64>)> = None;
    for start in starts {
        let out = levenberg_marquardt(model, series, start);
        let better = match &best {
            None => true,
            Some((b, _)) => (out.converged, -out.rss) > (b.converged, -b.rss),
        };
        if better {
            best = Some((out, start));
        }
    }
    let (out, start) = best.expect("at least one start point");
    let mut fit = finish(model, series, out.params, out.rss, out.converged, start.clone());
    if model == ModelKind::PowerLaw {
        fit.log_r2 = log_ols(series).map(|o| o.log_r2);
    }
    fit
}

/// Fits every model and ranks: converged non-degenerate fits by ascending AIC,
/// then degenerate fits by AIC, then non-converged fits.
pub fn select_model(series: &GrowthSeries, models: &[ModelKind]) -> Result<Vec<FitResult>, FitError> {
    if models.len() < 2 {
        return Err(FitError::TooFewModels);
    }
    let need = models.iter().map(|m| m.n_params()).max().unwrap_or(0) + 1;
    if series.len() < need {
        return Err(FitError::TooFewPoints(series.len(), need));
    }
    let mut fits: Vec<FitResult> = models.iter().map(|&m| fit_nonlinear(m, series)).collect();
    rank(&mut fits);
    Ok(fits)
}

pub fn rank(fits: &mut [FitResult]) {
    fits.sort_by(|a, b| a.class().cmp(&b.class()).then(a.aic.partial_cmp(&b.aic).unwrap_or(Ordering::Equal)));
}

const CSV_PARAM_COLUMNS: [&str; 8] = ["a", "b", "k", "mu", "tau", "beta", "m", "s"];

/// One CSV row per fit; parameters a model does not have are left empty.
pub fn write_fits_csv<W: Write>(fits: &[FitResult], mut w: W) -> std::io::Result<()> {
    writeln!(w, "model,{},rss,r2,aic,bic,converged,degenerate", CSV_PARAM_COLUMNS.join(","))?;
    for f in fits {
        let cols: Vec<String> =
            CSV_PARAM_COLUMNS.iter().map(|c| f.param(c).map(|v| v.to_string()).unwrap_or_default()).collect();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            f.model,
            cols.join(","),
            f.rss,
            f.r2,
            f.aic,
            f.bic,
            f.converged,
            f.degenerate
        )?;
    }
    Ok(())
}

pub fn fits_table(fits: &[FitResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<14} {:>12} {:>8} {:>12} {:>5} {:>5}  params", "model", "aic", "r2", "rss", "conv", "degen");
    for f in fits {
        let params: Vec<String> =
            f.model.param_names().iter().zip(&f.params).map(|(n, v)| format!("{n}={v:.6}")).collect();
        let _ = writeln!(
            s,
            "{:<14} {:>12.2} {:>8.4} {:>12.4e} {:>5} {:>5}  {}",
            f.model.as_str(),
            f.aic,
            f.r2,
            f.rss,
            if f.converged { "yes" } else { "no" },
            if f.degenerate { "yes" } else { "no" },
            params.join(" ")
        );
    }
    s
}
