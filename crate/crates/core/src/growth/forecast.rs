use serde::Serialize;

use super::fit::{fit_nonlinear, FitResult};
use super::models::ModelKind;
use super::series::GrowthSeries;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForecastResult {
    pub model: ModelKind,
    pub split: usize,
    pub rmse_oos: f64,
    pub mape_oos: f64,
    pub fit: FitResult,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("split {split} must satisfy 4 <= split < {len}")]
pub struct SplitError {
    pub split: usize,
    pub len: usize,
}

/// Fits each model on the first `split` points and scores the rest.
pub fn oos_forecast(series: &GrowthSeries, split: usize, models: &[ModelKind]) -> Result<Vec<ForecastResult>, SplitError> {
    if split < 4 || split >= series.len() {
        return Err(SplitError { split, len: series.len() });
    }
    let prefix = series.prefix(split);
    let held_t = &series.t()[split..];
    let held_n = &series.n()[split..];
    Ok(models
        .iter()
        .map(|&model| {
            let fit = fit_nonlinear(model, &prefix);
            let (rmse_oos, mape_oos) = if fit.converged {
                let errs: Vec<(f64, f64)> = held_t.iter().zip(held_n).map(|(&t, &n)| (fit.predict(t) - n, n)).collect();
                let rmse = (errs.iter().map(|(e, _)| e * e).sum::<f64>() / errs.len() as f64).sqrt();
                let pos: Vec<f64> = errs.iter().filter(|(_, n)| *n > 0.0).map(|(e, n)| e.abs() / n).collect();
                let mape = if pos.is_empty() { f64::NAN } else { pos.iter().sum::<f64>() / pos.len() as f64 };
                (rmse, mape)
            } else {
                (f64::INFINITY, f64::INFINITY)
            };
            ForecastResult { model, split, rmse_oos, mape_oos, fit }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_power_law_forecasts_exactly() {
        let s = GrowthSeries::from_counts((1..=120).map(|t| 2.0 * (t as f64).powf(0.7))).unwrap();
        let r = oos_forecast(&s, 60, &[ModelKind::PowerLaw]).unwrap();
        assert!(r[0].rmse_oos < 1e-8, "{}", r[0].rmse_oos);
    }

    #[test]
    fn held_out_values_do_not_leak() {
        let base: Vec<f64> = (1..=50).map(|t| 3.0 * (t as f64).powf(0.8)).collect();
        let mut other = base.clone();
        for v in &mut other[30..] {
            *v *= 1.7;
        }
        let a = oos_forecast(&GrowthSeries::from_counts(base).unwrap(), 30, &[ModelKind::SaturatingPl]).unwrap();
        let b = oos_forecast(&GrowthSeries::from_counts(other).unwrap(), 30, &[ModelKind::SaturatingPl]).unwrap();
        assert_eq!(a[0].fit.params, b[0].fit.params);
    }

    #[test]
    fn rejects_bad_splits() {
        let s = GrowthSeries::from_counts((1..=10).map(|t| t as f64)).unwrap();
        assert!(oos_forecast(&s, 3, &[ModelKind::Linear]).is_err());
        assert!(oos_forecast(&s, 10, &[ModelKind::Linear]).is_err());
    }
}
