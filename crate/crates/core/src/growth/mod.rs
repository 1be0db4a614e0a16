//! Growth-law fitting, model selection, bootstrap intervals and forecasts.

mod bootstrap;
mod fit;
mod forecast;
mod lm;
mod models;
mod series;

pub use bootstrap::{bootstrap_ci, percentile, BootstrapResult, ParamInterval, DEFAULT_RESAMPLES};
pub use fit::{
    aic, bic, fit_from_starts, fit_nonlinear, fit_power_law, fit_power_law_min, fits_table, rank, select_model,
    start_points, write_fits_csv, FitError, FitResult, MIN_LOG_POINTS, SATURATING_K_GRID, SATURATING_MU_GRID,
};
pub use forecast::{oos_forecast, ForecastResult, SplitError};
pub use lm::{levenberg_marquardt, LmOutcome, MAX_ITERATIONS, RELATIVE_TOLERANCE};
pub use models::{normal_cdf, normal_pdf, ModelKind, MAX_ABS_K, MAX_ABS_MU, STRETCHED_TAU_SPAN};
pub use series::{GrowthSeries, SeriesError};
