//! JSON configuration file for the command-line tool. Every section is
//! optional; command-line flags override the values read here.
//!
//! ```json
//! {
//!   "sweep": { "domains": ["arith"], "seeds": [0, 1, 2], "epochs": 30, "workers": 8 },
//!   "analyze": { "windows": [30, 50], "split": 100, "folds": 5, "shuffle_seed": 0 },
//!   "gbm": { "n_estimators": 200, "max_depth": 3, "learning_rate": 0.1 },
//!   "bootstrap": { "resamples": 500, "seed": 0 }
//! }
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::growth::ModelKind;
use crate::regress::GbmParams;
use crate::sweep::SweepPlan;

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub sweep: Option<SweepPlan>,
    #[serde(default)]
    pub analyze: AnalyzeSection,
    pub gbm: Option<GbmParams>,
    #[serde(default)]
    pub bootstrap: BootstrapSection,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeSection {
    pub windows: Option<Vec<usize>>,
    pub models: Option<Vec<ModelKind>>,
    pub split: Option<usize>,
    pub folds: Option<usize>,
    pub shuffle_seed: Option<u64>,
    pub include_seed: Option<bool>,
    pub histogram_width: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSection {
    pub resamples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigFileError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigFileError::Io { path: path.display().to_string(), source })?;
        serde_json::from_str(&text).map_err(|source| ConfigFileError::Json { path: path.display().to_string(), source })
    }
}
