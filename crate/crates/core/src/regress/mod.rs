//! Gradient-boosted regression from architecture choices onto growth exponents.

mod dataset;
mod eval;
mod gbm;

pub use dataset::{feature_names, DatasetError, DatasetRow, FeatureOptions};
pub use eval::{kfold_cv, kfold_indices, pooled_eval, r2_score, transfer_eval, write_pairs_csv, CvReport, TransferReport};
pub use gbm::{fit_gbm, GbmError, GbmModel, GbmParams, Tree, MIN_SAMPLES};
