//! Sweep execution, trajectory persistence, analysis and report emission.

mod analyze;
mod plan;
mod report;
mod run;
pub mod svg;

pub use analyze::{
    analyze, AnalyzeOptions, DomainSummary, HistogramBin, OosRow, RegressionSummary, Report, TrajectoryRow,
    WindowCount, WindowFit, DEFAULT_WINDOWS,
};
pub use plan::{PlanError, SweepPlan};
pub use report::{write_report, ReportFormat};
pub use run::{read_records, rules_file_name, run_sweep, ErrorEntry, SweepError, SweepRecord, SweepSummary};
