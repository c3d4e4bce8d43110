//! Window-level evaluation: ROC sweeps, fixed-precision operating points,
//! detector comparison and CSV/SVG reports.

mod experiment;
mod operating;
mod report;
mod roc;

pub use operating::{compare, operating_point, relative_reduction, OperatingPoint};
pub use report::{
    emit_report, format_comparison, parse_roc_csv, read_roc_csv, roc_to_csv, roc_to_svg, ComparisonRow, ReportFormat,
    CSV_HEADER,
};
pub use roc::{confusion_at, f_score, roc_curve, score_dataset, RocPoint, ScoredSet, TOP_EPSILON};
pub use experiment::{run_experiment, Arm, ExperimentConfig, ExperimentOutcome, Progress};
