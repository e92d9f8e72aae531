//! Segmentation scoring: confusion counts, IoU, accuracy, the normalised
//! performance score and the per-category scorecard.

mod confusion;
mod curve;
mod report;
mod score;

pub use confusion::{confusion, confusion_raw, ConfusionCounts, Iou, DEFAULT_THRESHOLD};
pub use curve::{curve_csv, curve_series, score_curve, CurvePoint, CurveRun};
pub use report::{
    category_report, evaluate_manifest, parse_category_map, CategoryStats, EvalOptions, EvalReport, Scorecard,
    SUCCESS_THRESHOLD,
};
pub use score::{performance_score, ScoreParams};
