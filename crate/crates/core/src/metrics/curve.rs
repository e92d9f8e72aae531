use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::score::{performance_score, ScoreParams};
use crate::dataset::{relative_percentage, MixSpec};
use crate::error::{Error, Result};

/// One trained model: its training composition and overall IoU.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRun {
    #[serde(flatten)]
    pub spec: MixSpec,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub model_id: String,
    pub relative_pct: f64,
    pub iou: f64,
    pub pm: f64,
}

/// Performance score against relative real-data percentage, sorted by
/// percentage (ties by model id).
pub fn score_curve(runs: &[CurveRun], params: &ScoreParams) -> Result<Vec<CurvePoint>> {
    let mut seen = BTreeSet::new();
    let mut points = Vec::with_capacity(runs.len());
    for run in runs {
        if !seen.insert(run.spec.model_id.as_str()) {
            return Err(Error::DuplicateModel(run.spec.model_id.clone()));
        }
        points.push(CurvePoint {
            model_id: run.spec.model_id.clone(),
            relative_pct: relative_percentage(&run.spec)?,
            iou: run.iou,
            pm: performance_score(run.iou, params)?,
        });
    }
    points.sort_by(|a, b| {
        a.relative_pct
            .total_cmp(&b.relative_pct)
            .then_with(|| a.model_id.cmp(&b.model_id))
    });
    Ok(points)
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("relative_pct,iou,pm\n");
    for p in points {
        s.push_str(&format!("{},{},{}\n", p.relative_pct, p.iou, p.pm));
    }
    s
}

/// Column-oriented series, one array per axis, ready for a plotting library.
pub fn curve_series(points: &[CurvePoint]) -> serde_json::Value {
    serde_json::json!({
        "x_label": "relative_pct",
        "y_label": "pm",
        "model_id": points.iter().map(|p| p.model_id.as_str()).collect::<Vec<_>>(),
        "relative_pct": points.iter().map(|p| p.relative_pct).collect::<Vec<_>>(),
        "iou": points.iter().map(|p| p.iou).collect::<Vec<_>>(),
        "pm": points.iter().map(|p| p.pm).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(id: &str, sim: usize, real: usize, iou: f64) -> CurveRun {
        CurveRun { spec: MixSpec::new(id, sim, real, 0), iou }
    }

    #[test]
    fn sorted_by_percentage() {
        let runs = [run("B3", 1000, 200, 0.1731), run("A1", 500, 0, 0.0693), run("A3", 500, 100, 0.1675)];
        let pts = score_curve(&runs, &ScoreParams::default()).unwrap();
        let ids: Vec<_> = pts.iter().map(|p| p.model_id.as_str()).collect();
        assert_eq!(ids, ["A1", "A3", "B3"]);
        assert!((pts[0].pm + 139.54).abs() < 0.01);
        let csv = curve_csv(&pts);
        assert!(csv.starts_with("relative_pct,iou,pm\n0,0.0693,"));
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(curve_series(&pts)["pm"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn single_run_and_errors() {
        assert_eq!(score_curve(&[run("X", 10, 2, 0.2)], &ScoreParams::default()).unwrap().len(), 1);
        let dup = [run("X", 10, 2, 0.2), run("X", 10, 3, 0.2)];
        assert!(matches!(score_curve(&dup, &ScoreParams::default()), Err(Error::DuplicateModel(_))));
        assert!(matches!(
            score_curve(&[run("R", 0, 750, 0.225)], &ScoreParams::default()),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn runs_parse_from_flat_json() {
        let r: CurveRun = serde_json::from_str(r#"{"model_id":"A2","sim_count":500,"real_count":50,"iou":0.1381}"#).unwrap();
        assert_eq!(r.spec.real_count, 50);
    }
}
