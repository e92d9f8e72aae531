use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Peak and baseline IoU of the real-data reference model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoreParams {
    pub theta_p: f64,
    pub theta_b: f64,
}

impl Default for ScoreParams {
    fn default() -> Self {
        ScoreParams {
            theta_p: 0.225,
            theta_b: 0.160,
        }
    }
}

impl ScoreParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_p.is_finite() && self.theta_b.is_finite()) {
            return Err(Error::invalid("ScoreParams", "thresholds must be finite"));
        }
        if self.theta_p == self.theta_b {
            return Err(Error::Undefined("performance score with theta_p == theta_b".into()));
        }
        if self.theta_p < self.theta_b {
            return Err(Error::invalid("theta_p", "peak must exceed baseline"));
        }
        Ok(())
    }
}

/// `100 * (iou - theta_b) / (theta_p - theta_b)`, in percent. Negative below
/// the baseline; a positive score marks a usable detector.
pub fn performance_score(theta_m: f64, params: &ScoreParams) -> Result<f64> {
    params.validate()?;
    Ok(100.0 * (theta_m - params.theta_b) / (params.theta_p - params.theta_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_and_reference_values() {
        let p = ScoreParams::default();
        assert_eq!(performance_score(0.225, &p).unwrap(), 100.0);
        assert_eq!(performance_score(0.160, &p).unwrap(), 0.0);
        assert!((performance_score(0.2128, &p).unwrap() - 81.2).abs() < 0.05);
        assert!((performance_score(0.0693, &p).unwrap() + 139.5).abs() < 0.05);
    }

    #[test]
    fn equal_thresholds_are_rejected() {
        let p = ScoreParams { theta_p: 0.2, theta_b: 0.2 };
        assert!(matches!(performance_score(0.3, &p), Err(Error::Undefined(_))));
    }
}
