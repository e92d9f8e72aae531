//! Tool configuration file: every tunable of generation, detection and
//! scoring in one versioned JSON document. Missing keys take their defaults.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baseline::DetectorParams;
use crate::dataset::{CaptureRig, GenerateOptions};
use crate::error::{Error, Result};
use crate::field_model::{Category, FieldSpec, VariationParams};
use crate::metrics::{ScoreParams, SUCCESS_THRESHOLD};
use crate::render::{self, CameraIntrinsics, SceneStyle};

pub const CONFIG_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolConfig {
    pub schema: u32,
    pub field: FieldSpec,
    pub intrinsics: CameraIntrinsics,
    pub rig: CaptureRig,
    pub stripe_width_m: f64,
    /// Replaces the named style preset when set.
    pub style: Option<SceneStyle>,
    pub intensity: Option<f64>,
    pub variations: BTreeMap<Category, VariationParams>,
    pub detector: DetectorParams,
    pub score: ScoreParams,
    pub success_threshold: f64,
}

impl Default for ToolConfig {
    fn default() -> Self {
        ToolConfig {
            schema: CONFIG_SCHEMA,
            field: FieldSpec::default(),
            intrinsics: CameraIntrinsics::default(),
            rig: CaptureRig::default(),
            stripe_width_m: render::DEFAULT_STRIPE_WIDTH_M,
            style: None,
            intensity: None,
            variations: BTreeMap::new(),
            detector: DetectorParams::default(),
            score: ScoreParams::default(),
            success_threshold: SUCCESS_THRESHOLD,
        }
    }
}

impl ToolConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ToolConfig = serde_json::from_str(text)?;
        if cfg.schema != CONFIG_SCHEMA {
            return Err(Error::Schema(cfg.schema));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        self.intrinsics.validate()?;
        if let Some(style) = &self.style {
            style.validate()?;
        }
        if !(self.stripe_width_m > 0.0 && self.stripe_width_m.is_finite()) {
            return Err(Error::invalid("stripe_width_m", "must be positive"));
        }
        if let Some(i) = self.intensity {
            if !(0.0..=1.0).contains(&i) {
                return Err(Error::invalid("intensity", "must lie in [0, 1]"));
            }
        }
        self.detector.hough.validate()?;
        self.score.validate()
    }

    /// Generation options for `count` images, using `preset` unless the
    /// config carries its own style.
    pub fn generate_options(&self, count: usize, preset: &str, seed: u64) -> Result<GenerateOptions> {
        let style = match &self.style {
            Some(s) => s.clone(),
            None => SceneStyle::preset(preset)?,
        };
        let mut opts = GenerateOptions::new(count, style, seed);
        opts.field = self.field.clone();
        opts.intrinsics = self.intrinsics.clone();
        opts.rig = self.rig.clone();
        opts.stripe_width_m = self.stripe_width_m;
        opts.intensity = self.intensity;
        opts.variation_params = self.variations.clone();
        Ok(opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(ToolConfig::from_json(r#"{"schema": 1}"#).unwrap(), ToolConfig::default());
        assert_eq!(ToolConfig::from_json("{}").unwrap(), ToolConfig::default());
    }

    #[test]
    fn round_trip() {
        let mut c = ToolConfig::default();
        c.variations.insert(Category::DenseWeed, VariationParams {
            weed_density_per_m2: Some(30.0),
            ..Default::default()
        });
        c.intensity = Some(0.7);
        assert_eq!(ToolConfig::from_json(&c.to_json().unwrap()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(ToolConfig::from_json(r#"{"schema": 2}"#), Err(Error::Schema(2))));
        assert!(ToolConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(ToolConfig::from_json(r#"{"field": {"row_spacing_m": -1}}"#).is_err());
        assert!(ToolConfig::from_json(r#"{"variations": {"z": {}}}"#).is_err());
    }
}
