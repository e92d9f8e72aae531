use serde::{Deserialize, Serialize};

use crate::dataset::Domain;
use crate::error::{Error, Result};

pub type Rgb = [f64; 3];

/// Appearance of a rendered scene. Colours are linear RGB in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneStyle {
    pub style_id: String,
    pub domain: Domain,
    pub soil_rgb: Rgb,
    /// Colour of compacted soil in tyre ruts and of clods.
    pub soil_dark_rgb: Rgb,
    pub soil_noise_octaves: u32,
    /// Feature size of the lowest noise octave.
    pub soil_noise_scale_m: f64,
    pub soil_noise_amplitude: f64,
    /// Fraction of the soil covered by dark clods.
    pub clod_fraction: f64,
    pub leaf_rgb: Rgb,
    /// Per-leaf multiplicative tint spread.
    pub leaf_variation: f64,
    pub vein_strength: f64,
    pub weed_rgb: Rgb,
    pub sky_horizon_rgb: Rgb,
    pub sky_zenith_rgb: Rgb,
    pub sun_azimuth_deg: f64,
    pub sun_elevation_deg: f64,
    pub sun_intensity: f64,
    pub ambient: f64,
    pub exposure: f64,
    /// Amplitude of per-pixel sensor noise.
    pub sensor_noise: f64,
    pub texture_seed: u64,
}

impl SceneStyle {
    /// The simulated domain: clean textures, high sun.
    pub fn sim() -> SceneStyle {
        SceneStyle {
            style_id: "sim".into(),
            domain: Domain::Sim,
            soil_rgb: [0.50, 0.39, 0.29],
            soil_dark_rgb: [0.36, 0.27, 0.20],
            soil_noise_octaves: 3,
            soil_noise_scale_m: 0.20,
            soil_noise_amplitude: 0.10,
            clod_fraction: 0.0,
            leaf_rgb: [0.24, 0.52, 0.14],
            leaf_variation: 0.06,
            vein_strength: 0.15,
            weed_rgb: [0.36, 0.58, 0.18],
            sky_horizon_rgb: [0.78, 0.84, 0.90],
            sky_zenith_rgb: [0.45, 0.62, 0.86],
            sun_azimuth_deg: 135.0,
            sun_elevation_deg: 60.0,
            sun_intensity: 0.70,
            ambient: 0.45,
            exposure: 1.0,
            sensor_noise: 0.0,
            texture_seed: 0x51,
        }
    }

    /// A second appearance standing in for real field imagery: greyer, rougher
    /// soil with clods, yellower and more varied leaves, lower sun, sensor noise.
    pub fn real_proxy() -> SceneStyle {
        SceneStyle {
            style_id: "real_proxy".into(),
            domain: Domain::Real,
            soil_rgb: [0.46, 0.38, 0.31],
            soil_dark_rgb: [0.30, 0.24, 0.19],
            soil_noise_octaves: 6,
            soil_noise_scale_m: 0.35,
            soil_noise_amplitude: 0.22,
            clod_fraction: 0.12,
            leaf_rgb: [0.31, 0.50, 0.18],
            leaf_variation: 0.14,
            vein_strength: 0.25,
            weed_rgb: [0.40, 0.55, 0.22],
            sky_horizon_rgb: [0.85, 0.87, 0.88],
            sky_zenith_rgb: [0.60, 0.68, 0.78],
            sun_azimuth_deg: 220.0,
            sun_elevation_deg: 40.0,
            sun_intensity: 0.65,
            ambient: 0.40,
            exposure: 1.05,
            sensor_noise: 0.025,
            texture_seed: 0x7EA1,
        }
    }

    /// Look up a preset by id (`sim`, `real` / `real_proxy`).
    pub fn preset(id: &str) -> Result<SceneStyle> {
        match id {
            "sim" => Ok(SceneStyle::sim()),
            "real" | "real_proxy" | "real-proxy" => Ok(SceneStyle::real_proxy()),
            other => Err(Error::invalid("style", format!("unknown style preset `{other}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let colours = [
            ("soil_rgb", self.soil_rgb),
            ("soil_dark_rgb", self.soil_dark_rgb),
            ("leaf_rgb", self.leaf_rgb),
            ("weed_rgb", self.weed_rgb),
            ("sky_horizon_rgb", self.sky_horizon_rgb),
            ("sky_zenith_rgb", self.sky_zenith_rgb),
        ];
        for (field, c) in colours {
            if c.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::invalid(field, "colour channels must lie in [0, 1]"));
            }
        }
        if !(self.sun_elevation_deg > 0.0 && self.sun_elevation_deg <= 90.0) {
            return Err(Error::invalid("sun_elevation_deg", "must lie in (0, 90]"));
        }
        for (field, v) in [
            ("sun_intensity", self.sun_intensity),
            ("ambient", self.ambient),
            ("exposure", self.exposure),
            ("sensor_noise", self.sensor_noise),
            ("soil_noise_amplitude", self.soil_noise_amplitude),
            ("leaf_variation", self.leaf_variation),
            ("vein_strength", self.vein_strength),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, "must be non-negative"));
            }
        }
        if !(0.0..=1.0).contains(&self.clod_fraction) {
            return Err(Error::invalid("clod_fraction", "must lie in [0, 1]"));
        }
        if !(self.soil_noise_scale_m > 0.0) {
            return Err(Error::invalid("soil_noise_scale_m", "must be positive"));
        }
        Ok(())
    }
}
