use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    FieldLayout, Glare, RobotShadow, ShadowBand, Sun, TyreTrack, WeedInstance, WEED_SCALE,
};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Field-condition categories of the crop-row dataset taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Category {
    /// Shadow falling across the rows.
    HorizontalShadow,
    SlopeCurve,
    Discontinuities,
    /// The robot's own shadow in front of the camera.
    FrontShadow,
    DenseWeed,
    LargeCrops,
    SmallCrops,
    /// Sun in the lens: flare and washed-out colours.
    Sunlight,
    TyreTracks,
    SparseWeed,
}

impl Category {
    pub const ALL: [Category; 10] = [
        Category::HorizontalShadow,
        Category::SlopeCurve,
        Category::Discontinuities,
        Category::FrontShadow,
        Category::DenseWeed,
        Category::LargeCrops,
        Category::SmallCrops,
        Category::Sunlight,
        Category::TyreTracks,
        Category::SparseWeed,
    ];

    pub fn letter(self) -> char {
        (b'a' + self.index() as u8) as char
    }

    pub fn index(self) -> usize {
        Category::ALL.iter().position(|&c| c == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::HorizontalShadow => "Horizontal Shadow",
            Category::SlopeCurve => "Slope/Curve",
            Category::Discontinuities => "Discontinuities",
            Category::FrontShadow => "Front Shadow",
            Category::DenseWeed => "Dense Weed",
            Category::LargeCrops => "Large Crops",
            Category::SmallCrops => "Small Crops",
            Category::Sunlight => "Sunlight",
            Category::TyreTracks => "Tyre Tracks",
            Category::SparseWeed => "Sparse Weed",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c @ 'a'..='j'), None) => Ok(Category::ALL[(c as u8 - b'a') as usize]),
            _ => Err(Error::UnknownCategory(s.to_string())),
        }
    }
}

impl TryFrom<String> for Category {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Category> for String {
    fn from(c: Category) -> String {
        c.letter().to_string()
    }
}

/// Optional per-category overrides. Unset values are derived from the
/// variation's intensity (see [`CategoryVariation::resolved`]).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariationParams {
    /// Sun azimuth for cast shadows, degrees clockwise from the row direction (+y).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shadow_direction_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shadow_band_count: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shadow_band_width_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature_radius_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_grade: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removal_probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weed_density_per_m2: Option<f64>,
    /// Weeds keep at least this far from any centerline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weed_clearance_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub large_crop_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub large_crop_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_crop_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub glare_strength: Option<f64>,
    /// Offset of the tramline centre from the middle of its lane.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tyre_track_offset_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryVariation {
    pub category: Category,
    #[serde(default = "default_intensity")]
    pub intensity: f64,
    #[serde(flatten)]
    pub params: VariationParams,
}

fn default_intensity() -> f64 {
    0.5
}

impl CategoryVariation {
    pub fn new(category: Category, intensity: f64) -> Self {
        CategoryVariation {
            category,
            intensity,
            params: VariationParams::default(),
        }
    }

    /// Discontinuity variation with an explicit removal probability.
    pub fn removal(probability: f64) -> Self {
        let mut v = CategoryVariation::new(Category::Discontinuities, 0.5);
        v.params.removal_probability = Some(probability);
        v
    }

    /// Every parameter relevant to the category filled in: explicit overrides
    /// win, the rest follow from `intensity`.
    pub fn resolved(&self) -> VariationParams {
        let i = self.intensity;
        let p = &self.params;
        let mut r = VariationParams::default();
        match self.category {
            Category::HorizontalShadow => {
                r.shadow_direction_deg = Some(p.shadow_direction_deg.unwrap_or(90.0));
                r.shadow_band_count =
                    Some(p.shadow_band_count.unwrap_or(1 + (2.0 * i).round() as u32));
                r.shadow_band_width_m = Some(p.shadow_band_width_m.unwrap_or(0.3 + 0.9 * i));
            }
            Category::SlopeCurve => {
                r.curvature_radius_m = p
                    .curvature_radius_m
                    .or((i > 0.0).then(|| 12.0 / i));
                r.slope_grade = Some(p.slope_grade.unwrap_or(0.15 * i));
            }
            Category::Discontinuities => {
                r.removal_probability = Some(p.removal_probability.unwrap_or(0.4 * i));
            }
            Category::FrontShadow => {
                r.shadow_direction_deg = p.shadow_direction_deg;
            }
            Category::DenseWeed | Category::SparseWeed => {
                let dense = self.category == Category::DenseWeed;
                let d = if dense { 20.0 + 40.0 * i } else { 1.0 + 4.0 * i };
                r.weed_density_per_m2 = Some(p.weed_density_per_m2.unwrap_or(d));
                r.weed_clearance_m = Some(p.weed_clearance_m.unwrap_or(0.05));
            }
            Category::LargeCrops => {
                r.large_crop_fraction = Some(p.large_crop_fraction.unwrap_or(0.1 + 0.3 * i));
                r.large_crop_scale = Some(p.large_crop_scale.unwrap_or(2.0 + i));
            }
            Category::SmallCrops => {
                r.small_crop_scale = Some(p.small_crop_scale.unwrap_or(1.0 - 0.6 * i));
            }
            Category::Sunlight => {
                r.glare_strength = Some(p.glare_strength.unwrap_or(0.4 + 0.6 * i));
            }
            Category::TyreTracks => {
                r.tyre_track_offset_m = Some(p.tyre_track_offset_m.unwrap_or(0.0));
            }
        }
        r
    }

    pub fn validate(&self, layout: &FieldLayout) -> Result<()> {
        if !(0.0..=1.0).contains(&self.intensity) {
            return Err(Error::invalid("intensity", format!("{} is outside [0, 1]", self.intensity)));
        }
        let r = self.resolved();
        let unit = |field, v: Option<f64>| match v {
            Some(v) if !(0.0..=1.0).contains(&v) => {
                Err(Error::invalid(field, format!("{v} is outside [0, 1]")))
            }
            _ => Ok(()),
        };
        let positive = |field, v: Option<f64>| match v {
            Some(v) if !(v.is_finite() && v > 0.0) => {
                Err(Error::invalid(field, format!("{v} must be positive")))
            }
            _ => Ok(()),
        };
        unit("removal_probability", r.removal_probability)?;
        unit("large_crop_fraction", r.large_crop_fraction)?;
        unit("glare_strength", r.glare_strength)?;
        positive("large_crop_scale", r.large_crop_scale)?;
        positive("small_crop_scale", r.small_crop_scale)?;
        positive("shadow_band_width_m", r.shadow_band_width_m)?;
        positive("curvature_radius_m", r.curvature_radius_m)?;
        if let Some(d) = r.weed_density_per_m2 {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::invalid("weed_density_per_m2", format!("{d} must be non-negative")));
            }
        }
        if let Some(c) = r.weed_clearance_m {
            if !(c >= 0.0 && 2.0 * c < layout.spec.row_spacing_m) {
                return Err(Error::invalid(
                    "weed_clearance_m",
                    "must be non-negative and less than half the row spacing",
                ));
            }
        }
        if let Some(radius) = r.curvature_radius_m {
            if layout.spec.row_length_m / radius > std::f64::consts::PI {
                return Err(Error::invalid(
                    "curvature_radius_m",
                    "rows may bend through at most half a circle",
                ));
            }
        }
        if let Some(g) = r.slope_grade {
            if !(g.is_finite() && g.abs() <= 1.0) {
                return Err(Error::invalid("slope_grade", "must lie in [-1, 1]"));
            }
        }
        Ok(())
    }

    fn stream(&self, layout: &FieldLayout, keys: &[u64]) -> Stream {
        let mut k = vec![rng::tag::VARIATION, self.category.index() as u64];
        k.extend_from_slice(keys);
        Stream::keyed(layout.spec.rng_seed, &k)
    }
}

/// Apply one field-condition category to a layout.
///
/// Row centerlines stay the label ground truth: only the slope/curve category
/// moves them, and removing plants never breaks them.
pub fn apply_variation(layout: &FieldLayout, variation: &CategoryVariation) -> Result<FieldLayout> {
    variation.validate(layout)?;
    let r = variation.resolved();
    let mut out = layout.clone();
    out.category = Some(variation.category);
    let spec = &layout.spec;
    match variation.category {
        Category::HorizontalShadow => {
            let mut s = variation.stream(layout, &[]);
            let width = r.shadow_band_width_m.unwrap();
            out.annotations.sun = Some(Sun {
                azimuth_deg: r.shadow_direction_deg.unwrap(),
                elevation_deg: 50.0,
            });
            out.annotations.shadow_bands = (0..r.shadow_band_count.unwrap())
                .map(|_| ShadowBand {
                    v_m: s.uniform(0.5, spec.row_length_m + 2.0),
                    width_m: width * s.uniform(0.7, 1.3),
                    occluder_height_m: 2.0,
                })
                .collect();
        }
        Category::SlopeCurve => {
            out.geometry.slope_grade = r.slope_grade.unwrap();
            out.geometry.curvature_radius_m = r.curvature_radius_m;
            out.rebuild_geometry();
        }
        Category::Discontinuities => {
            let p = r.removal_probability.unwrap();
            for plant in &mut out.plants {
                let mut s = Stream::keyed(
                    spec.rng_seed,
                    &[rng::tag::DISCONTINUITY, plant.row as u64, plant.index as u64],
                );
                if s.bernoulli(p) {
                    plant.present = false;
                }
            }
        }
        Category::FrontShadow => {
            out.annotations.robot_shadow = Some(RobotShadow {
                body_length_m: 1.0 + 0.4 * variation.intensity,
                body_width_m: 0.67,
                body_height_m: 0.55,
                sun_elevation_deg: 40.0 - 15.0 * variation.intensity,
            });
        }
        Category::DenseWeed | Category::SparseWeed => {
            out.weeds = scatter_weeds(
                layout,
                variation,
                r.weed_density_per_m2.unwrap(),
                r.weed_clearance_m.unwrap(),
            );
            out.rebuild_geometry();
        }
        Category::LargeCrops => {
            let fraction = r.large_crop_fraction.unwrap();
            let scale = r.large_crop_scale.unwrap();
            for plant in &mut out.plants {
                let mut s = variation.stream(layout, &[plant.row as u64, plant.index as u64]);
                if s.bernoulli(fraction) {
                    plant.height_m *= s.uniform(0.8 * scale, scale);
                }
            }
        }
        Category::SmallCrops => {
            let scale = r.small_crop_scale.unwrap();
            for plant in &mut out.plants {
                plant.height_m *= scale;
            }
        }
        Category::Sunlight => {
            let mut s = variation.stream(layout, &[]);
            out.annotations.glare = Some(Glare {
                strength: r.glare_strength.unwrap(),
                center: [s.uniform(0.15, 0.85), s.uniform(0.0, 0.2)],
                radius: s.uniform(0.25, 0.45),
            });
            out.annotations.sun_intensity_scale = Some(1.0 + 0.5 * variation.intensity);
        }
        Category::TyreTracks => {
            let mut s = variation.stream(layout, &[]);
            let lanes = layout.lane_count().max(1) as u64;
            let lane = s.below(lanes) as f64;
            out.annotations.tyre_tracks.push(TyreTrack {
                u_center_m: (lane + 0.5) * spec.row_spacing_m + r.tyre_track_offset_m.unwrap(),
                gauge_m: 2.0 * spec.row_spacing_m,
                rut_width_m: 0.3,
                darkness: 0.25 + 0.35 * variation.intensity,
            });
        }
    }
    Ok(out)
}

/// Area available to weeds: the inter-row bands minus a clearance strip on
/// each side of every row. Single-row fields use one row spacing on each side.
pub fn weed_area_m2(layout: &FieldLayout, clearance_m: f64) -> f64 {
    let bands = layout.lane_count().max(2) as f64;
    bands * (layout.spec.row_spacing_m - 2.0 * clearance_m) * layout.spec.row_length_m
}

/// Homogeneous Poisson process of the given density over the weed area.
fn scatter_weeds(
    layout: &FieldLayout,
    variation: &CategoryVariation,
    density: f64,
    clearance: f64,
) -> Vec<WeedInstance> {
    let spec = &layout.spec;
    let mut s = variation.stream(layout, &[rng::tag::WEED]);
    let count = s.poisson(density * weed_area_m2(layout, clearance));
    let lanes = layout.lane_count();
    let band = spec.row_spacing_m - 2.0 * clearance;
    (0..count)
        .map(|i| {
            let mut w = variation.stream(layout, &[rng::tag::WEED, i]);
            let u0 = if lanes == 0 {
                // Bands on either side of the only row.
                if w.bernoulli(0.5) { -spec.row_spacing_m } else { 0.0 }
            } else {
                w.below(lanes as u64) as f64 * spec.row_spacing_m
            };
            let height = WEED_SCALE
                * w.uniform(
                    spec.plant_base_height_m,
                    spec.plant_base_height_m + spec.plant_height_var_m,
                );
            WeedInstance {
                u_m: u0 + clearance + w.uniform(0.0, band),
                v_m: w.uniform(0.0, spec.row_length_m),
                position: Default::default(),
                yaw_deg: w.uniform(-180.0, 180.0),
                height_m: height,
                shape_seed: w.next_u64(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_model::{generate_field, FieldSpec};

    fn layout() -> FieldLayout {
        generate_field(&FieldSpec { rng_seed: 42, ..Default::default() }).unwrap()
    }

    #[test]
    fn category_letters_round_trip() {
        for c in Category::ALL {
            assert_eq!(c.letter().to_string().parse::<Category>().unwrap(), c);
        }
        assert!(matches!("k".parse::<Category>(), Err(Error::UnknownCategory(_))));
        assert!("ab".parse::<Category>().is_err());
        assert!(serde_json::from_str::<CategoryVariation>(r#"{"category":"z"}"#).is_err());
    }

    #[test]
    fn zero_removal_leaves_layout_unchanged() {
        let base = layout();
        let out = apply_variation(&base, &CategoryVariation::removal(0.0)).unwrap();
        assert_eq!(out.plants, base.plants);
        assert_eq!(out.centerlines, base.centerlines);
    }

    #[test]
    fn full_removal_keeps_centerlines() {
        let base = layout();
        let out = apply_variation(&base, &CategoryVariation::removal(1.0)).unwrap();
        assert!(out.plants.iter().all(|p| !p.present));
        assert_eq!(out.centerlines, base.centerlines);
    }

    #[test]
    fn removal_rate_tracks_probability() {
        let base = layout();
        let out = apply_variation(&base, &CategoryVariation::removal(0.3)).unwrap();
        let removed = out.plants.iter().filter(|p| !p.present).count() as f64;
        let n = out.plants.len() as f64;
        let sd = (n * 0.3 * 0.7).sqrt();
        assert!((removed - 0.3 * n).abs() < 4.0 * sd);
    }

    #[test]
    fn non_geometric_categories_preserve_centerlines() {
        let base = layout();
        for c in Category::ALL {
            let out = apply_variation(&base, &CategoryVariation::new(c, 0.8)).unwrap();
            assert_eq!(out.centerlines.len(), base.centerlines.len());
            if c != Category::SlopeCurve {
                assert_eq!(out.centerlines, base.centerlines, "category {c}");
            }
        }
    }

    #[test]
    fn curve_bends_rows_and_moves_plants_with_them() {
        let base = layout();
        let mut v = CategoryVariation::new(Category::SlopeCurve, 1.0);
        v.params.curvature_radius_m = Some(10.0);
        v.params.slope_grade = Some(0.0);
        let out = apply_variation(&base, &v).unwrap();
        let end = *out.centerlines[0].polyline.last().unwrap();
        // An arc of length 6 on radius 10 ends 10 (1 - cos 0.6) to the side.
        assert!((end.x - 10.0 * (1.0 - 0.6f64.cos())).abs() < 1e-3, "end {end:?}");
        for p in out.plants.iter().filter(|p| p.row == 0) {
            let off = (p.position.x - 10.0).hypot(p.position.y) - 10.0;
            assert!(off.abs() <= base.spec.lateral_jitter_m + 1e-3);
        }
    }

    #[test]
    fn weeds_stay_off_centerlines() {
        let base = layout();
        let out = apply_variation(&base, &CategoryVariation::new(Category::DenseWeed, 0.5)).unwrap();
        assert!(!out.weeds.is_empty());
        for w in &out.weeds {
            let nearest = (w.position.x / 0.6).round() * 0.6;
            assert!((w.position.x - nearest).abs() >= 0.05 - 1e-12);
            assert!((0.0..=6.0).contains(&w.position.y));
        }
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        let base = layout();
        assert!(apply_variation(&base, &CategoryVariation::removal(1.5)).is_err());
        assert!(apply_variation(&base, &CategoryVariation::new(Category::Sunlight, 2.0)).is_err());
        let mut v = CategoryVariation::new(Category::SlopeCurve, 0.5);
        v.params.curvature_radius_m = Some(1.0);
        assert!(apply_variation(&base, &v).is_err());
    }

    #[test]
    fn variation_json_flattens_params() {
        let v: CategoryVariation =
            serde_json::from_str(r#"{"category":"e","intensity":0.2,"weed_density_per_m2":12}"#)
                .unwrap();
        assert_eq!(v.category, Category::DenseWeed);
        assert_eq!(v.resolved().weed_density_per_m2, Some(12.0));
        let back: CategoryVariation = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(back, v);
    }
}
