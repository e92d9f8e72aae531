//! Seeded sugar-beet field layouts.
//!
//! Rows are laid out on a (possibly tilted) ground plane in intrinsic plane
//! coordinates `(u, v)`: `u` runs across the rows, `v` along them. Row `r` sits
//! at `u = r * row_spacing`, starts at `v = 0`, and is either straight or a
//! circular arc. [`FieldLayout::embed`] maps plane coordinates to world space;
//! the map is an isometry, so distances measured along a row are the same in
//! both frames.

mod spec;
mod variation;
mod waypoints;

pub use spec::FieldSpec;
pub use variation::{apply_variation, weed_area_m2, Category, CategoryVariation, VariationParams};
pub use waypoints::generate_waypoints;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::Vec3;
use crate::rng::{self, Stream};

/// Scale of a weed relative to a crop plant.
pub const WEED_SCALE: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantInstance {
    pub row: u32,
    /// Index along the row; the plant sits at arc length `index * seed_spacing`.
    pub index: u32,
    pub arc_m: f64,
    /// Signed offset from the centerline, in the ground plane.
    pub lateral_m: f64,
    pub position: Vec3,
    pub yaw_deg: f64,
    pub height_m: f64,
    /// Seed for the leaf rosette (leaf count, per-leaf shape and tint).
    pub shape_seed: u64,
    pub present: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeedInstance {
    pub u_m: f64,
    pub v_m: f64,
    pub position: Vec3,
    pub yaw_deg: f64,
    pub height_m: f64,
    pub shape_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowCenterline {
    pub row_index: u32,
    pub polyline: Vec<Vec3>,
}

impl RowCenterline {
    pub fn arc_length(&self) -> f64 {
        self.polyline
            .windows(2)
            .map(|w| (w[1] - w[0]).length())
            .sum()
    }
}

/// Row shape and ground tilt shared by every row of a layout.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldGeometry {
    /// Rise per metre of horizontal travel along the rows.
    pub slope_grade: f64,
    /// Radius of the row arcs; `None` for straight rows.
    pub curvature_radius_m: Option<f64>,
}

/// Shadow cast by an elevated bar spanning the whole field across the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowBand {
    pub v_m: f64,
    pub width_m: f64,
    pub occluder_height_m: f64,
}

/// The capturing robot's body, used as a shadow caster placed relative to the camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotShadow {
    pub body_length_m: f64,
    pub body_width_m: f64,
    pub body_height_m: f64,
    /// Sun elevation while the sun sits directly behind the robot.
    pub sun_elevation_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sun {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
}

/// Screen-space lens glare. Coordinates are fractions of the image size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Glare {
    pub strength: f64,
    pub center: [f64; 2],
    pub radius: f64,
}

/// A tramline: two wheel ruts running along the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TyreTrack {
    pub u_center_m: f64,
    pub gauge_m: f64,
    pub rut_width_m: f64,
    pub darkness: f64,
}

/// Renderer-facing decorations attached by category variations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SceneAnnotations {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shadow_bands: Vec<ShadowBand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robot_shadow: Option<RobotShadow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sun: Option<Sun>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sun_intensity_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glare: Option<Glare>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tyre_tracks: Vec<TyreTrack>,
}

impl SceneAnnotations {
    pub fn casts_shadows(&self) -> bool {
        !self.shadow_bands.is_empty() || self.robot_shadow.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldLayout {
    pub spec: FieldSpec,
    pub geometry: FieldGeometry,
    pub centerlines: Vec<RowCenterline>,
    pub plants: Vec<PlantInstance>,
    pub weeds: Vec<WeedInstance>,
    pub annotations: SceneAnnotations,
    pub category: Option<Category>,
}

/// Lay out a straight-row field on flat ground.
///
/// Plant `k` of row `r` sits at arc length `k * seed_spacing` and samples its
/// height, yaw and lateral jitter from the stream keyed by `(rng_seed, r, k)`.
pub fn generate_field(spec: &FieldSpec) -> Result<FieldLayout> {
    spec.validate()?;
    let mut layout = FieldLayout {
        spec: spec.clone(),
        geometry: FieldGeometry::default(),
        centerlines: Vec::new(),
        plants: Vec::new(),
        weeds: Vec::new(),
        annotations: SceneAnnotations::default(),
        category: None,
    };
    let per_row = spec.plants_per_row();
    layout.plants.reserve(per_row as usize * spec.row_count as usize);
    for row in 0..spec.row_count {
        for k in 0..per_row {
            let mut s = Stream::keyed(spec.rng_seed, &[rng::tag::PLANT, row as u64, k as u64]);
            let height_m = s.uniform(
                spec.plant_base_height_m,
                spec.plant_base_height_m + spec.plant_height_var_m,
            );
            let yaw_deg = s.uniform(-spec.plant_yaw_range_deg, spec.plant_yaw_range_deg);
            let lateral_m = s.uniform(-spec.lateral_jitter_m, spec.lateral_jitter_m);
            let along = s.uniform(-spec.seed_jitter_m, spec.seed_jitter_m);
            let arc_m = (k as f64 * spec.seed_spacing_m + along).clamp(0.0, spec.row_length_m);
            layout.plants.push(PlantInstance {
                row,
                index: k,
                arc_m,
                lateral_m,
                position: Vec3::ZERO,
                yaw_deg,
                height_m,
                shape_seed: s.next_u64(),
                present: true,
            });
        }
    }
    layout.rebuild_geometry();
    Ok(layout)
}

impl FieldLayout {
    /// Number of inter-row lanes.
    pub fn lane_count(&self) -> usize {
        self.spec.row_count.saturating_sub(1) as usize
    }

    /// Ground height at world `y`.
    pub fn ground_height(&self, y: f64) -> f64 {
        self.geometry.slope_grade * y
    }

    /// Upward unit normal of the ground plane.
    pub fn ground_normal(&self) -> Vec3 {
        Vec3::new(0.0, -self.geometry.slope_grade, 1.0).normalized()
    }

    /// Map plane coordinates to world space.
    pub fn embed(&self, u: f64, v: f64) -> Vec3 {
        let g = self.geometry.slope_grade;
        let y = v / (1.0 + g * g).sqrt();
        Vec3::new(u, y, g * y)
    }

    /// Point and unit tangent, in plane coordinates, of the row shape at arc
    /// length `s`, for a row whose start sits at `u = 0`.
    pub fn row_frame(&self, s: f64) -> ([f64; 2], [f64; 2]) {
        match self.geometry.curvature_radius_m {
            None => ([0.0, s], [0.0, 1.0]),
            Some(r) => {
                let (segments, dphi) = arc_subdivision(self.spec.row_length_m, r);
                // Walk the same chords as the centerline polyline so plants sit on it.
                let chord = self.spec.row_length_m / segments as f64;
                let j = ((s / chord).floor() as usize).min(segments - 1);
                let t = (s - j as f64 * chord) / chord;
                let p0 = arc_point(r, j as f64 * dphi);
                let p1 = arc_point(r, (j + 1) as f64 * dphi);
                let d = [(p1[0] - p0[0]) / chord, (p1[1] - p0[1]) / chord];
                (
                    [p0[0] + (p1[0] - p0[0]) * t, p0[1] + (p1[1] - p0[1]) * t],
                    d,
                )
            }
        }
    }

    /// World position of a point at arc `s` on the curve through `u0`, offset
    /// `lateral` along the in-plane normal.
    pub fn place(&self, u0: f64, s: f64, lateral: f64) -> Vec3 {
        let (p, t) = self.row_frame(s);
        // In-plane normal pointing toward +u for straight rows.
        let n = [t[1], -t[0]];
        self.embed(u0 + p[0] + lateral * n[0], p[1] + lateral * n[1])
    }

    pub fn row_u(&self, row: u32) -> f64 {
        row as f64 * self.spec.row_spacing_m
    }

    /// Recompute centerlines and plant/weed world positions from plane coordinates.
    pub(crate) fn rebuild_geometry(&mut self) {
        let spacing = self.spec.row_spacing_m;
        let length = self.spec.row_length_m;
        let profile: Vec<[f64; 2]> = match self.geometry.curvature_radius_m {
            None => vec![[0.0, 0.0], [0.0, length]],
            Some(r) => {
                let (segments, dphi) = arc_subdivision(length, r);
                (0..=segments).map(|j| arc_point(r, j as f64 * dphi)).collect()
            }
        };
        self.centerlines = (0..self.spec.row_count)
            .map(|row| RowCenterline {
                row_index: row,
                polyline: profile
                    .iter()
                    .map(|p| self.embed(row as f64 * spacing + p[0], p[1]))
                    .collect(),
            })
            .collect();
        let mut plants = std::mem::take(&mut self.plants);
        for p in &mut plants {
            p.position = self.place(self.row_u(p.row), p.arc_m, p.lateral_m);
        }
        self.plants = plants;
        let mut weeds = std::mem::take(&mut self.weeds);
        for w in &mut weeds {
            w.position = self.embed(w.u_m, w.v_m);
        }
        self.weeds = weeds;
    }
}

/// Chord count and per-chord angle for an arc of `length` and radius `r`,
/// chosen so the polyline length equals `length` exactly.
fn arc_subdivision(length: f64, r: f64) -> (usize, f64) {
    let segments = ((length / r).abs() * 64.0).ceil().max(8.0) as usize;
    let chord = length / segments as f64;
    (segments, 2.0 * (chord / (2.0 * r)).asin())
}

/// Arc bending toward +u, starting at the origin heading along +v.
fn arc_point(r: f64, phi: f64) -> [f64; 2] {
    [r * (1.0 - phi.cos()), r * phi.sin()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_rows_are_sixty_centimetres_apart() {
        let layout = generate_field(&FieldSpec::default()).unwrap();
        assert_eq!(layout.centerlines.len(), 20);
        for w in layout.centerlines.windows(2) {
            let d = w[1].polyline[0].x - w[0].polyline[0].x;
            assert!((d - 0.60).abs() < 1e-12, "spacing {d}");
        }
    }

    #[test]
    fn default_rows_hold_thirty_eight_plants() {
        let layout = generate_field(&FieldSpec::default()).unwrap();
        for row in 0..20 {
            let n = layout.plants.iter().filter(|p| p.row == row).count();
            assert_eq!(n, 38);
        }
        let last = layout.plants.iter().filter(|p| p.row == 0).map(|p| p.arc_m).fold(0.0, f64::max);
        assert!((last - 37.0 * 0.16).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_plants_are_identical() {
        let spec = FieldSpec {
            plant_height_var_m: 0.0,
            plant_yaw_range_deg: 0.0,
            ..FieldSpec::default()
        };
        let layout = generate_field(&spec).unwrap();
        for p in &layout.plants {
            assert_eq!(p.height_m, 0.06);
            assert_eq!(p.yaw_deg, 0.0);
        }
    }

    #[test]
    fn centerline_length_matches_row_length() {
        let layout = generate_field(&FieldSpec::default()).unwrap();
        for c in &layout.centerlines {
            assert!(((c.arc_length() - 6.0) / 6.0).abs() < 1e-6);
        }
    }

    #[test]
    fn curved_centerline_length_is_exact() {
        let mut layout = generate_field(&FieldSpec::default()).unwrap();
        layout.geometry = FieldGeometry {
            slope_grade: 0.12,
            curvature_radius_m: Some(9.0),
        };
        layout.rebuild_geometry();
        for c in &layout.centerlines {
            let rel = (c.arc_length() - 6.0).abs() / 6.0;
            assert!(rel < 1e-6, "relative error {rel}");
        }
    }

    #[test]
    fn plants_stay_within_jitter_of_their_row() {
        let layout = generate_field(&FieldSpec::default()).unwrap();
        for p in &layout.plants {
            let u = p.position.x - layout.row_u(p.row);
            assert!(u.abs() <= layout.spec.lateral_jitter_m + 1e-12);
        }
    }

    #[test]
    fn embed_is_an_isometry() {
        let mut layout = generate_field(&FieldSpec::default()).unwrap();
        layout.geometry.slope_grade = 0.3;
        let a = layout.embed(0.2, 1.0);
        let b = layout.embed(0.5, 5.0);
        let d = (b - a).length();
        assert!((d - (0.3f64.powi(2) + 16.0).sqrt()).abs() < 1e-12);
    }
}
