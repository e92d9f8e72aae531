//! Dual-pass software renderer.
//!
//! [`render_photo`] produces the RGB image; [`render_label`] re-renders the
//! same pose with the rows replaced by emissive stripes and everything else
//! removed. Both passes share [`Camera`], so labels are pixel-registered with
//! photos by construction.

mod camera;
mod label;
mod mesh;
mod noise;
mod photo;
mod raster;
mod shadow;
mod style;

use std::io::Write;
use std::path::Path;

use image::{GrayImage, RgbImage};
use serde::{Deserialize, Serialize};

pub use camera::{project, Camera, CameraIntrinsics, CameraPose, Projection};
pub use label::{render_label, LABEL_ON};
pub use photo::{render_frame, render_photo, Frame};
pub use shadow::sun_direction;
pub use style::{Rgb, SceneStyle};

use crate::dataset::Domain;
use crate::error::{Error, Result};
use crate::field_model::{Category, FieldLayout};

/// Default physical stripe width; about 6 px wide at mid-image depth under
/// the default camera.
pub const DEFAULT_STRIPE_WIDTH_M: f64 = 0.05;
pub const DEFAULT_CAMERA_HEIGHT_M: f64 = 0.8;
pub const DEFAULT_CAMERA_PITCH_DEG: f64 = 25.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub pose: CameraPose,
    pub category: Option<Category>,
    pub domain: Domain,
    pub base_id: String,
}

/// A photo and its co-registered binary crop-row mask.
#[derive(Debug, Clone)]
pub struct SamplePair {
    pub rgb: RgbImage,
    pub mask: GrayImage,
    pub meta: SampleMeta,
}

impl SamplePair {
    pub fn validate(&self) -> Result<()> {
        if self.rgb.dimensions() != self.mask.dimensions() {
            return Err(Error::DimensionMismatch {
                left: self.rgb.dimensions(),
                right: self.mask.dimensions(),
            });
        }
        ensure_binary(&self.mask)
    }
}

pub fn ensure_binary(mask: &GrayImage) -> Result<()> {
    match mask.enumerate_pixels().find(|(_, _, p)| !matches!(p.0[0], 0 | 255)) {
        Some((x, y, p)) => Err(Error::NonBinaryMask { x, y, value: p.0[0] }),
        None => Ok(()),
    }
}

/// Render photo and label from one pose.
pub fn render_pair(
    layout: &FieldLayout,
    pose: &CameraPose,
    intrinsics: &CameraIntrinsics,
    style: &SceneStyle,
    stripe_width_m: f64,
) -> Result<SamplePair> {
    let rgb = render_photo(layout, pose, intrinsics, style)?;
    let mask = render_label(layout, pose, intrinsics, stripe_width_m)?;
    Ok(SamplePair {
        rgb,
        mask,
        meta: SampleMeta {
            pose: *pose,
            category: layout.category,
            domain: style.domain,
            base_id: String::new(),
        },
    })
}

/// In-frame image positions of one row centerline, ordered along the row.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedRow {
    pub row_index: u32,
    pub points: Vec<[f64; 2]>,
}

/// Sample every centerline each `step_m` metres of arc and keep the samples
/// that project inside the image. Rows with no such sample are omitted.
pub fn project_centerlines(
    layout: &FieldLayout,
    pose: &CameraPose,
    intrinsics: &CameraIntrinsics,
    step_m: f64,
) -> Result<Vec<ProjectedRow>> {
    if !(step_m > 0.0) {
        return Err(Error::invalid("step_m", "must be positive"));
    }
    let cam = Camera::new(pose, intrinsics);
    let mut rows = Vec::new();
    for c in &layout.centerlines {
        let mut points = Vec::new();
        for seg in c.polyline.windows(2) {
            let n = ((seg[1] - seg[0]).length() / step_m).ceil().max(1.0) as usize;
            for k in 0..n {
                if let Some([u, v]) = cam.project(seg[0].lerp(seg[1], k as f64 / n as f64)).pixel() {
                    if cam.contains(u, v) {
                        points.push([u, v]);
                    }
                }
            }
        }
        if let Some(&last) = c.polyline.last() {
            if let Some([u, v]) = cam.project(last).pixel() {
                if cam.contains(u, v) {
                    points.push([u, v]);
                }
            }
        }
        if !points.is_empty() {
            rows.push(ProjectedRow { row_index: c.row_index, points });
        }
    }
    Ok(rows)
}

/// Binary PPM of a depth buffer: near is bright, sky is black.
pub fn write_depth_ppm(depth: &[f32], width: u32, height: u32, path: &Path) -> Result<()> {
    let finite = depth.iter().copied().filter(|d| d.is_finite());
    let max = finite.fold(0.0f32, f32::max).max(1e-6);
    let mut buf = format!("P6\n{width} {height}\n255\n").into_bytes();
    for &d in depth {
        let v = if d.is_finite() {
            (255.0 * (1.0 - d / max)).round().clamp(0.0, 255.0) as u8
        } else {
            0
        };
        buf.extend_from_slice(&[v, v, v]);
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&buf))
        .map_err(|e| Error::io(path, e))
}
