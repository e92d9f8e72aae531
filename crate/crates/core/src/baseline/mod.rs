//! Classical crop-row detector: excess-green index, Otsu threshold,
//! Zhang-Suen thinning and a Hough line fit, rasterised back into a mask.
//!
//! This is a model-free reference for exercising the evaluation pipeline.
//! It fits straight lines only, so curved rows degrade it.

mod exg;
mod hough;
mod morph;
mod skeleton;

use image::{GrayImage, Luma, RgbImage};
use serde::{Deserialize, Serialize};

pub use exg::{binarize, box_blur, exg, exg_raw, otsu_threshold, ScalarMap};
pub use hough::{hough_lines, DetectedLine, HoughParams};
pub use morph::{close, fill_holes};
pub use skeleton::skeletonize;

use crate::error::{Error, Result};
use crate::render::ProjectedRow;

/// Width of rasterised rows in the output mask.
pub const LINE_WIDTH_PX: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorParams {
    /// Lowest ExG accepted as vegetation regardless of the Otsu level.
    pub exg_floor: f32,
    /// Box-blur radius applied to the ExG map, as a fraction of image width.
    /// Merges the leaves of a row into one smooth region before thinning.
    pub blur_radius: f64,
    pub hough: HoughParams,
    pub line_width_px: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams {
            exg_floor: 0.1,
            blur_radius: 0.015,
            hough: HoughParams::default(),
            line_width_px: LINE_WIDTH_PX,
        }
    }
}

/// Detector output for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub mask: GrayImage,
    pub lines: Vec<DetectedLine>,
}

/// JSON sidecar written next to each predicted mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSidecar {
    pub width: u32,
    pub height: u32,
    pub lines: Vec<DetectedLine>,
}

pub fn detect_rows(rgb: &RgbImage, params: &DetectorParams) -> Result<Detection> {
    let (w, h) = rgb.dimensions();
    if w == 0 || h == 0 {
        return Err(Error::EmptyImage { width: w, height: h });
    }
    if !(params.line_width_px > 0.0) {
        return Err(Error::invalid("line_width_px", "must be positive"));
    }
    let skel = skeletonize(&vegetation_regions(rgb, params));
    let lines = hough_lines(&skel, &params.hough)?;
    let mask = rasterize_lines(w, h, &lines, params.line_width_px);
    Ok(Detection { mask, lines })
}

/// Binary vegetation: blurred ExG, thresholded, holes filled.
pub fn vegetation_regions(rgb: &RgbImage, params: &DetectorParams) -> GrayImage {
    let r = (params.blur_radius * rgb.width() as f64).round().max(0.0) as u32;
    fill_holes(&binarize(&box_blur(&exg(rgb), r), params.exg_floor))
}

/// Mark pixels with signed distance in `[-width/2, width/2)` of any line.
pub fn rasterize_lines(w: u32, h: u32, lines: &[DetectedLine], width: f64) -> GrayImage {
    let half = width / 2.0;
    GrayImage::from_fn(w, h, |x, y| {
        let hit = lines.iter().any(|l| {
            let d = l.distance(x as f64, y as f64);
            (-half..half).contains(&d)
        });
        Luma([if hit { 255 } else { 0 }])
    })
}

/// How well the closest detected line agrees with one ground-truth row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowMatch {
    pub row_index: u32,
    /// Unsigned angle between the image directions, degrees.
    pub angle_error_deg: f64,
    /// Signed column difference (detected minus truth) on the bottom row.
    pub bottom_offset_px: f64,
    pub matched: bool,
}

/// Compare detected lines with projected row centerlines.
///
/// A row is scored when its projection spans at least a quarter of the image
/// height and reaches the bottom tenth of the image, so that its column on the
/// bottom pixel row is defined. Each scored row takes the line minimising
/// `angle / max_angle + |offset| / max_offset`.
pub fn match_rows(
    lines: &[DetectedLine],
    rows: &[ProjectedRow],
    height: u32,
    max_angle_deg: f64,
    max_offset_px: f64,
) -> Vec<RowMatch> {
    let h = height as f64;
    let bottom = h - 0.5;
    let mut out = Vec::new();
    for row in rows {
        let (Some(&first), Some(&last)) = (row.points.first(), row.points.last()) else {
            continue;
        };
        let (lo, hi) = if first[1] > last[1] { (first, last) } else { (last, first) };
        if (lo[0] - hi[0]).hypot(lo[1] - hi[1]) < h / 4.0 || lo[1] < 0.9 * h || (lo[1] - hi[1]).abs() < 1e-9 {
            continue;
        }
        let truth_dir = (lo[1] - hi[1]).atan2(lo[0] - hi[0]).to_degrees().rem_euclid(180.0);
        let truth_x = hi[0] + (bottom - hi[1]) * (lo[0] - hi[0]) / (lo[1] - hi[1]);
        let best = lines
            .iter()
            .filter_map(|l| {
                // Line geometry is in pixel-index coordinates; centres sit at +0.5.
                let x = l.x_at(h - 1.0)? + 0.5;
                let dir = (l.theta_deg + 90.0).rem_euclid(180.0);
                let d = (dir - truth_dir).abs();
                Some((d.min(180.0 - d), x - truth_x))
            })
            .min_by(|a, b| {
                let cost = |e: &(f64, f64)| e.0 / max_angle_deg + e.1.abs() / max_offset_px;
                cost(a).total_cmp(&cost(b))
            });
        let (angle_error_deg, bottom_offset_px) = best.unwrap_or((f64::INFINITY, f64::INFINITY));
        out.push(RowMatch {
            row_index: row.row_index,
            angle_error_deg,
            bottom_offset_px,
            matched: angle_error_deg <= max_angle_deg && bottom_offset_px.abs() <= max_offset_px,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soil_image_has_no_rows() {
        let img = RgbImage::from_fn(64, 48, |x, y| image::Rgb([120 + (x % 7) as u8, 95 + (y % 5) as u8, 70]));
        let d = detect_rows(&img, &DetectorParams::default()).unwrap();
        assert!(d.lines.is_empty());
        assert!(d.mask.pixels().all(|p| p[0] == 0));
    }

    #[test]
    fn painted_stripe_is_found() {
        let mut img = RgbImage::from_pixel(120, 90, image::Rgb([120, 95, 70]));
        for y in 0..90 {
            for x in 58..63 {
                img.put_pixel(x, y, image::Rgb([40, 150, 30]));
            }
        }
        let d = detect_rows(&img, &DetectorParams::default()).unwrap();
        assert_eq!(d.lines.len(), 1);
        assert!((d.lines[0].x_at(89.0).unwrap() - 60.0).abs() <= 1.0);
        let row: Vec<_> = (0..120).filter(|&x| d.mask.get_pixel(x, 45)[0] == 255).collect();
        assert_eq!(row.len(), 6);
    }

    #[test]
    fn rows_match_their_own_lines() {
        let row = ProjectedRow { row_index: 3, points: vec![[40.5, 20.5], [40.5, 99.5]] };
        let line = DetectedLine { rho: 40.0, theta_deg: 0.0, support: 80, endpoints: [[40.0, 0.0], [40.0, 99.0]] };
        let m = match_rows(std::slice::from_ref(&line), &[row.clone()], 100, 5.0, 10.0);
        assert_eq!(m.len(), 1);
        assert!(m[0].matched);
        assert!(m[0].angle_error_deg < 1e-9 && m[0].bottom_offset_px.abs() < 1e-9);
        let off = DetectedLine { rho: 52.0, ..line };
        assert!(!match_rows(&[off], &[row.clone()], 100, 5.0, 10.0)[0].matched);
        let unmatched = match_rows(&[], &[row], 100, 5.0, 10.0);
        assert!(!unmatched[0].matched);
        // Rows that stop short of the bottom are not scored.
        let short = ProjectedRow { row_index: 1, points: vec![[10.0, 0.0], [10.0, 60.0]] };
        assert!(match_rows(&[], &[short], 100, 5.0, 10.0).is_empty());
    }

    #[test]
    fn mask_stays_within_half_width() {
        let lines = vec![DetectedLine { rho: 30.0, theta_deg: 60.0, support: 5, endpoints: [[0.0; 2]; 2] }];
        let m = rasterize_lines(64, 64, &lines, 6.0);
        for (x, y, p) in m.enumerate_pixels() {
            if p[0] == 255 {
                assert!(lines[0].distance(x as f64, y as f64).abs() <= 3.0);
            }
        }
    }
}
