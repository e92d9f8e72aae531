//! Label pass: every row centerline becomes an unlit white stripe on the
//! ground plane; nothing else is drawn.
//!
//! A pixel is white when its centre ray meets the ground inside a stripe, or
//! when the projected centerline passes through it. The second rule keeps
//! stripes at least one pixel wide where they shrink below a pixel near the
//! horizon, so every visible centerline point lands on a white pixel.

use image::GrayImage;

use super::camera::{Camera, CameraIntrinsics, CameraPose, Projection};
use crate::error::{Error, Result};
use crate::field_model::FieldLayout;
use crate::geom::{segment_distance_xy, Vec3};

pub const LABEL_ON: u8 = 255;

const NEAR: f64 = 1e-3;
const GRID_CELL_M: f64 = 0.25;

pub fn render_label(
    layout: &FieldLayout,
    pose: &CameraPose,
    intrinsics: &CameraIntrinsics,
    stripe_width_m: f64,
) -> Result<GrayImage> {
    intrinsics.validate()?;
    pose.validate(layout.ground_height(pose.position.y))?;
    if !(stripe_width_m.is_finite() && stripe_width_m > 0.0) {
        return Err(Error::invalid("stripe_width_m", "must be positive"));
    }
    let cam = Camera::new(pose, intrinsics);
    let (w, h) = (cam.width as usize, cam.height as usize);
    let mut mask = GrayImage::new(cam.width, cam.height);

    let stripes = StripeIndex::new(layout, 0.5 * stripe_width_m);
    let g = layout.geometry.slope_grade;
    let stretch = (1.0 + g * g).sqrt();
    for y in 0..h {
        for x in 0..w {
            let ray = cam.ray(x as f64 + 0.5, y as f64 + 0.5);
            let den = ray.z - g * ray.y;
            if den == 0.0 {
                continue;
            }
            let t = (g * cam.origin.y - cam.origin.z) / den;
            if t <= 0.0 {
                continue;
            }
            let p = cam.origin + ray * t;
            // Work in ground-plane coordinates so widths are true on slopes.
            if stripes.contains(p.x, p.y * stretch) {
                mask.put_pixel(x as u32, y as u32, image::Luma([LABEL_ON]));
            }
        }
    }

    for line in &layout.centerlines {
        for seg in line.polyline.windows(2) {
            if let Some((a, b)) = clip_to_near(&cam, seg[0], seg[1]) {
                walk_segment(&mut mask, a, b);
            }
        }
    }
    Ok(mask)
}

/// Plane-coordinate segments bucketed on a coarse grid.
struct StripeIndex {
    half_width: f64,
    segments: Vec<Segment>,
    origin: [f64; 2],
    cols: usize,
    rows: usize,
    cells: Vec<Vec<u32>>,
}

struct Segment {
    a: Vec3,
    b: Vec3,
    open_start: bool,
    open_end: bool,
}

impl StripeIndex {
    fn new(layout: &FieldLayout, half_width: f64) -> StripeIndex {
        let g = layout.geometry.slope_grade;
        let stretch = (1.0 + g * g).sqrt();
        let mut segments = Vec::new();
        for line in &layout.centerlines {
            let pts: Vec<Vec3> = line
                .polyline
                .iter()
                .map(|p| Vec3::new(p.x, p.y * stretch, 0.0))
                .collect();
            let n = pts.len().saturating_sub(1);
            for (k, w) in pts.windows(2).enumerate() {
                segments.push(Segment {
                    a: w[0],
                    b: w[1],
                    open_start: k > 0,
                    open_end: k + 1 < n,
                });
            }
        }
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for s in &segments {
            for p in [s.a, s.b] {
                lo = [lo[0].min(p.x), lo[1].min(p.y)];
                hi = [hi[0].max(p.x), hi[1].max(p.y)];
            }
        }
        if segments.is_empty() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let origin = [lo[0] - half_width, lo[1] - half_width];
        let cols = (((hi[0] - lo[0]) + 2.0 * half_width) / GRID_CELL_M).ceil() as usize + 1;
        let rows = (((hi[1] - lo[1]) + 2.0 * half_width) / GRID_CELL_M).ceil() as usize + 1;
        let mut cells = vec![Vec::new(); cols * rows];
        for (id, s) in segments.iter().enumerate() {
            let x0 = ((s.a.x.min(s.b.x) - half_width - origin[0]) / GRID_CELL_M).floor().max(0.0) as usize;
            let x1 = (((s.a.x.max(s.b.x) + half_width - origin[0]) / GRID_CELL_M).floor() as usize).min(cols - 1);
            let y0 = ((s.a.y.min(s.b.y) - half_width - origin[1]) / GRID_CELL_M).floor().max(0.0) as usize;
            let y1 = (((s.a.y.max(s.b.y) + half_width - origin[1]) / GRID_CELL_M).floor() as usize).min(rows - 1);
            for cy in y0..=y1 {
                for cx in x0..=x1 {
                    cells[cy * cols + cx].push(id as u32);
                }
            }
        }
        StripeIndex {
            half_width,
            segments,
            origin,
            cols,
            rows,
            cells,
        }
    }

    fn contains(&self, u: f64, v: f64) -> bool {
        let cx = ((u - self.origin[0]) / GRID_CELL_M).floor();
        let cy = ((v - self.origin[1]) / GRID_CELL_M).floor();
        if cx < 0.0 || cy < 0.0 || cx >= self.cols as f64 || cy >= self.rows as f64 {
            return false;
        }
        let p = Vec3::new(u, v, 0.0);
        self.cells[cy as usize * self.cols + cx as usize].iter().any(|&id| {
            let s = &self.segments[id as usize];
            let (d, t) = segment_distance_xy(p, s.a, s.b);
            // Square ends at the row extremities; joints are rounded.
            d <= self.half_width && (s.open_start || t >= 0.0) && (s.open_end || t <= 1.0)
        })
    }
}

/// Clip a world segment to the part in front of the camera and project it.
fn clip_to_near(cam: &Camera, a: Vec3, b: Vec3) -> Option<([f64; 2], [f64; 2])> {
    let (za, zb) = (cam.to_camera(a).z, cam.to_camera(b).z);
    if za < NEAR && zb < NEAR {
        return None;
    }
    let lerp_to_near = |p: Vec3, q: Vec3, zp: f64, zq: f64| p.lerp(q, (NEAR - zp) / (zq - zp));
    let a = if za < NEAR { lerp_to_near(a, b, za, zb) } else { a };
    let b = if zb < NEAR { lerp_to_near(b, a, zb, za) } else { b };
    match (cam.project(a), cam.project(b)) {
        (Projection::Pixel { u: ua, v: va, .. }, Projection::Pixel { u: ub, v: vb, .. }) => {
            Some(([ua, va], [ub, vb]))
        }
        _ => None,
    }
}

/// Mark every pixel the image segment passes through, with a small tolerance
/// so points on pixel boundaries mark both neighbours.
fn walk_segment(mask: &mut GrayImage, a: [f64; 2], b: [f64; 2]) {
    const EPS: f64 = 1e-6;
    let (w, h) = (mask.width() as f64, mask.height() as f64);
    let (v_lo, v_hi) = (a[1].min(b[1]), a[1].max(b[1]));
    let r0 = (v_lo - EPS).floor().max(0.0);
    let r1 = (v_hi + EPS).floor().min(h - 1.0);
    if r0 > r1 {
        return;
    }
    let dv = b[1] - a[1];
    let u_at = |v: f64| {
        if dv.abs() < 1e-12 {
            None
        } else {
            Some(a[0] + (b[0] - a[0]) * (v - a[1]) / dv)
        }
    };
    for r in r0 as i64..=r1 as i64 {
        let (top, bottom) = ((r as f64).max(v_lo), (r as f64 + 1.0).min(v_hi));
        let (u0, u1) = match (u_at(top), u_at(bottom)) {
            (Some(p), Some(q)) => (p.min(q), p.max(q)),
            _ => (a[0].min(b[0]), a[0].max(b[0])),
        };
        let c0 = (u0 - EPS).floor().max(0.0);
        let c1 = (u1 + EPS).floor().min(w - 1.0);
        if c0 > c1 {
            continue;
        }
        for c in c0 as u32..=c1 as u32 {
            mask.put_pixel(c, r as u32, image::Luma([LABEL_ON]));
        }
    }
}
