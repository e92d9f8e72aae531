use image::GrayImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A line `x cos(theta) + y sin(theta) = rho` in pixel-index coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectedLine {
    pub rho: f64,
    pub theta_deg: f64,
    pub support: u32,
    /// Where the line meets the image border, `[[x0, y0], [x1, y1]]`.
    pub endpoints: [[f64; 2]; 2],
}

impl DetectedLine {
    /// Signed distance from pixel `(x, y)` to the line.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        let t = self.theta_deg.to_radians();
        x * t.cos() + y * t.sin() - self.rho
    }

    /// Column where the line crosses row `y`, if it is not horizontal.
    pub fn x_at(&self, y: f64) -> Option<f64> {
        let t = self.theta_deg.to_radians();
        (t.cos().abs() > 1e-9).then(|| (self.rho - y * t.sin()) / t.cos())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HoughParams {
    /// Bins over [0, 180) degrees.
    pub angle_bins: usize,
    /// Bins over [-diagonal, diagonal]; 0 picks one bin per pixel.
    pub rho_bins: usize,
    /// Peaks below this fraction of the accumulator maximum are dropped.
    pub vote_threshold: f64,
    /// Absolute floor on votes.
    pub min_votes: u32,
    pub max_lines: usize,
    pub nms_theta_deg: f64,
    pub nms_rho_px: f64,
    /// Skeleton pixels within this distance of an accepted line stop voting.
    pub consume_px: f64,
    /// Replace each peak by a least-squares fit to the pixels it explains.
    pub refine: bool,
}

impl Default for HoughParams {
    fn default() -> Self {
        HoughParams {
            angle_bins: 180,
            rho_bins: 0,
            vote_threshold: 0.3,
            min_votes: 20,
            max_lines: 8,
            nms_theta_deg: 5.0,
            nms_rho_px: 20.0,
            consume_px: 8.0,
            refine: true,
        }
    }
}

impl HoughParams {
    pub fn validate(&self) -> Result<()> {
        if self.angle_bins < 2 {
            return Err(Error::invalid("angle_bins", "need at least 2 bins"));
        }
        if self.rho_bins == 1 {
            return Err(Error::invalid("rho_bins", "need at least 2 bins"));
        }
        if !(0.0..=1.0).contains(&self.vote_threshold) {
            return Err(Error::invalid("vote_threshold", "must lie in [0, 1]"));
        }
        if !(self.nms_theta_deg >= 0.0 && self.nms_rho_px >= 0.0 && self.consume_px >= 0.0) {
            return Err(Error::invalid("nms", "window must be non-negative"));
        }
        Ok(())
    }
}

/// Standard (rho, theta) Hough transform over the non-zero pixels of a skeleton.
/// Peaks are taken greedily in order of support, then rho, then theta.
pub fn hough_lines(skeleton: &GrayImage, params: &HoughParams) -> Result<Vec<DetectedLine>> {
    params.validate()?;
    let (w, h) = skeleton.dimensions();
    if w == 0 || h == 0 {
        return Err(Error::EmptyImage { width: w, height: h });
    }
    let diag = ((w as f64 - 1.0).hypot(h as f64 - 1.0)).ceil().max(1.0);
    let n_rho = if params.rho_bins == 0 {
        2 * diag as usize + 1
    } else {
        params.rho_bins
    };
    let n_theta = params.angle_bins;
    let rho_step = 2.0 * diag / (n_rho - 1) as f64;
    let theta_step = 180.0 / n_theta as f64;
    let trig: Vec<(f64, f64)> = (0..n_theta)
        .map(|i| {
            let t = (i as f64 * theta_step).to_radians();
            (t.cos(), t.sin())
        })
        .collect();

    let pixels: Vec<(f64, f64)> = skeleton
        .enumerate_pixels()
        .filter(|p| p.2[0] != 0)
        .map(|(x, y, _)| (x as f64, y as f64))
        .collect();
    let vote = |acc: &mut [u32], (x, y): (f64, f64), add: bool| {
        for (ti, &(c, s)) in trig.iter().enumerate() {
            let ri = ((x * c + y * s + diag) / rho_step).round() as usize;
            let cell = &mut acc[ti * n_rho + ri];
            if add {
                *cell += 1;
            } else {
                *cell -= 1;
            }
        }
    };
    let mut acc = vec![0u32; n_theta * n_rho];
    for &p in &pixels {
        vote(&mut acc, p, true);
    }
    let mut live = vec![true; pixels.len()];

    // Sequential peak picking: an accepted line consumes the pixels near it,
    // so a row is not reported twice and later peaks are not inflated by it.
    let mut lines: Vec<DetectedLine> = Vec::new();
    let mut floor = 0u32;
    while lines.len() < params.max_lines {
        let mut best: Option<(u32, f64, f64)> = None;
        for ti in 0..n_theta {
            let theta = ti as f64 * theta_step;
            for ri in 0..n_rho {
                let v = acc[ti * n_rho + ri];
                if v == 0 || best.is_some_and(|b| v < b.0) {
                    continue;
                }
                let rho = -diag + ri as f64 * rho_step;
                // Strictly greater support, or equal support and smaller (rho, theta).
                let better = match best {
                    None => true,
                    Some(b) => v > b.0 || (rho, theta) < (b.1, b.2),
                };
                if !better {
                    continue;
                }
                let suppressed = lines.iter().any(|l| {
                    let (dt, dr) = line_gap(l.theta_deg, l.rho, theta, rho);
                    dt <= params.nms_theta_deg && dr <= params.nms_rho_px
                });
                if !suppressed {
                    best = Some((v, rho, theta));
                }
            }
        }
        let Some((support, rho, theta)) = best else { break };
        if lines.is_empty() {
            floor = ((params.vote_threshold * support as f64).ceil() as u32).max(params.min_votes).max(1);
        }
        if support < floor {
            break;
        }
        let near: Vec<usize> = within(&pixels, &live, rho, theta, params.consume_px);
        let (rho, theta) = if params.refine { fit_line(&pixels, &near).unwrap_or((rho, theta)) } else { (rho, theta) };
        for i in near.into_iter().chain(within(&pixels, &live, rho, theta, params.consume_px)) {
            if live[i] {
                live[i] = false;
                vote(&mut acc, pixels[i], false);
            }
        }
        if let Some(endpoints) = clip_to_frame(rho, theta, w, h) {
            lines.push(DetectedLine { rho, theta_deg: theta, support, endpoints });
        }
    }
    lines.sort_by(|a, b| {
        b.support
            .cmp(&a.support)
            .then(a.rho.total_cmp(&b.rho))
            .then(a.theta_deg.total_cmp(&b.theta_deg))
    });
    Ok(lines)
}

fn within(pixels: &[(f64, f64)], live: &[bool], rho: f64, theta_deg: f64, d: f64) -> Vec<usize> {
    let (s, c) = theta_deg.to_radians().sin_cos();
    (0..pixels.len())
        .filter(|&i| live[i] && (pixels[i].0 * c + pixels[i].1 * s - rho).abs() <= d)
        .collect()
}

/// Total-least-squares line through the selected pixels, in normal form with
/// theta in [0, 180).
fn fit_line(pixels: &[(f64, f64)], idx: &[usize]) -> Option<(f64, f64)> {
    if idx.len() < 2 {
        return None;
    }
    let n = idx.len() as f64;
    let (mx, my) = idx.iter().fold((0.0, 0.0), |a, &i| (a.0 + pixels[i].0, a.1 + pixels[i].1));
    let (mx, my) = (mx / n, my / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &i in idx {
        let (dx, dy) = (pixels[i].0 - mx, pixels[i].1 - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    // Normal direction is the minor axis of the scatter.
    let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy) + std::f64::consts::FRAC_PI_2;
    let mut theta = phi.to_degrees().rem_euclid(360.0);
    let mut rho = mx * phi.cos() + my * phi.sin();
    if theta >= 180.0 {
        theta -= 180.0;
        rho = -rho;
    }
    Some((rho, theta))
}

/// Angular and rho separation, treating (rho, theta) and (-rho, theta - 180)
/// as the same line.
fn line_gap(t1: f64, r1: f64, t2: f64, r2: f64) -> (f64, f64) {
    let direct = ((t1 - t2).abs(), (r1 - r2).abs());
    let wrapped = (180.0 - (t1 - t2).abs(), (r1 + r2).abs());
    if wrapped.0 < direct.0 {
        wrapped
    } else {
        direct
    }
}

/// Intersections of the line with the rectangle `[0, w-1] x [0, h-1]`.
fn clip_to_frame(rho: f64, theta_deg: f64, w: u32, h: u32) -> Option<[[f64; 2]; 2]> {
    let (s, c) = theta_deg.to_radians().sin_cos();
    let (xm, ym) = (w as f64 - 1.0, h as f64 - 1.0);
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(4);
    let mut push = |p: [f64; 2]| {
        let inside = (-1e-9..=xm + 1e-9).contains(&p[0]) && (-1e-9..=ym + 1e-9).contains(&p[1]);
        if inside && !pts.iter().any(|q| (q[0] - p[0]).abs() < 1e-6 && (q[1] - p[1]).abs() < 1e-6) {
            pts.push([p[0].clamp(0.0, xm), p[1].clamp(0.0, ym)]);
        }
    };
    if c.abs() > 1e-12 {
        push([rho / c, 0.0]);
        push([(rho - ym * s) / c, ym]);
    }
    if s.abs() > 1e-12 {
        push([0.0, rho / s]);
        push([xm, (rho - xm * c) / s]);
    }
    match pts.len() {
        0 => None,
        1 => Some([pts[0], pts[0]]),
        _ => Some([pts[0], pts[1]]),
    }
}
