//! Photo pass: textured soil, leaf rosettes, directional sun with optional
//! shadow map, lens glare and sensor noise.

use image::RgbImage;

use super::camera::{Camera, CameraIntrinsics, CameraPose};
use super::mesh::Mesh;
use super::noise::fbm;
use super::raster::for_each_covered;
use super::shadow::{sun_direction, ShadowMap};
use super::style::{Rgb, SceneStyle};
use crate::error::Result;
use crate::field_model::FieldLayout;
use crate::geom::Vec3;
use crate::rng;

const NEAR: f64 = 0.02;
const FAR: f64 = 60.0;
/// Receivers farther than this are not covered by the shadow map.
const SHADOW_RANGE: f64 = 25.0;
const SHADOW_BIAS: f64 = 0.006;
const NO_LEAF: u32 = u32::MAX;

/// Photo plus its per-pixel camera depth (metres along the optical axis,
/// infinite where the ray meets only sky).
pub struct Frame {
    pub rgb: RgbImage,
    pub depth: Vec<f32>,
}

pub fn render_photo(
    layout: &FieldLayout,
    pose: &CameraPose,
    intrinsics: &CameraIntrinsics,
    style: &SceneStyle,
) -> Result<RgbImage> {
    Ok(render_frame(layout, pose, intrinsics, style)?.rgb)
}

pub fn render_frame(
    layout: &FieldLayout,
    pose: &CameraPose,
    intrinsics: &CameraIntrinsics,
    style: &SceneStyle,
) -> Result<Frame> {
    intrinsics.validate()?;
    pose.validate(layout.ground_height(pose.position.y))?;
    style.validate()?;
    let cam = Camera::new(pose, intrinsics);
    let (w, h) = (cam.width as usize, cam.height as usize);
    let ann = &layout.annotations;

    let mut sun = match (&ann.robot_shadow, &ann.sun) {
        (Some(robot), _) => sun_direction(pose.yaw_deg + 180.0, robot.sun_elevation_deg),
        (None, Some(s)) => sun_direction(s.azimuth_deg, s.elevation_deg),
        (None, None) => sun_direction(style.sun_azimuth_deg, style.sun_elevation_deg),
    };
    if sun.z <= 0.0 {
        sun = Vec3::UP;
    }
    let sun_intensity = style.sun_intensity * ann.sun_intensity_scale.unwrap_or(1.0);

    let shadows = ann.casts_shadows();
    let mesh = build_mesh(layout, &cam, style, if shadows { 0.6 } else { 0.05 });

    // Depth pass over the leaves.
    let mut depth = vec![f64::INFINITY; w * h];
    let mut leaf_id = vec![NO_LEAF; w * h];
    for tri in &mesh.triangles {
        let c = tri.v.map(|p| cam.to_camera(p));
        if c.iter().any(|q| q.z < NEAR) {
            continue;
        }
        let pts = c.map(|q| {
            [
                cam.principal[0] + cam.focal * q.x / q.z,
                cam.principal[1] + cam.focal * q.y / q.z,
            ]
        });
        let n = (tri.v[1] - tri.v[0]).cross(tri.v[2] - tri.v[0]);
        let num = n.dot(tri.v[0] - cam.origin);
        for_each_covered(pts, w, h, |x, y| {
            let ray = cam.ray(x as f64 + 0.5, y as f64 + 0.5);
            let den = n.dot(ray);
            if den == 0.0 {
                return;
            }
            let t = num / den;
            let i = y * w + x;
            if t > NEAR && t < depth[i] {
                depth[i] = t;
                leaf_id[i] = tri.leaf;
            }
        });
    }

    // Ground plane z = g * y.
    let g = layout.geometry.slope_grade;
    let ground_t = |ray: Vec3| {
        let den = ray.z - g * ray.y;
        let t = (g * cam.origin.y - cam.origin.z) / den;
        (den != 0.0 && t > 0.0 && t < FAR).then_some(t)
    };
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if leaf_id[i] == NO_LEAF {
                if let Some(t) = ground_t(cam.ray(x as f64 + 0.5, y as f64 + 0.5)) {
                    depth[i] = t;
                }
            }
        }
    }

    let shadow_map = shadows.then(|| {
        let mut receivers = Vec::new();
        for y in (0..h).step_by(8).chain([h - 1]) {
            for x in (0..w).step_by(8).chain([w - 1]) {
                let ray = cam.ray(x as f64 + 0.5, y as f64 + 0.5);
                if let Some(t) = ground_t(ray).filter(|&t| t < SHADOW_RANGE) {
                    receivers.push(cam.origin + ray * t);
                }
            }
        }
        let occluders = occluder_triangles(layout, pose);
        ShadowMap::build(
            sun,
            &receivers,
            mesh.triangles.iter().map(|t| t.v).chain(occluders),
        )
    });
    let lit = |p: Vec3| shadow_map.as_ref().is_none_or(|m| m.lit(p, SHADOW_BIAS));

    let ground_n = layout.ground_normal();
    let noise_seed = rng::derive(
        layout.spec.rng_seed,
        &[
            rng::tag::NOISE,
            pose.position.x.to_bits(),
            pose.position.y.to_bits(),
            pose.position.z.to_bits(),
            pose.yaw_deg.to_bits(),
            pose.pitch_deg.to_bits(),
        ],
    );
    let soil_seed = rng::derive(style.texture_seed, &[rng::tag::SOIL]);
    let glare = ann.glare.as_ref();

    let mut rgb = RgbImage::new(cam.width, cam.height);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let ray = cam.ray(x as f64 + 0.5, y as f64 + 0.5);
            let mut c = if leaf_id[i] != NO_LEAF {
                let leaf = &mesh.leaves[leaf_id[i] as usize];
                let p = cam.origin + ray * depth[i];
                let rel = p - leaf.base;
                let along = (rel.dot(leaf.axis) / leaf.length).clamp(0.0, 1.0);
                let across = rel.dot(leaf.side) / (0.5 * leaf.width);
                let mut k = (0.78 + 0.3 * along) * (1.0 - 0.15 * across * across);
                if across.abs() < 0.07 {
                    k *= 1.0 + style.vein_strength;
                }
                let mut n = leaf.normal;
                if n.dot(ray) > 0.0 {
                    n = -n;
                }
                let diffuse = n.dot(sun).max(0.0) * if lit(p) { 1.0 } else { 0.0 };
                scale(leaf.tint, k * (style.ambient + sun_intensity * diffuse))
            } else if depth[i].is_finite() {
                let p = cam.origin + ray * depth[i];
                let base = soil_colour(layout, style, soil_seed, p);
                let diffuse = ground_n.dot(sun).max(0.0) * if lit(p) { 1.0 } else { 0.0 };
                scale(base, style.ambient + sun_intensity * diffuse)
            } else {
                let up = ray.normalized().z.clamp(0.0, 1.0);
                lerp(style.sky_horizon_rgb, style.sky_zenith_rgb, up.sqrt())
            };
            c = scale(c, style.exposure);
            if let Some(gl) = glare {
                c = apply_glare(c, gl, (x as f64 + 0.5) / w as f64, (y as f64 + 0.5) / h as f64);
            }
            if style.sensor_noise > 0.0 {
                let n = (rng::lattice_unit(noise_seed, i as i64, 0) + rng::lattice_unit(noise_seed, i as i64, 1) - 1.0)
                    * style.sensor_noise;
                c = [c[0] + n, c[1] + n, c[2] + n];
            }
            rgb.put_pixel(x as u32, y as u32, image::Rgb(c.map(quantize)));
        }
    }
    let depth = depth.iter().map(|&d| d as f32).collect();
    Ok(Frame { rgb, depth })
}

/// Rosettes for every present plant and weed near the view frustum.
/// `margin` widens the frustum test (as a fraction of the image) so that
/// off-screen casters still throw shadows into view.
fn build_mesh(layout: &FieldLayout, cam: &Camera, style: &SceneStyle, margin: f64) -> Mesh {
    let mut mesh = Mesh::default();
    let visible = |root: Vec3, height: f64| {
        let r = Mesh::rosette_radius(height) + height;
        let c = cam.to_camera(root);
        if c.z + r < NEAR || c.z - r > FAR {
            return false;
        }
        if c.z <= r {
            return true;
        }
        let extent = cam.focal * r / (c.z - r);
        let u = cam.principal[0] + cam.focal * c.x / c.z;
        let v = cam.principal[1] + cam.focal * c.y / c.z;
        let (mw, mh) = (margin * cam.width as f64, margin * cam.height as f64);
        u + extent >= -mw
            && u - extent <= cam.width as f64 + mw
            && v + extent >= -mh
            && v - extent <= cam.height as f64 + mh
    };
    for p in layout.plants.iter().filter(|p| p.present) {
        if visible(p.position, p.height_m) {
            mesh.add_rosette(p.position, p.yaw_deg, p.height_m, p.shape_seed, style.leaf_rgb, style.leaf_variation);
        }
    }
    for wd in &layout.weeds {
        if visible(wd.position, wd.height_m) {
            mesh.add_rosette(wd.position, wd.yaw_deg, wd.height_m, wd.shape_seed, style.weed_rgb, style.leaf_variation);
        }
    }
    mesh
}

/// Invisible shadow casters: bars over the field and the robot body.
fn occluder_triangles(layout: &FieldLayout, pose: &CameraPose) -> Vec<[Vec3; 3]> {
    let mut quads: Vec<[Vec3; 4]> = Vec::new();
    let span = 60.0;
    let centre_x = 0.5 * (layout.spec.row_count.saturating_sub(1)) as f64 * layout.spec.row_spacing_m;
    for band in &layout.annotations.shadow_bands {
        let mid = layout.embed(centre_x, band.v_m);
        let (y0, y1) = (mid.y - 0.5 * band.width_m, mid.y + 0.5 * band.width_m);
        let z = mid.z + band.occluder_height_m;
        quads.push([
            Vec3::new(centre_x - span, y0, z),
            Vec3::new(centre_x + span, y0, z),
            Vec3::new(centre_x + span, y1, z),
            Vec3::new(centre_x - span, y1, z),
        ]);
    }
    if let Some(robot) = &layout.annotations.robot_shadow {
        let (fwd, right) = pose.heading();
        let ground = layout.ground_height(pose.position.y);
        let base = Vec3::new(pose.position.x, pose.position.y, ground + robot.body_height_m);
        let (front, back) = (0.35, 0.35 - robot.body_length_m);
        let half = 0.5 * robot.body_width_m;
        quads.push([
            base + fwd * back - right * half,
            base + fwd * front - right * half,
            base + fwd * front + right * half,
            base + fwd * back + right * half,
        ]);
    }
    quads
        .into_iter()
        .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
        .collect()
}

fn soil_colour(layout: &FieldLayout, style: &SceneStyle, seed: u64, p: Vec3) -> Rgb {
    let s = style.soil_noise_scale_m;
    let n = fbm(seed, p.x / s, p.y / s, style.soil_noise_octaves);
    let mut c = scale(style.soil_rgb, 1.0 + 2.0 * style.soil_noise_amplitude * (n - 0.5));
    if style.clod_fraction > 0.0 {
        let clod = fbm(seed ^ 0xC10D, p.x / 0.03, p.y / 0.03, 2);
        if clod > 1.0 - style.clod_fraction * 0.5 {
            c = lerp(c, style.soil_dark_rgb, 0.6);
        }
    }
    for track in &layout.annotations.tyre_tracks {
        for rut in [-0.5, 0.5] {
            let centre = track.u_center_m + rut * track.gauge_m;
            if (p.x - centre).abs() <= 0.5 * track.rut_width_m {
                // Tread marks every 8 cm along the rut.
                let tread = 0.5 + 0.5 * (p.y * std::f64::consts::TAU / 0.08).sin();
                let dark = track.darkness * (0.75 + 0.25 * tread);
                c = lerp(c, style.soil_dark_rgb, dark.min(1.0));
            }
        }
    }
    c
}

fn apply_glare(c: Rgb, glare: &crate::field_model::Glare, x: f64, y: f64) -> Rgb {
    let [gx, gy] = glare.center;
    let r = glare.radius;
    let d = (x - gx).hypot(y - gy);
    let mut g = (-(d / (0.25 * r)).powi(2)).exp() + 0.5 * (-(d / r).powi(2)).exp();
    g += 0.25 * (-((d - 0.8 * r) / 0.04).powi(2)).exp();
    // Ghost discs along the line from the glare centre through the image centre.
    for (t, radius) in [(1.4, 0.05), (1.8, 0.08), (2.3, 0.06)] {
        let (cx, cy) = (gx + (0.5 - gx) * t, gy + (0.5 - gy) * t);
        let dd = (x - cx).hypot(y - cy);
        g += 0.2 * (1.0 - ((dd - radius) / 0.01).clamp(0.0, 1.0));
    }
    let s = glare.strength;
    let veil = 0.2 * s;
    let tint = [1.0, 0.95, 0.85];
    let g = (s * g).min(1.0);
    [0, 1, 2].map(|k| {
        let v = c[k] * (1.0 - veil) + veil;
        v + g * (tint[k] - v).max(0.0)
    })
}

fn scale(c: Rgb, k: f64) -> Rgb {
    c.map(|v| v * k)
}

fn lerp(a: Rgb, b: Rgb, t: f64) -> Rgb {
    [0, 1, 2].map(|k| a[k] + (b[k] - a[k]) * t)
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}
