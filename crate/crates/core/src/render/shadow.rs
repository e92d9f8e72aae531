//! Orthographic shadow map for a directional sun.

use super::raster::for_each_covered;
use crate::geom::Vec3;

const MAX_SIZE: usize = 2048;
const MIN_TEXEL_M: f64 = 0.003;

pub struct ShadowMap {
    /// Unit vector toward the sun.
    light: Vec3,
    lu: Vec3,
    lv: Vec3,
    origin: [f64; 2],
    texel: f64,
    cols: usize,
    rows: usize,
    /// Largest `light . p` of any caster over each texel.
    heights: Vec<f32>,
    reference: f64,
}

impl ShadowMap {
    /// Build a map covering the light-space footprint of `receivers`, then
    /// splat every caster triangle into it.
    pub fn build(light: Vec3, receivers: &[Vec3], casters: impl Iterator<Item = [Vec3; 3]>) -> ShadowMap {
        let light = light.normalized();
        let helper = if light.z.abs() > 0.99 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::UP };
        let lu = helper.cross(light).normalized();
        let lv = light.cross(lu);
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in receivers {
            let q = [p.dot(lu), p.dot(lv)];
            for k in 0..2 {
                lo[k] = lo[k].min(q[k]);
                hi[k] = hi[k].max(q[k]);
            }
        }
        if receivers.is_empty() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let pad = 0.3;
        let origin = [lo[0] - pad, lo[1] - pad];
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]) + 2.0 * pad;
        let texel = (extent / MAX_SIZE as f64).max(MIN_TEXEL_M);
        let cols = (((hi[0] - lo[0] + 2.0 * pad) / texel).ceil() as usize).clamp(1, MAX_SIZE);
        let rows = (((hi[1] - lo[1] + 2.0 * pad) / texel).ceil() as usize).clamp(1, MAX_SIZE);
        let reference = receivers.first().map_or(0.0, |p| p.dot(light));
        let mut map = ShadowMap {
            light,
            lu,
            lv,
            origin,
            texel,
            cols,
            rows,
            heights: vec![f32::NEG_INFINITY; cols * rows],
            reference,
        };
        for tri in casters {
            map.splat(tri);
        }
        map
    }

    fn to_texel(&self, p: Vec3) -> [f64; 2] {
        [
            (p.dot(self.lu) - self.origin[0]) / self.texel,
            (p.dot(self.lv) - self.origin[1]) / self.texel,
        ]
    }

    fn splat(&mut self, tri: [Vec3; 3]) {
        let pts = tri.map(|p| self.to_texel(p));
        let n = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
        let nl = n.dot(self.light);
        if nl == 0.0 {
            return;
        }
        let (cols, rows) = (self.cols, self.rows);
        let heights = &mut self.heights;
        let (lu, lv, light, origin, texel, reference) =
            (self.lu, self.lv, self.light, self.origin, self.texel, self.reference);
        for_each_covered(pts, cols, rows, |x, y| {
            // Intersect the texel's light ray with the triangle plane.
            let q = lu * (origin[0] + (x as f64 + 0.5) * texel) + lv * (origin[1] + (y as f64 + 0.5) * texel);
            let h = n.dot(tri[0] - q) / nl;
            let rel = (q.dot(light) + h - reference) as f32;
            let cell = &mut heights[y * cols + x];
            if rel > *cell {
                *cell = rel;
            }
        });
    }

    /// Whether `p` receives direct sun. Points outside the map are lit.
    pub fn lit(&self, p: Vec3, bias: f64) -> bool {
        let [x, y] = self.to_texel(p);
        if x < 0.0 || y < 0.0 || x >= self.cols as f64 || y >= self.rows as f64 {
            return true;
        }
        let h = self.heights[y as usize * self.cols + x as usize];
        (p.dot(self.light) - self.reference + bias) as f32 >= h
    }
}

/// Unit vector toward a sun at the given compass azimuth (clockwise from +y) and elevation.
pub fn sun_direction(azimuth_deg: f64, elevation_deg: f64) -> Vec3 {
    let (sa, ca) = azimuth_deg.to_radians().sin_cos();
    let (se, ce) = elevation_deg.to_radians().sin_cos();
    Vec3::new(sa * ce, ca * ce, se)
}
