//! Procedural plant meshes: a rosette of flat elliptical leaves.

use super::style::Rgb;
use crate::geom::Vec3;
use crate::rng::Stream;

const LEAF_SEGMENTS: usize = 10;
/// Typical leaf elevation; a plant of height `h` grows leaves of length about `h / sin(35 deg)`.
const MEAN_TILT_DEG: f64 = 35.0;

/// Shading data for one leaf.
#[derive(Debug, Clone)]
pub struct Leaf {
    pub base: Vec3,
    pub axis: Vec3,
    pub side: Vec3,
    pub normal: Vec3,
    pub length: f64,
    pub width: f64,
    pub tint: Rgb,
}

#[derive(Debug, Clone, Copy)]
pub struct Triangle {
    pub v: [Vec3; 3],
    pub leaf: u32,
}

#[derive(Debug, Default)]
pub struct Mesh {
    pub leaves: Vec<Leaf>,
    pub triangles: Vec<Triangle>,
}

impl Mesh {
    /// Append a rosette of 6 to 10 leaves rooted at `root`.
    pub fn add_rosette(&mut self, root: Vec3, yaw_deg: f64, height: f64, seed: u64, colour: Rgb, variation: f64) {
        let mut s = Stream::new(seed);
        let count = 6 + s.below(5) as usize;
        let base_len = height / MEAN_TILT_DEG.to_radians().sin();
        for i in 0..count {
            let az = (yaw_deg + i as f64 * 360.0 / count as f64 + s.uniform(-12.0, 12.0)).to_radians();
            let tilt = s.uniform(22.0, 50.0).to_radians();
            let length = base_len * s.uniform(0.8, 1.15);
            let width = length * s.uniform(0.4, 0.55);
            let (sa, ca) = az.sin_cos();
            let axis = Vec3::new(sa * tilt.cos(), ca * tilt.cos(), tilt.sin());
            let side = Vec3::new(ca, -sa, 0.0);
            let shade = 1.0 + variation * s.uniform(-1.0, 1.0);
            let hue = 1.0 + 0.5 * variation * s.uniform(-1.0, 1.0);
            let tint = [
                (colour[0] * shade * hue).clamp(0.0, 1.0),
                (colour[1] * shade).clamp(0.0, 1.0),
                (colour[2] * shade / hue).clamp(0.0, 1.0),
            ];
            let base = root + Vec3::UP * 0.004;
            let leaf = Leaf {
                base,
                axis,
                side,
                normal: side.cross(axis).normalized(),
                length,
                width,
                tint,
            };
            let centre = base + axis * (0.5 * length);
            let rim: Vec<Vec3> = (0..LEAF_SEGMENTS)
                .map(|k| {
                    let a = k as f64 * std::f64::consts::TAU / LEAF_SEGMENTS as f64;
                    centre + axis * (0.5 * length * a.cos()) + side * (0.5 * width * a.sin())
                })
                .collect();
            let id = self.leaves.len() as u32;
            self.leaves.push(leaf);
            for k in 0..LEAF_SEGMENTS {
                self.triangles.push(Triangle {
                    v: [centre, rim[k], rim[(k + 1) % LEAF_SEGMENTS]],
                    leaf: id,
                });
            }
        }
    }

    /// Horizontal radius that bounds any rosette of the given height.
    pub fn rosette_radius(height: f64) -> f64 {
        1.15 * height / MEAN_TILT_DEG.to_radians().sin() + 0.01
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosette_has_six_to_ten_leaves_within_its_bound() {
        for seed in 0..50 {
            let mut m = Mesh::default();
            m.add_rosette(Vec3::ZERO, 30.0, 0.08, seed, [0.2, 0.5, 0.1], 0.1);
            assert!((6..=10).contains(&m.leaves.len()));
            assert_eq!(m.triangles.len(), m.leaves.len() * LEAF_SEGMENTS);
            let r = Mesh::rosette_radius(0.08);
            for t in &m.triangles {
                for v in t.v {
                    assert!(v.x.hypot(v.y) <= r);
                    assert!(v.z >= 0.0);
                }
            }
            for l in &m.leaves {
                assert!(l.normal.z > 0.0);
            }
        }
    }
}
