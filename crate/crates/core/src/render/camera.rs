use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Pinhole intrinsics with square pixels.
///
/// Pixel `(i, j)` covers `[i, i + 1) x [j, j + 1)`; the principal point
/// defaults to the image centre, i.e. the corner shared by the four middle
/// pixels of an even-sized image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraIntrinsics {
    pub width_px: u32,
    pub height_px: u32,
    pub vertical_fov_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub principal_point: Option<[f64; 2]>,
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        CameraIntrinsics {
            width_px: 512,
            height_px: 512,
            vertical_fov_deg: 42.0,
            principal_point: None,
        }
    }
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<()> {
        if self.width_px == 0 || self.height_px == 0 {
            return Err(Error::EmptyImage {
                width: self.width_px,
                height: self.height_px,
            });
        }
        if !(self.vertical_fov_deg > 0.0 && self.vertical_fov_deg < 180.0) {
            return Err(Error::invalid("vertical_fov_deg", "must lie in (0, 180)"));
        }
        Ok(())
    }

    pub fn focal_px(&self) -> f64 {
        0.5 * self.height_px as f64 / (0.5 * self.vertical_fov_deg.to_radians()).tan()
    }

    pub fn principal(&self) -> [f64; 2] {
        self.principal_point
            .unwrap_or([0.5 * self.width_px as f64, 0.5 * self.height_px as f64])
    }
}

/// Camera placement. Yaw is measured clockwise from +y (yaw 0 looks along the
/// rows), pitch is the tilt below the horizon, roll turns about the optical axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraPose {
    pub position: Vec3,
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    #[serde(default)]
    pub roll_deg: f64,
}

impl CameraPose {
    pub fn validate(&self, ground_height: f64) -> Result<()> {
        let finite = self.position.is_finite()
            && self.yaw_deg.is_finite()
            && self.pitch_deg.is_finite()
            && self.roll_deg.is_finite();
        if !finite {
            return Err(Error::invalid("pose", "non-finite component"));
        }
        if self.position.z <= ground_height {
            return Err(Error::invalid("pose", "camera is not above the ground"));
        }
        Ok(())
    }

    /// Horizontal forward and right unit vectors.
    pub fn heading(&self) -> (Vec3, Vec3) {
        let (s, c) = self.yaw_deg.to_radians().sin_cos();
        (Vec3::new(s, c, 0.0), Vec3::new(c, -s, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    Pixel { u: f64, v: f64, depth: f64 },
    BehindCamera,
}

impl Projection {
    pub fn pixel(self) -> Option<[f64; 2]> {
        match self {
            Projection::Pixel { u, v, .. } => Some([u, v]),
            Projection::BehindCamera => None,
        }
    }
}

/// World-to-image transform shared by every render pass.
#[derive(Debug, Clone)]
pub struct Camera {
    pub origin: Vec3,
    pub right: Vec3,
    pub down: Vec3,
    pub forward: Vec3,
    pub focal: f64,
    pub principal: [f64; 2],
    pub width: u32,
    pub height: u32,
}

impl Camera {
    pub fn new(pose: &CameraPose, intrinsics: &CameraIntrinsics) -> Camera {
        let (fh, rh) = pose.heading();
        let (sp, cp) = pose.pitch_deg.to_radians().sin_cos();
        let forward = fh * cp - Vec3::UP * sp;
        let down = -(Vec3::UP * cp + fh * sp);
        let (sr, cr) = pose.roll_deg.to_radians().sin_cos();
        let right = rh * cr + down * sr;
        let down = down * cr - rh * sr;
        Camera {
            origin: pose.position,
            right,
            down,
            forward,
            focal: intrinsics.focal_px(),
            principal: intrinsics.principal(),
            width: intrinsics.width_px,
            height: intrinsics.height_px,
        }
    }

    /// Camera-frame coordinates (right, down, forward).
    pub fn to_camera(&self, p: Vec3) -> Vec3 {
        let d = p - self.origin;
        Vec3::new(d.dot(self.right), d.dot(self.down), d.dot(self.forward))
    }

    pub fn project(&self, p: Vec3) -> Projection {
        let c = self.to_camera(p);
        if c.z <= 0.0 {
            return Projection::BehindCamera;
        }
        Projection::Pixel {
            u: self.principal[0] + self.focal * c.x / c.z,
            v: self.principal[1] + self.focal * c.y / c.z,
            depth: c.z,
        }
    }

    /// Ray direction through image point `(u, v)`, scaled to unit forward depth.
    pub fn ray(&self, u: f64, v: f64) -> Vec3 {
        self.forward
            + self.right * ((u - self.principal[0]) / self.focal)
            + self.down * ((v - self.principal[1]) / self.focal)
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= 0.0 && v >= 0.0 && u < self.width as f64 && v < self.height as f64
    }
}

/// Project a world point through the pinhole model.
pub fn project(point: Vec3, pose: &CameraPose, intrinsics: &CameraIntrinsics) -> Projection {
    Camera::new(pose, intrinsics).project(point)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pose(pitch: f64) -> CameraPose {
        CameraPose {
            position: Vec3::new(0.0, 0.0, 0.8),
            yaw_deg: 0.0,
            pitch_deg: pitch,
            roll_deg: 0.0,
        }
    }

    #[test]
    fn optical_axis_hits_principal_point() {
        let intr = CameraIntrinsics::default();
        let p = pose(25.0);
        let cam = Camera::new(&p, &intr);
        let on_axis = p.position + cam.forward * 3.7;
        let [u, v] = project(on_axis, &p, &intr).pixel().unwrap();
        assert!((u - 256.0).abs() < 1e-9 && (v - 256.0).abs() < 1e-9);
    }

    #[test]
    fn ground_point_one_metre_ahead_matches_closed_form() {
        let intr = CameraIntrinsics::default();
        let [u, v] = project(Vec3::new(0.0, 1.0, 0.0), &pose(25.0), &intr)
            .pixel()
            .unwrap();
        // The point sits atan(0.8 / 1) below the horizon, i.e. that minus the
        // 25 degree pitch below the optical axis.
        let f = 256.0 / 21f64.to_radians().tan();
        let expected_v = 256.0 + f * (0.8f64.atan() - 25f64.to_radians()).tan();
        assert!((u - 256.0).abs() < 1e-9);
        assert!((v - expected_v).abs() < 1e-9, "{v} vs {expected_v}");
    }

    #[test]
    fn points_behind_the_camera_are_flagged() {
        let intr = CameraIntrinsics::default();
        assert_eq!(
            project(Vec3::new(0.0, -2.0, 0.8), &pose(0.0), &intr),
            Projection::BehindCamera
        );
    }

    #[test]
    fn ray_and_projection_are_inverse() {
        let intr = CameraIntrinsics::default();
        let p = CameraPose {
            position: Vec3::new(1.0, 2.0, 0.9),
            yaw_deg: 17.0,
            pitch_deg: 31.0,
            roll_deg: 4.0,
        };
        let cam = Camera::new(&p, &intr);
        for (u, v) in [(10.5, 20.5), (300.25, 480.0), (511.9, 0.1)] {
            let q = cam.origin + cam.ray(u, v) * 2.5;
            let [pu, pv] = cam.project(q).pixel().unwrap();
            assert!((pu - u).abs() < 1e-9 && (pv - v).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_degenerate_intrinsics() {
        let bad = CameraIntrinsics { width_px: 0, ..Default::default() };
        assert!(matches!(bad.validate(), Err(Error::EmptyImage { .. })));
        let bad = CameraIntrinsics { vertical_fov_deg: 180.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
