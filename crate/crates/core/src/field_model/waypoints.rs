use super::FieldLayout;
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::render::CameraPose;

/// Camera poses marching along the midline of lane `lane_index` (between rows
/// `lane_index` and `lane_index + 1`) every `step_m` metres of arc length.
///
/// Every pose keeps the same height above ground and pitch below the horizon;
/// its yaw follows the lane tangent.
pub fn generate_waypoints(
    layout: &FieldLayout,
    lane_index: usize,
    step_m: f64,
    cam_height_m: f64,
    cam_pitch_deg: f64,
) -> Result<Vec<CameraPose>> {
    let lanes = layout.lane_count();
    if lane_index >= lanes {
        return Err(Error::LaneOutOfRange { lane: lane_index, lanes });
    }
    if !(step_m.is_finite() && step_m > 0.0) {
        return Err(Error::invalid("step_m", format!("must be positive, got {step_m}")));
    }
    if !(cam_height_m.is_finite() && cam_height_m > 0.0) {
        return Err(Error::invalid("cam_height_m", "camera must sit above the ground"));
    }
    let length = layout.spec.row_length_m;
    let count = (length / step_m + 1e-9).floor() as usize + 1;
    let u0 = (lane_index as f64 + 0.5) * layout.spec.row_spacing_m;
    Ok((0..count)
        .map(|i| {
            let s = (i as f64 * step_m).min(length);
            lane_pose(layout, u0, s, cam_height_m, cam_pitch_deg)
        })
        .collect())
}

/// Pose on the curve through `u0` at arc `s`, looking along the row direction.
pub(crate) fn lane_pose(layout: &FieldLayout, u0: f64, s: f64, height: f64, pitch_deg: f64) -> CameraPose {
    let ground = layout.place(u0, s, 0.0);
    let ahead = layout.place(u0, (s + 1e-3).min(layout.spec.row_length_m), 0.0);
    let behind = layout.place(u0, (s - 1e-3).max(0.0), 0.0);
    let t = ahead - behind;
    CameraPose {
        position: ground + Vec3::UP * height,
        yaw_deg: t.x.atan2(t.y).to_degrees(),
        pitch_deg,
        roll_deg: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_model::{apply_variation, generate_field, Category, CategoryVariation, FieldSpec};

    #[test]
    fn six_metre_lane_with_unit_step_gives_seven_poses() {
        let layout = generate_field(&FieldSpec::default()).unwrap();
        let poses = generate_waypoints(&layout, 3, 1.0, 0.8, 25.0).unwrap();
        assert_eq!(poses.len(), 7);
        for (i, p) in poses.iter().enumerate() {
            assert!((p.position.x - 3.5 * 0.6).abs() < 1e-12);
            assert!((p.position.y - i as f64).abs() < 1e-12);
            assert!((p.position.z - 0.8).abs() < 1e-12);
            assert!(p.yaw_deg.abs() < 1e-9);
            assert_eq!(p.pitch_deg, 25.0);
        }
    }

    #[test]
    fn oversized_step_gives_one_pose_at_lane_start() {
        let layout = generate_field(&FieldSpec::default()).unwrap();
        let poses = generate_waypoints(&layout, 0, 10.0, 0.8, 25.0).unwrap();
        assert_eq!(poses.len(), 1);
        assert!(poses[0].position.y.abs() < 1e-12);
    }

    #[test]
    fn lanes_outside_the_field_are_rejected() {
        let layout = generate_field(&FieldSpec::default()).unwrap();
        assert!(matches!(
            generate_waypoints(&layout, 19, 1.0, 0.8, 25.0),
            Err(Error::LaneOutOfRange { lane: 19, lanes: 19 })
        ));
        let single = generate_field(&FieldSpec { row_count: 1, ..Default::default() }).unwrap();
        assert!(generate_waypoints(&single, 0, 1.0, 0.8, 25.0).is_err());
        assert!(generate_waypoints(&layout, 0, 0.0, 0.8, 25.0).is_err());
    }

    #[test]
    fn curved_lane_yaw_follows_centerline_tangent() {
        let base = generate_field(&FieldSpec::default()).unwrap();
        let mut v = CategoryVariation::new(Category::SlopeCurve, 1.0);
        v.params.curvature_radius_m = Some(8.0);
        v.params.slope_grade = Some(0.1);
        let layout = apply_variation(&base, &v).unwrap();
        let poses = generate_waypoints(&layout, 2, 0.5, 0.8, 25.0).unwrap();
        // Independent tangent: the analytic arc heading phi = s / R in the
        // ground plane, tilted into the world by the slope. The polyline
        // follows the arc to within one chord angle.
        let g: f64 = 0.1;
        let world_yaw = |s: f64| {
            let phi = s / 8.0;
            phi.sin().atan2(phi.cos() / (1.0 + g * g).sqrt()).to_degrees()
        };
        let chord_angle = (6.0f64 / 48.0 / 8.0).to_degrees();
        for (i, w) in poses.windows(2).enumerate() {
            let dyaw = w[1].yaw_deg - w[0].yaw_deg;
            let s0 = i as f64 * 0.5;
            let dtan = world_yaw(s0 + 0.5) - world_yaw(s0);
            assert!(dyaw > 0.0);
            assert!((dyaw - dtan).abs() <= chord_angle, "dyaw {dyaw} vs {dtan}");
        }
    }
}
