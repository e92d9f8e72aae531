use cropforge::baseline::{detect_rows, match_rows, DetectorParams};
use cropforge::field_model::generate_field;
use cropforge::metrics::confusion;
use cropforge::render::{project_centerlines, render_label, render_photo, CameraIntrinsics, CameraPose, SceneStyle};
use cropforge::{FieldSpec, Vec3};
use image::RgbImage;

#[test]
fn clean_three_row_scene_from_a_mast_camera() {
    // High, steep camera: plant parallax is small and three rows fill the view.
    let layout = generate_field(&FieldSpec { rng_seed: 21, ..Default::default() }).unwrap();
    let pose = CameraPose {
        position: Vec3::new(layout.row_u(9), 0.2, 2.2),
        yaw_deg: 0.0,
        pitch_deg: 65.0,
        roll_deg: 0.0,
    };
    let intr = CameraIntrinsics::default();
    let rgb = render_photo(&layout, &pose, &intr, &SceneStyle::preset("sim").unwrap()).unwrap();
    let det = detect_rows(&rgb, &DetectorParams::default()).unwrap();
    let rows = project_centerlines(&layout, &pose, &intr, 0.02).unwrap();
    let matches = match_rows(&det.lines, &rows, intr.height_px, 5.0, 10.0);
    assert_eq!(matches.len(), 3, "{matches:?}");
    for m in &matches {
        assert!(m.matched, "{m:?}");
    }
    let label = render_label(&layout, &pose, &intr, 0.05).unwrap();
    let iou = confusion(&det.mask, &label, 128).unwrap().iou().value;
    assert!(iou.is_finite() && (0.0..=1.0).contains(&iou));
}

#[test]
fn soil_gives_no_lines() {
    let img = RgbImage::from_fn(128, 128, |x, y| image::Rgb([130 + (x % 9) as u8, 100 + (y % 7) as u8, 80]));
    let det = detect_rows(&img, &DetectorParams::default()).unwrap();
    assert!(det.lines.is_empty());
    assert!(det.mask.pixels().all(|p| p[0] == 0));
}

#[test]
fn detection_is_deterministic() {
    let layout = generate_field(&FieldSpec { rng_seed: 4, ..Default::default() }).unwrap();
    let pose = cropforge::field_model::generate_waypoints(&layout, 5, 0.5, 0.8, 25.0).unwrap()[2];
    let rgb = render_photo(&layout, &pose, &CameraIntrinsics::default(), &SceneStyle::preset("real").unwrap()).unwrap();
    let a = detect_rows(&rgb, &DetectorParams::default()).unwrap();
    let b = detect_rows(&rgb, &DetectorParams::default()).unwrap();
    assert_eq!(a, b);
    for (x, y, p) in a.mask.enumerate_pixels() {
        if p[0] == 255 {
            assert!(a.lines.iter().any(|l| l.distance(x as f64, y as f64).abs() <= 3.0));
        }
    }
}
