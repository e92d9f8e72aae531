use std::path::Path;
use std::process::{Command, Output};

use cropforge::dataset::DatasetManifest;
use cropforge::Category;

fn cropforge(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cropforge"))
        .args(args)
        .current_dir(dir)
        .env_remove("CROPFORGE_SEED")
        .output()
        .unwrap()
}

fn small_config(dir: &Path) {
    std::fs::write(
        dir.join("small.json"),
        r#"{"schema": 1, "intrinsics": {"width_px": 96, "height_px": 96}}"#,
    )
    .unwrap();
}

#[test]
fn categories_are_split_evenly() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let out = cropforge(
        &["generate", "--config", "small.json", "--count", "30", "--categories", "a,b,c", "--out", "ds"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = DatasetManifest::load(&dir.path().join("ds")).unwrap();
    for c in [Category::HorizontalShadow, Category::SlopeCurve, Category::Discontinuities] {
        assert_eq!(m.entries.iter().filter(|e| e.category == Some(c)).count(), 10);
    }
}

#[test]
fn zero_count_writes_an_empty_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = cropforge(&["generate", "--count", "0", "--out", "empty", "--json"], dir.path());
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["entries"], 0);
    assert!(DatasetManifest::load(&dir.path().join("empty")).unwrap().entries.is_empty());
    assert!(cropforge(&["validate", "empty"], dir.path()).status.success());
}

#[test]
fn seed_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let run = |name: &str, env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_cropforge"));
        cmd.current_dir(dir.path()).args(["generate", "--config", "small.json", "--count", "2", "--out", name]);
        cmd.env_remove("CROPFORGE_SEED");
        if let Some(s) = env {
            cmd.env("CROPFORGE_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        assert!(cmd.status().unwrap().success());
        std::fs::read(dir.path().join(name).join("images/000001.png")).unwrap()
    };
    let from_env = run("e", Some("42"), None);
    assert_eq!(from_env, run("f", None, Some("42")));
    assert_ne!(from_env, run("g", None, Some("43")));
}

#[test]
fn mix_detect_eval_curve() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_config(d);
    for (name, style, seed) in [("sim", "sim", "1"), ("real", "real", "2")] {
        let out = cropforge(
            &["generate", "--config", "small.json", "--count", "6", "--style", style, "--seed", seed, "--out", name],
            d,
        );
        assert!(out.status.success());
    }
    let out = cropforge(&["mix", "--sim", "sim", "--real", "real", "--sim-count", "5", "--real-count", "2", "--out", "mixes/m1"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mixed = DatasetManifest::load(&d.join("mixes/m1")).unwrap();
    assert_eq!(mixed.entries.len(), 7);
    assert!(mixed.entries[0].image.starts_with("../../sim/"));
    assert!(cropforge(&["validate", "mixes/m1", "--deep"], d).status.success());
    assert!(!cropforge(&["mix", "--sim", "sim", "--real", "real", "--preset", "B6", "--out", "m2"], d).status.success());

    assert!(cropforge(&["detect", "--dataset", "real", "--out", "pred"], d).status.success());
    assert!(d.join("pred/masks/000000.json").is_file() && d.join("pred/run.json").is_file());
    let out = cropforge(&["eval", "--pred", "pred", "--gt", "real", "--out", "report.json"], d);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("IoU (micro)"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["sample_count"], 6);
    let iou = report["iou"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&iou));
    assert!(!cropforge(&["eval", "--pred", "nowhere", "--gt", "real"], d).status.success());

    std::fs::write(
        d.join("runs.json"),
        r#"[{"model_id": "B6", "sim_count": 1000, "real_count": 500, "iou": 0.2128},
            {"model_id": "A3", "sim_count": 500, "real_count": 100, "iou": 0.1675}]"#,
    )
    .unwrap();
    assert!(cropforge(&["curve", "runs.json", "--out", "curve.csv"], d).status.success());
    let csv = std::fs::read_to_string(d.join("curve.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "relative_pct,iou,pm");
    assert!(rows[1].starts_with("20,0.1675,") && rows[2].starts_with("50,0.2128,81.23"));
    assert!(d.join("curve.json").is_file());
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"schema": 2}"#).unwrap();
    let out = cropforge(&["generate", "--config", "bad.json", "--count", "1", "--out", "x"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert!(!cropforge(&["validate", "missing"], dir.path()).status.success());
}
