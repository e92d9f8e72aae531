//! Batch generation of rendered sample pairs.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::augment::augment_crops;
use super::io::write_png;
use super::manifest::{DatasetManifest, ManifestEntry, IMAGES_DIR, MASKS_DIR};
use crate::error::Result;
use crate::field_model::{
    apply_variation, generate_field, generate_waypoints, Category, CategoryVariation, FieldLayout, FieldSpec,
    VariationParams,
};
use crate::render::{self, CameraIntrinsics, CameraPose, SamplePair, SceneStyle};
use crate::rng::{self, Stream};

/// How the camera is carried through the field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaptureRig {
    pub height_m: f64,
    pub pitch_deg: f64,
    /// Waypoint spacing along the lane.
    pub step_m: f64,
    pub height_jitter_m: f64,
    pub pitch_jitter_deg: f64,
    pub yaw_jitter_deg: f64,
    /// Capture only from the first part of the lane so rows fill the view.
    pub max_start_fraction: f64,
}

impl Default for CaptureRig {
    fn default() -> Self {
        CaptureRig {
            height_m: render::DEFAULT_CAMERA_HEIGHT_M,
            pitch_deg: render::DEFAULT_CAMERA_PITCH_DEG,
            step_m: 0.5,
            height_jitter_m: 0.05,
            pitch_jitter_deg: 3.0,
            yaw_jitter_deg: 3.0,
            max_start_fraction: 0.6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub count: usize,
    /// Categories to cycle through; empty renders clean scenes.
    pub categories: Vec<Category>,
    pub style: SceneStyle,
    pub seed: u64,
    pub field: FieldSpec,
    pub intrinsics: CameraIntrinsics,
    pub rig: CaptureRig,
    pub stripe_width_m: f64,
    /// Fixed variation intensity; `None` draws one per image from `[0.3, 1]`.
    pub intensity: Option<f64>,
    pub variation_params: BTreeMap<Category, VariationParams>,
    /// Write the four corner crops of each render instead of the render itself.
    pub augment: bool,
}

impl GenerateOptions {
    pub fn new(count: usize, style: SceneStyle, seed: u64) -> Self {
        GenerateOptions {
            count,
            categories: Vec::new(),
            style,
            seed,
            field: FieldSpec::default(),
            intrinsics: CameraIntrinsics::default(),
            rig: CaptureRig::default(),
            stripe_width_m: render::DEFAULT_STRIPE_WIDTH_M,
            intensity: None,
            variation_params: BTreeMap::new(),
            augment: false,
        }
    }

    /// Category of image `index`: `count` images are split into contiguous
    /// blocks, one per category, the first `count % k` blocks one larger.
    pub fn category_of(&self, index: usize) -> Option<Category> {
        let k = self.categories.len();
        if k == 0 {
            return None;
        }
        let (base, rem) = (self.count / k, self.count % k);
        let mut start = 0;
        for (j, &c) in self.categories.iter().enumerate() {
            let len = base + usize::from(j < rem);
            if index < start + len {
                return Some(c);
            }
            start += len;
        }
        self.categories.last().copied()
    }

    pub fn base_id(&self, index: usize) -> String {
        format!("{}-{index:06}", self.style.domain)
    }
}

/// Scene and pose of one image, before rendering.
#[derive(Debug, Clone)]
pub struct PlannedSample {
    pub index: usize,
    pub base_id: String,
    pub layout: FieldLayout,
    pub pose: CameraPose,
}

/// Every random choice for image `index` comes from streams keyed by
/// `(seed, index)`, so images can be planned in any order.
pub fn plan_sample(opts: &GenerateOptions, index: usize) -> Result<PlannedSample> {
    let image_seed = rng::derive(opts.seed, &[rng::tag::IMAGE, index as u64]);
    let mut s = Stream::new(image_seed);
    let spec = FieldSpec {
        rng_seed: image_seed,
        ..opts.field.clone()
    };
    let mut layout = generate_field(&spec)?;
    if let Some(category) = opts.category_of(index) {
        let intensity = opts.intensity.unwrap_or_else(|| s.uniform(0.3, 1.0));
        let variation = CategoryVariation {
            category,
            intensity,
            params: opts.variation_params.get(&category).cloned().unwrap_or_default(),
        };
        layout = apply_variation(&layout, &variation)?;
    }
    let lanes = layout.lane_count().max(1);
    let mut lane = s.below(lanes as u64) as usize;
    // Tyre-track scenes are captured from the tramline itself.
    if let Some(t) = layout.annotations.tyre_tracks.first() {
        lane = ((t.u_center_m / layout.spec.row_spacing_m).floor().max(0.0) as usize).min(lanes - 1);
    }
    let rig = &opts.rig;
    let poses = generate_waypoints(&layout, lane, rig.step_m, rig.height_m, rig.pitch_deg)?;
    let usable = ((poses.len() as f64 * rig.max_start_fraction).ceil() as usize).clamp(1, poses.len());
    let mut pose = poses[s.below(usable as u64) as usize];
    pose.position.z += s.uniform(-rig.height_jitter_m, rig.height_jitter_m);
    pose.pitch_deg += s.uniform(-rig.pitch_jitter_deg, rig.pitch_jitter_deg);
    pose.yaw_deg += s.uniform(-rig.yaw_jitter_deg, rig.yaw_jitter_deg);
    Ok(PlannedSample {
        index,
        base_id: opts.base_id(index),
        layout,
        pose,
    })
}

pub fn render_sample(opts: &GenerateOptions, index: usize) -> Result<SamplePair> {
    let plan = plan_sample(opts, index)?;
    let mut pair = render::render_pair(&plan.layout, &plan.pose, &opts.intrinsics, &opts.style, opts.stripe_width_m)?;
    pair.meta.base_id = plan.base_id;
    Ok(pair)
}

/// Render `opts.count` pairs into `out/images`, `out/masks` and write
/// `out/manifest.json`. Work runs on the current rayon pool; the output does
/// not depend on its size.
pub fn generate_dataset(opts: &GenerateOptions, out: &Path) -> Result<DatasetManifest> {
    std::fs::create_dir_all(out.join(IMAGES_DIR)).map_err(|e| crate::Error::io(out, e))?;
    std::fs::create_dir_all(out.join(MASKS_DIR)).map_err(|e| crate::Error::io(out, e))?;
    let written: Vec<Vec<ManifestEntry>> = (0..opts.count)
        .into_par_iter()
        .map(|i| write_sample(opts, i, out))
        .collect::<Result<_>>()?;
    let mut manifest = DatasetManifest::new(opts.seed);
    manifest.metadata.insert("style".into(), opts.style.style_id.clone().into());
    manifest.metadata.insert("count".into(), opts.count.into());
    manifest.metadata.insert(
        "categories".into(),
        opts.categories.iter().map(|c| c.to_string()).collect::<String>().into(),
    );
    manifest.entries = written.into_iter().flatten().collect();
    manifest.save(out)?;
    Ok(manifest)
}

fn write_sample(opts: &GenerateOptions, index: usize, out: &Path) -> Result<Vec<ManifestEntry>> {
    let pair = render_sample(opts, index)?;
    let entry = |suffix: String, aug: Option<u8>| ManifestEntry {
        image: format!("{IMAGES_DIR}/{index:06}{suffix}.png"),
        mask: format!("{MASKS_DIR}/{index:06}{suffix}.png"),
        domain: opts.style.domain,
        category: pair.meta.category,
        base_id: pair.meta.base_id.clone(),
        augmentation_index: aug,
    };
    let items: Vec<(ManifestEntry, SamplePair)> = if opts.augment {
        augment_crops(&pair, opts.intrinsics.width_px.max(opts.intrinsics.height_px))?
            .into_iter()
            .enumerate()
            .map(|(k, p)| (entry(format!("_{k}"), Some(k as u8)), p))
            .collect()
    } else {
        vec![(entry(String::new(), None), pair.clone())]
    };
    let mut entries = Vec::with_capacity(items.len());
    for (e, p) in items {
        write_png(&p.rgb, &out.join(&e.image))?;
        write_png(&p.mask, &out.join(&e.mask))?;
        entries.push(e);
    }
    Ok(entries)
}
