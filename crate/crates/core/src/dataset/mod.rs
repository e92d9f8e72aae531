//! On-disk dataset contract, augmentation, and training-set composition.
//!
//! A dataset is a directory holding `images/*.png`, `masks/*.png` and a
//! `manifest.json` whose entry paths are relative to the manifest.

mod augment;
mod generate;
pub mod io;
mod manifest;
mod mix;
mod split;

pub use augment::{augment_crops, crop_window, output_to_input, Corner, CROP_FRACTION, OUTPUT_SIZE};
pub use generate::{generate_dataset, plan_sample, render_sample, CaptureRig, GenerateOptions, PlannedSample};
pub use manifest::{
    manifest_path, manifest_root, validate, DatasetManifest, Domain, ManifestEntry, ValidationReport, IMAGES_DIR,
    MANIFEST_FILE, MANIFEST_SCHEMA, MASKS_DIR,
};
pub use mix::{manifest_relative_percentage, mix, relative_percentage, MixSpec, PRESETS};
pub use split::split;
