//! Procedural crop-row scenes with pixel-registered labels, plus the dataset and
//! evaluation machinery needed to run sim-to-real mixing experiments.
//!
//! The crate is organised around the data flow of an experiment:
//!
//! 1. [`field_model`] lays out a seeded sugar-beet field and applies one of the
//!    ten field-condition categories (shadows, slopes, gaps, weeds, ...).
//! 2. [`render`] renders an RGB photo and, from the same camera pose, a binary
//!    crop-row mask in which every row is an unlit white stripe.
//! 3. [`dataset`] writes pairs to disk, augments them, and composes mixed
//!    simulated/real training manifests.
//! 4. [`baseline`] is a classical ExG + Hough detector that produces masks
//!    without any learned model.
//! 5. [`metrics`] scores predicted masks: confusion counts, IoU, the
//!    normalised performance score, and the per-category scorecard.

pub mod baseline;
pub mod config;
pub mod dataset;
pub mod error;
pub mod field_model;
pub mod geom;
pub mod metrics;
pub mod render;
pub mod rng;

pub use error::{Error, Result};
pub use field_model::{Category, CategoryVariation, FieldLayout, FieldSpec};
pub use geom::Vec3;
