//! Python bindings. Images cross the boundary as raw row-major bytes (RGB8 or
//! L8) plus their width; structured results come back as dicts or JSON text.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use cropforge::baseline::{self, DetectorParams};
use cropforge::dataset::{self, GenerateOptions, MixSpec};
use cropforge::field_model::{self, FieldSpec};
use cropforge::metrics::{self, ScoreParams};
use cropforge::render::SceneStyle;
use cropforge::Category;
use image::RgbImage;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Field layout as JSON. `spec_json` overrides the default field parameters.
#[pyfunction]
#[pyo3(signature = (seed, spec_json=None, category=None, intensity=0.8))]
fn generate_field(seed: u64, spec_json: Option<&str>, category: Option<&str>, intensity: f64) -> PyResult<String> {
    let mut spec: FieldSpec = match spec_json {
        Some(s) => serde_json::from_str(s).map_err(err)?,
        None => FieldSpec::default(),
    };
    spec.rng_seed = seed;
    let mut layout = field_model::generate_field(&spec).map_err(err)?;
    if let Some(c) = category {
        let c: Category = c.parse().map_err(err)?;
        layout = field_model::apply_variation(&layout, &cropforge::CategoryVariation::new(c, intensity)).map_err(err)?;
    }
    serde_json::to_string(&layout).map_err(err)
}

/// Render image `index` of the dataset `(seed, style, category)`.
/// Returns `(rgb_bytes, mask_bytes, width, height, meta_json)`.
#[pyfunction]
#[pyo3(signature = (seed, index=0, category=None, style="sim"))]
fn render_pair<'py>(
    py: Python<'py>,
    seed: u64,
    index: usize,
    category: Option<&str>,
    style: &str,
) -> PyResult<(Bound<'py, PyBytes>, Bound<'py, PyBytes>, u32, u32, String)> {
    let mut opts = GenerateOptions::new(index + 1, SceneStyle::preset(style).map_err(err)?, seed);
    if let Some(c) = category {
        opts.categories = vec![c.parse().map_err(err)?];
    }
    let pair = dataset::render_sample(&opts, index).map_err(err)?;
    let (w, h) = pair.rgb.dimensions();
    Ok((
        PyBytes::new(py, pair.rgb.as_raw()),
        PyBytes::new(py, pair.mask.as_raw()),
        w,
        h,
        serde_json::to_string(&pair.meta).map_err(err)?,
    ))
}

#[pyfunction]
#[pyo3(signature = (pred, gt, width, threshold=128))]
fn confusion<'py>(py: Python<'py>, pred: &[u8], gt: &[u8], width: u32, threshold: u8) -> PyResult<Bound<'py, PyDict>> {
    let c = metrics::confusion_raw(pred, gt, width, threshold).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("tp", c.tp)?;
    d.set_item("fp", c.fp)?;
    d.set_item("fn", c.fn_)?;
    d.set_item("tn", c.tn)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (pred, gt, width, threshold=128))]
fn iou(pred: &[u8], gt: &[u8], width: u32, threshold: u8) -> PyResult<f64> {
    Ok(metrics::confusion_raw(pred, gt, width, threshold).map_err(err)?.iou().value)
}

#[pyfunction]
#[pyo3(signature = (iou, theta_p=0.225, theta_b=0.160))]
fn performance_score(iou: f64, theta_p: f64, theta_b: f64) -> PyResult<f64> {
    metrics::performance_score(iou, &ScoreParams { theta_p, theta_b }).map_err(err)
}

/// `{"a": 0.17, ...}` to `(score, {"a": True, ...})`.
#[pyfunction]
#[pyo3(signature = (per_category, threshold=0.16))]
fn category_report(per_category: BTreeMap<String, f64>, threshold: f64) -> PyResult<(usize, BTreeMap<String, bool>)> {
    let map = metrics::parse_category_map(per_category.iter().map(|(k, v)| (k.as_str(), *v))).map_err(err)?;
    let card = metrics::category_report(&map, threshold).map_err(err)?;
    Ok((card.score, card.passed.into_iter().map(|(c, p)| (c.to_string(), p)).collect()))
}

#[pyfunction]
fn relative_percentage(sim_count: usize, real_count: usize) -> PyResult<f64> {
    dataset::relative_percentage(&MixSpec::new("", sim_count, real_count, 0)).map_err(err)
}

/// The named training-set compositions as `(model_id, sim, real)`.
#[pyfunction]
fn mix_presets() -> Vec<(&'static str, usize, usize)> {
    dataset::PRESETS.to_vec()
}

/// Run the baseline on an RGB8 buffer. Returns `(mask_bytes, lines_json)`.
#[pyfunction]
#[pyo3(signature = (rgb, width, height, params_json=None))]
fn detect_rows<'py>(
    py: Python<'py>,
    rgb: &[u8],
    width: u32,
    height: u32,
    params_json: Option<&str>,
) -> PyResult<(Bound<'py, PyBytes>, String)> {
    let params: DetectorParams = match params_json {
        Some(s) => serde_json::from_str(s).map_err(err)?,
        None => DetectorParams::default(),
    };
    let img = RgbImage::from_raw(width, height, rgb.to_vec())
        .ok_or_else(|| err(format!("expected {} bytes for {width}x{height} RGB", width as usize * height as usize * 3)))?;
    let det = baseline::detect_rows(&img, &params).map_err(err)?;
    Ok((PyBytes::new(py, det.mask.as_raw()), serde_json::to_string(&det.lines).map_err(err)?))
}

#[pymodule]
fn cropforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(generate_field, m)?)?;
    m.add_function(wrap_pyfunction!(render_pair, m)?)?;
    m.add_function(wrap_pyfunction!(confusion, m)?)?;
    m.add_function(wrap_pyfunction!(iou, m)?)?;
    m.add_function(wrap_pyfunction!(performance_score, m)?)?;
    m.add_function(wrap_pyfunction!(category_report, m)?)?;
    m.add_function(wrap_pyfunction!(relative_percentage, m)?)?;
    m.add_function(wrap_pyfunction!(mix_presets, m)?)?;
    m.add_function(wrap_pyfunction!(detect_rows, m)?)?;
    Ok(())
}
