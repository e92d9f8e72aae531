use image::{GrayImage, Luma, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A row-major scalar image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarMap {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f32>,
}

impl ScalarMap {
    pub fn get(&self, x: u32, y: u32) -> f32 {
        self.data[(y * self.width + x) as usize]
    }
}

/// Excess-green index `2G - R - B` with channels scaled to [0, 1].
pub fn exg(rgb: &RgbImage) -> ScalarMap {
    ScalarMap {
        width: rgb.width(),
        height: rgb.height(),
        data: rgb.pixels().map(|p| exg_pixel(p.0)).collect(),
    }
}

/// Separable box mean with radius `r`; the window is truncated at the border.
pub fn box_blur(map: &ScalarMap, r: u32) -> ScalarMap {
    if r == 0 {
        return map.clone();
    }
    let (w, h) = (map.width as usize, map.height as usize);
    let r = r as usize;
    let pass = |src: &[f32], len: usize, stride: usize, lines: usize, step: usize| {
        let mut out = vec![0f32; src.len()];
        for l in 0..lines {
            let base = l * step;
            let mut prefix = vec![0f64; len + 1];
            for i in 0..len {
                prefix[i + 1] = prefix[i] + src[base + i * stride] as f64;
            }
            for i in 0..len {
                let (lo, hi) = (i.saturating_sub(r), (i + r + 1).min(len));
                out[base + i * stride] = ((prefix[hi] - prefix[lo]) / (hi - lo) as f64) as f32;
            }
        }
        out
    };
    let rows = pass(&map.data, w, 1, h, w);
    let data = pass(&rows, h, w, w, 1);
    ScalarMap { width: map.width, height: map.height, data }
}

/// [`exg`] over an interleaved buffer; only 3-channel data is accepted.
pub fn exg_raw(data: &[u8], width: u32, height: u32, channels: usize) -> Result<ScalarMap> {
    if channels != 3 {
        return Err(Error::invalid("channels", format!("expected 3 channels, got {channels}")));
    }
    if data.len() != width as usize * height as usize * 3 {
        return Err(Error::invalid("data", "buffer length does not match width * height * 3"));
    }
    Ok(ScalarMap {
        width,
        height,
        data: data.chunks_exact(3).map(|p| exg_pixel([p[0], p[1], p[2]])).collect(),
    })
}

fn exg_pixel([r, g, b]: [u8; 3]) -> f32 {
    (2 * g as i32 - r as i32 - b as i32) as f32 / 255.0
}

/// Otsu threshold over a 256-bin histogram spanning [-2, 2]. Returns the
/// lower edge of the first foreground bin.
pub fn otsu_threshold(map: &ScalarMap) -> f32 {
    const BINS: usize = 256;
    let bin_of = |v: f32| (((v + 2.0) / 4.0 * BINS as f32) as usize).min(BINS - 1);
    let mut hist = [0u64; BINS];
    for &v in &map.data {
        hist[bin_of(v)] += 1;
    }
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return 2.0;
    }
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &n)| i as f64 * n as f64).sum();
    let (mut w0, mut sum0) = (0u64, 0.0f64);
    let (mut best, mut best_k) = (-1.0f64, BINS);
    for (k, &n) in hist.iter().enumerate().take(BINS - 1) {
        w0 += n;
        sum0 += k as f64 * n as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (sum_all - sum0) / w1 as f64;
        let between = w0 as f64 * w1 as f64 * (m0 - m1).powi(2);
        if between > best {
            best = between;
            best_k = k + 1;
        }
    }
    -2.0 + 4.0 * best_k as f32 / BINS as f32
}

/// Foreground where ExG is at or above `max(otsu, floor)`. The floor keeps a
/// vegetation-free image from being split into two soil classes.
pub fn binarize(map: &ScalarMap, floor: f32) -> GrayImage {
    let t = otsu_threshold(map).max(floor);
    GrayImage::from_fn(map.width, map.height, |x, y| {
        Luma([if map.get(x, y) >= t { 255 } else { 0 }])
    })
}
