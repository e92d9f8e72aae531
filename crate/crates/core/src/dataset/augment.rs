use image::imageops::{self, FilterType};
use image::GrayImage;

use crate::error::{Error, Result};
use crate::render::SamplePair;

pub const CROP_FRACTION: f64 = 0.75;
pub const OUTPUT_SIZE: u32 = 512;

/// Crop corners in augmentation-index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::TopLeft, Corner::TopRight, Corner::BottomLeft, Corner::BottomRight];
}

/// Crop window `(x0, y0, width, height)` for a corner of a `width x height` image.
pub fn crop_window(corner: Corner, width: u32, height: u32) -> (u32, u32, u32, u32) {
    let cw = (width as f64 * CROP_FRACTION).round() as u32;
    let ch = (height as f64 * CROP_FRACTION).round() as u32;
    let (x0, y0) = match corner {
        Corner::TopLeft => (0, 0),
        Corner::TopRight => (width - cw, 0),
        Corner::BottomLeft => (0, height - ch),
        Corner::BottomRight => (width - cw, height - ch),
    };
    (x0, y0, cw, ch)
}

/// Four corner crops covering 75% of each dimension, rescaled to
/// `output_size` square. Photos are resampled bilinearly, masks by nearest
/// neighbour (output pixel `j` samples input pixel `floor((j + 0.5) * crop / output)`),
/// so masks stay binary.
///
/// Inputs must be at least `0.75 * output_size` on each side so no crop is
/// stretched by more than the crop itself implies.
pub fn augment_crops(pair: &SamplePair, output_size: u32) -> Result<[SamplePair; 4]> {
    let (w, h) = pair.rgb.dimensions();
    if pair.mask.dimensions() != (w, h) {
        return Err(Error::DimensionMismatch {
            left: (w, h),
            right: pair.mask.dimensions(),
        });
    }
    let min = (output_size as f64 * CROP_FRACTION).ceil() as u32;
    if output_size == 0 || w < min || h < min {
        return Err(Error::Undersized { width: w, height: h, min });
    }
    Ok(Corner::ALL.map(|corner| {
        let (x0, y0, cw, ch) = crop_window(corner, w, h);
        let rgb = imageops::crop_imm(&pair.rgb, x0, y0, cw, ch).to_image();
        let rgb = imageops::resize(&rgb, output_size, output_size, FilterType::Triangle);
        let mask = resize_nearest(&pair.mask, (x0, y0, cw, ch), output_size);
        SamplePair {
            rgb,
            mask,
            meta: pair.meta.clone(),
        }
    }))
}

fn resize_nearest(src: &GrayImage, (x0, y0, cw, ch): (u32, u32, u32, u32), size: u32) -> GrayImage {
    let map = |j: u32, extent: u32| ((j as u64 * 2 + 1) * extent as u64 / (2 * size as u64)) as u32;
    GrayImage::from_fn(size, size, |x, y| *src.get_pixel(x0 + map(x, cw), y0 + map(y, ch)))
}

/// Inverse of the mask resampling: input pixel coordinates of an output point.
pub fn output_to_input(corner: Corner, width: u32, height: u32, output_size: u32, p: [f64; 2]) -> [f64; 2] {
    let (x0, y0, cw, ch) = crop_window(corner, width, height);
    [
        x0 as f64 + p[0] * cw as f64 / output_size as f64,
        y0 as f64 + p[1] * ch as f64 / output_size as f64,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Domain;
    use crate::render::{CameraPose, SampleMeta};
    use crate::Vec3;

    fn pair(w: u32, h: u32, mask: impl Fn(u32, u32) -> u8) -> SamplePair {
        SamplePair {
            rgb: image::RgbImage::from_fn(w, h, |x, y| image::Rgb([(x % 256) as u8, (y % 256) as u8, 7])),
            mask: GrayImage::from_fn(w, h, |x, y| image::Luma([mask(x, y)])),
            meta: SampleMeta {
                pose: CameraPose { position: Vec3::new(0.0, 0.0, 1.0), yaw_deg: 0.0, pitch_deg: 25.0, roll_deg: 0.0 },
                category: None,
                domain: Domain::Sim,
                base_id: "x".into(),
            },
        }
    }

    #[test]
    fn yields_four_full_size_outputs() {
        let out = augment_crops(&pair(640, 480, |_, _| 0), 512).unwrap();
        for p in &out {
            assert_eq!(p.rgb.dimensions(), (512, 512));
            assert_eq!(p.mask.dimensions(), (512, 512));
            assert!(p.mask.pixels().all(|v| v.0[0] == 0));
        }
    }

    #[test]
    fn masks_stay_binary_and_corners_differ() {
        let out = augment_crops(&pair(512, 512, |x, y| if (x / 7 + y / 5) % 2 == 0 { 255 } else { 0 }), 512).unwrap();
        for p in &out {
            assert!(p.mask.pixels().all(|v| matches!(v.0[0], 0 | 255)));
        }
        // Top-left photo starts at input (0, 0); top-right at (128, 0).
        assert_eq!(out[0].rgb.get_pixel(0, 0).0[0], 0);
        assert!(out[1].rgb.get_pixel(0, 0).0[0] >= 127);
        assert_ne!(out[0].mask, out[3].mask);
    }

    #[test]
    fn undersized_input_is_rejected() {
        assert!(matches!(
            augment_crops(&pair(300, 600, |_, _| 0), 512),
            Err(Error::Undersized { .. })
        ));
    }

    #[test]
    fn nearest_mapping_matches_inverse() {
        // A single white input pixel appears where the inverse map lands.
        let p = pair(512, 512, |x, y| if (x, y) == (300, 200) { 255 } else { 0 });
        let out = augment_crops(&p, 512).unwrap();
        let br = &out[3].mask;
        let whites: Vec<_> = br.enumerate_pixels().filter(|(_, _, v)| v.0[0] == 255).map(|(x, y, _)| (x, y)).collect();
        assert!(!whites.is_empty());
        for (x, y) in whites {
            let [sx, sy] = output_to_input(Corner::BottomRight, 512, 512, 512, [x as f64 + 0.5, y as f64 + 0.5]);
            assert_eq!((sx.floor() as u32, sy.floor() as u32), (300, 200));
        }
    }
}
