use std::iter::Sum;
use std::ops::{Add, AddAssign};

use image::GrayImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default prediction binarisation level (probability 0.5).
pub const DEFAULT_THRESHOLD: u8 = 128;

/// Pixel tallies of a binary prediction against a binary ground truth.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

/// An IoU value. Both masks empty is vacuous agreement: value 1, flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Iou {
    pub value: f64,
    pub degenerate: bool,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// `tp / (tp + fp + fn)`.
    pub fn iou(&self) -> Iou {
        let union = self.tp + self.fp + self.fn_;
        if union == 0 {
            Iou { value: 1.0, degenerate: true }
        } else {
            Iou {
                value: self.tp as f64 / union as f64,
                degenerate: false,
            }
        }
    }

    /// `(tp + tn) / total`. Dominated by background on thin-row masks; report
    /// it next to IoU, never instead of it.
    pub fn accuracy(&self) -> Result<f64> {
        match self.total() {
            0 => Err(Error::Undefined("accuracy of an empty image".into())),
            n => Ok((self.tp + self.tn) as f64 / n as f64),
        }
    }

    fn tally(&mut self, pred: bool, truth: bool) {
        match (pred, truth) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }
}

impl Add for ConfusionCounts {
    type Output = ConfusionCounts;
    fn add(self, o: Self) -> Self {
        ConfusionCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ConfusionCounts::default(), Add::add)
    }
}

/// Count agreement between `pred`, binarised at `>= threshold`, and a binary `gt`.
pub fn confusion(pred: &GrayImage, gt: &GrayImage, threshold: u8) -> Result<ConfusionCounts> {
    if pred.dimensions() != gt.dimensions() {
        return Err(Error::DimensionMismatch {
            left: pred.dimensions(),
            right: gt.dimensions(),
        });
    }
    confusion_raw(pred.as_raw(), gt.as_raw(), gt.width(), threshold)
}

/// Same as [`confusion`] over row-major byte buffers of width `width`.
pub fn confusion_raw(pred: &[u8], gt: &[u8], width: u32, threshold: u8) -> Result<ConfusionCounts> {
    if pred.len() != gt.len() {
        return Err(Error::DimensionMismatch {
            left: (width, (pred.len() as u32).checked_div(width).unwrap_or(0)),
            right: (width, (gt.len() as u32).checked_div(width).unwrap_or(0)),
        });
    }
    let mut c = ConfusionCounts::default();
    for (i, (&p, &g)) in pred.iter().zip(gt).enumerate() {
        let truth = match g {
            0 => false,
            255 => true,
            value => {
                let w = width.max(1) as usize;
                return Err(Error::NonBinaryMask {
                    x: (i % w) as u32,
                    y: (i / w) as u32,
                    value,
                });
            }
        };
        c.tally(p >= threshold, truth);
    }
    Ok(c)
}
