use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::confusion::{confusion, ConfusionCounts, DEFAULT_THRESHOLD};
use super::score::{performance_score, ScoreParams};
use crate::dataset::{io, DatasetManifest};
use crate::error::{Error, Result};
use crate::field_model::Category;

/// Per-category IoU at or above which a category counts as solved.
pub const SUCCESS_THRESHOLD: f64 = 0.16;

/// Pass/fail per category plus the model score (number of passes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scorecard {
    pub success_threshold: f64,
    pub score: usize,
    pub passed: BTreeMap<Category, bool>,
}

/// Score a per-category IoU map. The comparison is inclusive.
pub fn category_report(per_category_iou: &BTreeMap<Category, f64>, success_threshold: f64) -> Result<Scorecard> {
    if per_category_iou.is_empty() {
        return Err(Error::invalid("per_category_iou", "map is empty"));
    }
    if !success_threshold.is_finite() {
        return Err(Error::invalid("success_threshold", "must be finite"));
    }
    let mut passed = BTreeMap::new();
    for (&cat, &iou) in per_category_iou {
        if !iou.is_finite() {
            return Err(Error::invalid("per_category_iou", format!("non-finite IoU for category {cat}")));
        }
        passed.insert(cat, iou >= success_threshold);
    }
    Ok(Scorecard {
        success_threshold,
        score: passed.values().filter(|&&p| p).count(),
        passed,
    })
}

/// Parse a map keyed by category letter (`"a"`..`"j"`).
pub fn parse_category_map<'a, I>(entries: I) -> Result<BTreeMap<Category, f64>>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    entries
        .into_iter()
        .map(|(k, v)| Ok((k.parse::<Category>()?, v)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub params: ScoreParams,
    pub success_threshold: f64,
    pub binarize_threshold: u8,
    /// Attach the category scorecard.
    pub per_category: bool,
    pub model_id: Option<String>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            params: ScoreParams::default(),
            success_threshold: SUCCESS_THRESHOLD,
            binarize_threshold: DEFAULT_THRESHOLD,
            per_category: false,
            model_id: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub samples: usize,
    pub counts: ConfusionCounts,
    /// Micro IoU over the category's samples.
    pub iou: f64,
    pub mean_iou: f64,
}

/// Evaluation of one model over a labelled set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_id: Option<String>,
    pub sample_count: usize,
    pub counts: ConfusionCounts,
    /// IoU of the summed counts.
    pub iou: f64,
    /// Mean of per-image IoUs.
    pub mean_iou: f64,
    pub accuracy: f64,
    pub performance_score: f64,
    pub degenerate_samples: usize,
    pub params: ScoreParams,
    pub per_category: BTreeMap<Category, CategoryStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scorecard: Option<Scorecard>,
}

impl EvalReport {
    /// Aggregate per-image counts. Samples without a category contribute to
    /// the totals only.
    pub fn from_samples(samples: &[(Option<Category>, ConfusionCounts)], opts: &EvalOptions) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Undefined("evaluation over zero samples".into()));
        }
        let counts: ConfusionCounts = samples.iter().map(|s| s.1).sum();
        let per_image: Vec<_> = samples.iter().map(|s| s.1.iou()).collect();
        let mean_iou = per_image.iter().map(|i| i.value).sum::<f64>() / samples.len() as f64;
        let iou = counts.iou().value;

        let mut groups: BTreeMap<Category, Vec<ConfusionCounts>> = BTreeMap::new();
        for (cat, c) in samples {
            if let Some(cat) = cat {
                groups.entry(*cat).or_default().push(*c);
            }
        }
        let per_category: BTreeMap<_, _> = groups
            .into_iter()
            .map(|(cat, cs)| {
                let sum: ConfusionCounts = cs.iter().copied().sum();
                let mean = cs.iter().map(|c| c.iou().value).sum::<f64>() / cs.len() as f64;
                let stats = CategoryStats {
                    samples: cs.len(),
                    counts: sum,
                    iou: sum.iou().value,
                    mean_iou: mean,
                };
                (cat, stats)
            })
            .collect();

        let scorecard = if opts.per_category && !per_category.is_empty() {
            let ious = per_category.iter().map(|(&c, s)| (c, s.iou)).collect();
            Some(category_report(&ious, opts.success_threshold)?)
        } else {
            None
        };

        Ok(EvalReport {
            model_id: opts.model_id.clone(),
            sample_count: samples.len(),
            counts,
            iou,
            mean_iou,
            accuracy: counts.accuracy()?,
            performance_score: performance_score(iou, &opts.params)?,
            degenerate_samples: per_image.iter().filter(|i| i.degenerate).count(),
            params: opts.params,
            per_category,
            scorecard,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Plain-text summary for terminals.
    pub fn to_table(&self) -> String {
        let mut t = String::new();
        let model = self.model_id.as_deref().unwrap_or("-");
        let _ = writeln!(t, "model            {model}");
        let _ = writeln!(t, "samples          {}", self.sample_count);
        let _ = writeln!(t, "IoU (micro)      {:6.2} %", 100.0 * self.iou);
        let _ = writeln!(t, "IoU (per-image)  {:6.2} %", 100.0 * self.mean_iou);
        let _ = writeln!(t, "accuracy         {:6.2} %", 100.0 * self.accuracy);
        let _ = writeln!(t, "P_m              {:7.2} %", self.performance_score);
        if self.degenerate_samples > 0 {
            let _ = writeln!(t, "degenerate       {} (empty prediction and label)", self.degenerate_samples);
        }
        if !self.per_category.is_empty() {
            let _ = writeln!(t);
            let _ = writeln!(t, "cat  name                 n    IoU %   pass");
            for (cat, s) in &self.per_category {
                let pass = match &self.scorecard {
                    Some(sc) if sc.passed[cat] => "yes",
                    Some(_) => "no",
                    None => "",
                };
                let _ = writeln!(
                    t,
                    "{}    {:<18} {:>4}  {:6.2}   {pass}",
                    cat.letter(),
                    cat.name(),
                    s.samples,
                    100.0 * s.iou
                );
            }
        }
        if let Some(sc) = &self.scorecard {
            let _ = writeln!(t, "model score      {} / {}", sc.score, sc.passed.len());
        }
        t
    }
}

/// Score prediction masks against a ground-truth manifest. The prediction for
/// an entry is read from `pred_root` at the entry's relative mask path.
pub fn evaluate_manifest(
    gt: &DatasetManifest,
    gt_root: &Path,
    pred_root: &Path,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let samples = gt
        .entries
        .par_iter()
        .map(|e| {
            let truth = io::read_mask(&gt_root.join(&e.mask))?;
            let pred = io::read_mask(&pred_root.join(&e.mask))?;
            Ok((e.category, confusion(&pred, &truth, opts.binarize_threshold)?))
        })
        .collect::<Result<Vec<_>>>()?;
    EvalReport::from_samples(&samples, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(tp: u64, fp: u64, fn_: u64, tn: u64) -> ConfusionCounts {
        ConfusionCounts { tp, fp, fn_, tn }
    }

    #[test]
    fn reference_rows_score() {
        let r = [15.88, 16.02, 25.44, 22.05, 17.69, 29.47, 30.49, 22.29, 21.78, 20.26];
        let b6 = [15.52, 15.91, 25.20, 23.26, 16.15, 27.50, 28.66, 21.95, 15.09, 17.63];
        for (row, want) in [(r, 9), (b6, 7)] {
            let map = Category::ALL.iter().copied().zip(row.iter().map(|v| v / 100.0)).collect();
            assert_eq!(category_report(&map, SUCCESS_THRESHOLD).unwrap().score, want);
        }
        let zeros = Category::ALL.iter().map(|&c| (c, 0.0)).collect();
        assert_eq!(category_report(&zeros, SUCCESS_THRESHOLD).unwrap().score, 0);
    }

    #[test]
    fn threshold_is_inclusive() {
        let map = BTreeMap::from([(Category::SlopeCurve, 0.16)]);
        assert_eq!(category_report(&map, 0.16).unwrap().score, 1);
    }

    #[test]
    fn report_errors() {
        assert!(category_report(&BTreeMap::new(), 0.16).is_err());
        assert!(matches!(
            parse_category_map([("a", 0.2), ("k", 0.3)]),
            Err(Error::UnknownCategory(_))
        ));
        assert!(EvalReport::from_samples(&[], &EvalOptions::default()).is_err());
    }

    #[test]
    fn micro_and_per_image_means_differ() {
        let samples = [
            (Some(Category::HorizontalShadow), counts(1, 0, 0, 9)),
            (Some(Category::HorizontalShadow), counts(1, 2, 1, 6)),
            (Some(Category::DenseWeed), counts(0, 0, 0, 10)),
        ];
        let opts = EvalOptions { per_category: true, ..Default::default() };
        let r = EvalReport::from_samples(&samples, &opts).unwrap();
        assert_eq!(r.counts, counts(2, 2, 1, 25));
        assert_eq!(r.iou, 0.4);
        assert!((r.mean_iou - (1.0 + 0.25 + 1.0) / 3.0).abs() < 1e-12);
        assert_eq!(r.degenerate_samples, 1);
        assert_eq!(r.per_category.len(), 2);
        let sc = r.scorecard.as_ref().unwrap();
        assert_eq!(sc.score, 2);
        let back: EvalReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_table().contains("model score      2 / 2"));
    }

    #[test]
    fn uncategorised_samples_skip_the_scorecard() {
        let opts = EvalOptions { per_category: true, ..Default::default() };
        let r = EvalReport::from_samples(&[(None, counts(3, 1, 0, 4))], &opts).unwrap();
        assert!(r.per_category.is_empty());
        assert!(r.scorecard.is_none());
        assert_eq!(r.accuracy, 7.0 / 8.0);
    }
}
