use std::collections::BTreeMap;

use super::manifest::DatasetManifest;
use crate::error::{Error, Result};
use crate::field_model::Category;
use crate::rng::{self, Stream};

/// Split into `(train, test)` with `round(fraction * n)` training entries per
/// category (entries without a category form their own stratum). Both halves
/// keep the source order.
pub fn split(manifest: &DatasetManifest, fraction: f64, seed: u64) -> Result<(DatasetManifest, DatasetManifest)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::invalid("fraction", format!("{fraction} is outside [0, 1]")));
    }
    let mut strata: BTreeMap<Option<Category>, Vec<usize>> = BTreeMap::new();
    for (i, e) in manifest.entries.iter().enumerate() {
        strata.entry(e.category).or_default().push(i);
    }
    let mut in_train = vec![false; manifest.entries.len()];
    for (cat, mut idx) in strata {
        let key = cat.map_or(u64::MAX, |c| c.index() as u64);
        Stream::keyed(seed, &[rng::tag::SPLIT, key]).shuffle(&mut idx);
        let take = (fraction * idx.len() as f64).round() as usize;
        for &i in &idx[..take] {
            in_train[i] = true;
        }
    }
    let part = |want: bool| {
        let mut m = manifest.clone();
        m.entries = manifest
            .entries
            .iter()
            .zip(&in_train)
            .filter(|(_, &t)| t == want)
            .map(|(e, _)| e.clone())
            .collect();
        m
    };
    Ok((part(true), part(false)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Domain, ManifestEntry};
    use std::collections::HashSet;

    fn manifest(per_category: usize) -> DatasetManifest {
        let mut m = DatasetManifest::new(0);
        for c in Category::ALL {
            for i in 0..per_category {
                m.entries.push(ManifestEntry {
                    image: format!("images/{c}{i}.png"),
                    mask: format!("masks/{c}{i}.png"),
                    domain: Domain::Real,
                    category: Some(c),
                    base_id: format!("{c}-{i}"),
                    augmentation_index: None,
                });
            }
        }
        m
    }

    #[test]
    fn half_split_is_disjoint_and_exhaustive() {
        let m = manifest(200);
        let (train, test) = split(&m, 0.5, 1).unwrap();
        assert_eq!((train.entries.len(), test.entries.len()), (1000, 1000));
        let a: HashSet<_> = train.entries.iter().map(|e| e.base_id.clone()).collect();
        let b: HashSet<_> = test.entries.iter().map(|e| e.base_id.clone()).collect();
        assert!(a.is_disjoint(&b));
        assert_eq!(a.len() + b.len(), 2000);
    }

    #[test]
    fn stratified_three_quarters() {
        let (train, _) = split(&manifest(100), 0.75, 9).unwrap();
        for c in Category::ALL {
            assert_eq!(train.entries.iter().filter(|e| e.category == Some(c)).count(), 75);
        }
    }

    #[test]
    fn full_fraction_leaves_test_empty() {
        let (train, test) = split(&manifest(3), 1.0, 0).unwrap();
        assert_eq!(train.entries.len(), 30);
        assert!(test.entries.is_empty());
        assert!(split(&manifest(3), 1.5, 0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let m = manifest(20);
        assert_eq!(split(&m, 0.5, 3).unwrap().0, split(&m, 0.5, 3).unwrap().0);
        assert_ne!(split(&m, 0.5, 3).unwrap().0, split(&m, 0.5, 4).unwrap().0);
    }
}
