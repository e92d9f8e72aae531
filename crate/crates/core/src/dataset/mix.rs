use serde::{Deserialize, Serialize};

use super::manifest::{DatasetManifest, Domain, ManifestEntry};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Composition of a mixed training set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixSpec {
    pub model_id: String,
    pub sim_count: usize,
    pub real_count: usize,
    #[serde(default)]
    pub seed: u64,
}

/// The thirteen training-set compositions of the reference mixing grid:
/// `(model id, simulated images, real images)`.
pub const PRESETS: [(&str, usize, usize); 13] = [
    ("A1", 500, 0),
    ("A2", 500, 50),
    ("A3", 500, 100),
    ("A4", 500, 150),
    ("A5", 500, 200),
    ("A6", 500, 250),
    ("B1", 1000, 0),
    ("B2", 1000, 100),
    ("B3", 1000, 200),
    ("B4", 1000, 300),
    ("B5", 1000, 400),
    ("B6", 1000, 500),
    ("R", 0, 750),
];

impl MixSpec {
    pub fn new(model_id: impl Into<String>, sim_count: usize, real_count: usize, seed: u64) -> Self {
        MixSpec {
            model_id: model_id.into(),
            sim_count,
            real_count,
            seed,
        }
    }

    pub fn preset(model_id: &str, seed: u64) -> Result<Self> {
        PRESETS
            .iter()
            .find(|(id, _, _)| id.eq_ignore_ascii_case(model_id))
            .map(|&(id, sim, real)| MixSpec::new(id, sim, real, seed))
            .ok_or_else(|| Error::invalid("preset", format!("unknown preset `{model_id}` (A1..A6, B1..B6, R)")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.sim_count + self.real_count == 0 {
            return Err(Error::invalid("MixSpec", "sim_count + real_count must be positive"));
        }
        Ok(())
    }
}

/// Real-image count as a percentage of the simulated-image count.
pub fn relative_percentage(spec: &MixSpec) -> Result<f64> {
    ratio_percent(spec.real_count, spec.sim_count)
}

/// Relative percentage recomputed from a manifest's domain tags.
pub fn manifest_relative_percentage(m: &DatasetManifest) -> Result<f64> {
    ratio_percent(m.count(Domain::Real), m.count(Domain::Sim))
}

fn ratio_percent(real: usize, sim: usize) -> Result<f64> {
    if sim == 0 {
        return Err(Error::Undefined(
            "relative percentage is undefined without simulated samples".into(),
        ));
    }
    Ok(100.0 * real as f64 / sim as f64)
}

/// Draw `spec.sim_count` sim entries from `sim` and `spec.real_count` real
/// entries from `real`, uniformly without replacement. Selected entries keep
/// their source order; sim entries come first.
pub fn mix(sim: &DatasetManifest, real: &DatasetManifest, spec: &MixSpec) -> Result<DatasetManifest> {
    spec.validate()?;
    let mut out = DatasetManifest::new(spec.seed);
    out.model_id = Some(spec.model_id.clone());
    out.metadata.insert("sim_count".into(), spec.sim_count.into());
    out.metadata.insert("real_count".into(), spec.real_count.into());
    out.entries = select(sim, Domain::Sim, spec.sim_count, spec.seed)?;
    out.entries.extend(select(real, Domain::Real, spec.real_count, spec.seed)?);
    let mut keys = std::collections::HashSet::new();
    for e in &out.entries {
        if !keys.insert(e.key()) {
            return Err(Error::InvalidManifest(format!(
                "entry `{}` appears in both sources",
                e.base_id
            )));
        }
    }
    Ok(out)
}

fn select(source: &DatasetManifest, domain: Domain, count: usize, seed: u64) -> Result<Vec<ManifestEntry>> {
    let pool: Vec<&ManifestEntry> = source.entries.iter().filter(|e| e.domain == domain).collect();
    if pool.len() < count {
        return Err(Error::InsufficientEntries {
            domain: domain.as_str(),
            requested: count,
            available: pool.len(),
        });
    }
    let mut idx: Vec<usize> = (0..pool.len()).collect();
    Stream::keyed(seed, &[rng::tag::MIX, domain as u64]).shuffle(&mut idx);
    let mut chosen = idx[..count].to_vec();
    chosen.sort_unstable();
    Ok(chosen.into_iter().map(|i| pool[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source(domain: Domain, n: usize) -> DatasetManifest {
        let mut m = DatasetManifest::new(0);
        m.entries = (0..n)
            .map(|i| ManifestEntry {
                image: format!("images/{i:06}.png"),
                mask: format!("masks/{i:06}.png"),
                domain,
                category: None,
                base_id: format!("{domain}-{i:06}"),
                augmentation_index: None,
            })
            .collect();
        m
    }

    #[test]
    fn preset_a2_counts() {
        let out = mix(&source(Domain::Sim, 600), &source(Domain::Real, 100), &MixSpec::preset("A2", 1).unwrap()).unwrap();
        assert_eq!(out.count(Domain::Sim), 500);
        assert_eq!(out.count(Domain::Real), 50);
        assert_eq!(out.model_id.as_deref(), Some("A2"));
    }

    #[test]
    fn preset_r_is_all_real() {
        let out = mix(&source(Domain::Sim, 0), &source(Domain::Real, 750), &MixSpec::preset("r", 1).unwrap()).unwrap();
        assert_eq!((out.count(Domain::Sim), out.count(Domain::Real)), (0, 750));
    }

    #[test]
    fn zero_real_accepts_empty_real_source() {
        let out = mix(&source(Domain::Sim, 10), &source(Domain::Real, 0), &MixSpec::new("x", 5, 0, 0)).unwrap();
        assert_eq!(out.entries.len(), 5);
    }

    #[test]
    fn shortfall_names_domain() {
        let err = mix(&source(Domain::Sim, 10), &source(Domain::Real, 3), &MixSpec::new("x", 5, 4, 0)).unwrap_err();
        match err {
            Error::InsufficientEntries { domain, requested, available } => {
                assert_eq!((domain, requested, available), ("real", 4, 3));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn selection_is_seeded() {
        let (s, r) = (source(Domain::Sim, 100), source(Domain::Real, 100));
        let a = mix(&s, &r, &MixSpec::new("x", 10, 10, 4)).unwrap();
        let b = mix(&s, &r, &MixSpec::new("x", 10, 10, 4)).unwrap();
        let c = mix(&s, &r, &MixSpec::new("x", 10, 10, 5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.entries, c.entries);
    }

    #[test]
    fn relative_percentages() {
        assert_eq!(relative_percentage(&MixSpec::preset("B6", 0).unwrap()).unwrap(), 50.0);
        assert_eq!(relative_percentage(&MixSpec::preset("A1", 0).unwrap()).unwrap(), 0.0);
        assert_eq!(relative_percentage(&MixSpec::preset("A3", 0).unwrap()).unwrap(), 20.0);
        assert!(matches!(relative_percentage(&MixSpec::preset("R", 0).unwrap()), Err(Error::Undefined(_))));
    }

    #[test]
    fn empty_mix_is_rejected() {
        assert!(mix(&source(Domain::Sim, 1), &source(Domain::Real, 1), &MixSpec::new("x", 0, 0, 0)).is_err());
    }
}
