use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::{Component, Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_model::Category;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const IMAGES_DIR: &str = "images";
pub const MASKS_DIR: &str = "masks";
pub const MANIFEST_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Sim,
    Real,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Sim => "sim",
            Domain::Real => "real",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sim" => Ok(Domain::Sim),
            "real" => Ok(Domain::Real),
            other => Err(Error::UnknownDomain(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Photo path relative to the manifest's directory.
    pub image: String,
    pub mask: String,
    pub domain: Domain,
    pub category: Option<Category>,
    pub base_id: String,
    pub augmentation_index: Option<u8>,
}

impl ManifestEntry {
    pub fn key(&self) -> (&str, Option<u8>) {
        (&self.base_id, self.augmentation_index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema: u32,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    /// Free-form provenance (tool version, style, counts). Never timestamps,
    /// so reruns stay byte-identical.
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(seed: u64) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert(
            "created_by".to_string(),
            serde_json::Value::String(concat!("cropforge ", env!("CARGO_PKG_VERSION")).to_string()),
        );
        DatasetManifest {
            schema: MANIFEST_SCHEMA,
            seed,
            model_id: None,
            metadata,
            entries: Vec::new(),
        }
    }

    pub fn count(&self, domain: Domain) -> usize {
        self.entries.iter().filter(|e| e.domain == domain).count()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: DatasetManifest = serde_json::from_str(text)?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(Error::Schema(m.schema));
        }
        Ok(m)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Read a manifest file (or `<dir>/manifest.json` when given a directory).
    pub fn load(path: &Path) -> Result<Self> {
        let path = manifest_path(path);
        let f = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let m: DatasetManifest = serde_json::from_reader(BufReader::new(f))?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(Error::Schema(m.schema));
        }
        Ok(m)
    }

    /// Write under an exclusive file lock.
    pub fn save(&self, path: &Path) -> Result<()> {
        let path = manifest_path(path);
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let text = self.to_json()?;
        let mut f = OpenOptions::new()
            .create(true)
            .write(true)
            .truncate(false)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        f.lock().map_err(|e| Error::io(&path, e))?;
        f.set_len(0)
            .and_then(|_| f.write_all(text.as_bytes()))
            .and_then(|_| f.flush())
            .map_err(|e| Error::io(&path, e))?;
        f.unlock().map_err(|e| Error::io(&path, e))
    }

    /// Re-express every entry path, currently relative to `from`, relative to `to`.
    pub fn rebased(&self, from: &Path, to: &Path) -> Result<Self> {
        let from = absolute(from)?;
        let to = absolute(to)?;
        let rebase = |p: &str| -> String {
            let abs = normalize(&from.join(p));
            relative_to(&abs, &to).to_string_lossy().replace('\\', "/")
        };
        let mut out = self.clone();
        for e in &mut out.entries {
            e.image = rebase(&e.image);
            e.mask = rebase(&e.mask);
        }
        Ok(out)
    }
}

/// `path` itself if it names a file, `path/manifest.json` if it is a directory.
pub fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    }
}

/// Directory that manifest-relative paths resolve against.
pub fn manifest_root(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.to_path_buf()
    } else {
        path.parent().map(Path::to_path_buf).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub entries: usize,
    pub missing_files: Vec<String>,
    pub duplicate_ids: Vec<String>,
    /// Problems found when decoding images (only with deep validation).
    pub content_errors: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.missing_files.is_empty() && self.duplicate_ids.is_empty() && self.content_errors.is_empty()
    }
}

/// Check that every referenced file exists and `(base_id, augmentation_index)`
/// is unique. With `deep`, also decode each pair and check dimensions and
/// mask binarity.
pub fn validate(manifest: &DatasetManifest, root: &Path, deep: bool) -> ValidationReport {
    let mut report = ValidationReport {
        entries: manifest.entries.len(),
        ..Default::default()
    };
    let mut seen = HashSet::new();
    for e in &manifest.entries {
        if !seen.insert(e.key()) {
            let id = match e.augmentation_index {
                Some(k) => format!("{}#{k}", e.base_id),
                None => e.base_id.clone(),
            };
            report.duplicate_ids.push(id);
        }
    }
    let per_entry: Vec<(Vec<String>, Vec<String>)> = manifest
        .entries
        .par_iter()
        .map(|e| {
            let mut missing = Vec::new();
            for p in [&e.image, &e.mask] {
                if !root.join(p).is_file() {
                    missing.push(p.clone());
                }
            }
            let mut problems = Vec::new();
            if deep && missing.is_empty() {
                if let Err(err) = check_pair(&root.join(&e.image), &root.join(&e.mask)) {
                    problems.push(format!("{}: {err}", e.base_id));
                }
            }
            (missing, problems)
        })
        .collect();
    for (missing, problems) in per_entry {
        report.missing_files.extend(missing);
        report.content_errors.extend(problems);
    }
    report
}

fn check_pair(image: &Path, mask: &Path) -> Result<()> {
    let rgb = super::io::read_rgb(image)?;
    let m = super::io::read_mask(mask)?;
    if rgb.dimensions() != m.dimensions() {
        return Err(Error::DimensionMismatch {
            left: rgb.dimensions(),
            right: m.dimensions(),
        });
    }
    crate::render::ensure_binary(&m)
}

fn absolute(p: &Path) -> Result<PathBuf> {
    let abs = if p.is_absolute() {
        p.to_path_buf()
    } else {
        std::env::current_dir().map_err(|e| Error::io(p, e))?.join(p)
    };
    Ok(normalize(&abs))
}

/// Lexically resolve `.` and `..` components.
fn normalize(p: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in p.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                out.pop();
            }
            other => out.push(other.as_os_str()),
        }
    }
    out
}

fn relative_to(path: &Path, base: &Path) -> PathBuf {
    let p: Vec<_> = path.components().collect();
    let b: Vec<_> = base.components().collect();
    let common = p.iter().zip(&b).take_while(|(x, y)| x == y).count();
    let mut out = PathBuf::new();
    for _ in common..b.len() {
        out.push("..");
    }
    for c in &p[common..] {
        out.push(c.as_os_str());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, aug: Option<u8>) -> ManifestEntry {
        ManifestEntry {
            image: format!("images/{id}.png"),
            mask: format!("masks/{id}.png"),
            domain: Domain::Sim,
            category: Some(Category::DenseWeed),
            base_id: id.to_string(),
            augmentation_index: aug,
        }
    }

    #[test]
    fn json_round_trip() {
        let mut m = DatasetManifest::new(3);
        m.entries = vec![entry("a", None), entry("b", Some(2))];
        let back = DatasetManifest::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(m.to_json().unwrap().contains("\"category\": \"e\""));
    }

    #[test]
    fn rejects_foreign_schema_and_vocabulary() {
        let bad = r#"{"schema":2,"seed":0,"entries":[]}"#;
        assert!(matches!(DatasetManifest::from_json(bad), Err(Error::Schema(2))));
        let bad = r#"{"schema":1,"seed":0,"entries":[{"image":"i","mask":"m","domain":"synthetic","category":null,"base_id":"x","augmentation_index":null}]}"#;
        assert!(DatasetManifest::from_json(bad).is_err());
    }

    #[test]
    fn validation_lists_missing_files_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = DatasetManifest::new(0);
        m.entries = vec![entry("a", Some(0)), entry("a", Some(0)), entry("a", Some(1))];
        let r = validate(&m, dir.path(), false);
        assert_eq!(r.duplicate_ids, vec!["a#0".to_string()]);
        assert_eq!(r.missing_files.len(), 6);
        assert!(!r.is_ok());
    }

    #[test]
    fn save_and_load_through_directory() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = DatasetManifest::new(5);
        m.entries.push(entry("z", None));
        m.save(dir.path()).unwrap();
        // Rewriting a shorter manifest truncates the old content.
        let short = DatasetManifest::new(5);
        short.save(&dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(DatasetManifest::load(dir.path()).unwrap(), short);
    }

    #[test]
    fn rebase_walks_up_and_down() {
        let mut m = DatasetManifest::new(0);
        m.entries.push(entry("q", None));
        let out = m.rebased(Path::new("/data/sim"), Path::new("/data/mixes/a2")).unwrap();
        assert_eq!(out.entries[0].image, "../../sim/images/q.png");
    }
}
