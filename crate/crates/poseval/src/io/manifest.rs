//! Dataset-variant manifests: named collections of models, ground-truth and
//! estimate files, e.g. a real, a synthetic and a mixed training variant of
//! the same parts.
//!
//! ```json
//! {"variants": [
//!   {"name": "R", "models": "models",
//!    "splits": {"test": {"ground_truth": ["real/scenes"], "estimates": ["real/est.csv"]}}}
//! ]}
//! ```
//!
//! Relative paths are resolved against the manifest's directory.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use poseval_core::{Estimate, GtAnnotation};
use serde::Deserialize;

use super::{load_estimates, load_ground_truth};
use crate::error::{Error, Location, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Split {
    pub ground_truth: Vec<PathBuf>,
    #[serde(default)]
    pub estimates: Vec<PathBuf>,
}

impl Split {
    pub fn load_ground_truth(&self) -> Result<Vec<GtAnnotation>> {
        let mut all = Vec::new();
        for p in &self.ground_truth {
            all.extend(load_ground_truth(p)?);
        }
        all.sort_by_key(GtAnnotation::key);
        Ok(all)
    }

    pub fn load_estimates(&self) -> Result<Vec<Estimate>> {
        let mut all = Vec::new();
        for p in &self.estimates {
            all.extend(load_estimates(p)?);
        }
        Ok(all)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub name: String,
    pub models: PathBuf,
    pub splits: BTreeMap<String, Split>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub variants: Vec<Variant>,
}

impl DatasetManifest {
    /// Reads a manifest, resolves its paths and checks that names are
    /// unique and that every referenced path exists.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: Self = serde_json::from_str(&text)
            .map_err(|e| Error::format(path, Location::Line { line: e.line(), column: e.column() }, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut names = HashSet::new();
        for v in &mut manifest.variants {
            if !names.insert(v.name.clone()) {
                return Err(Error::format(path, Location::File, format!("duplicate variant name `{}`", v.name)));
            }
            let mut paths = vec![&mut v.models];
            for split in v.splits.values_mut() {
                paths.extend(split.ground_truth.iter_mut());
                paths.extend(split.estimates.iter_mut());
            }
            for p in paths {
                *p = base.join(&*p);
                if !p.exists() {
                    return Err(Error::format(
                        path,
                        Location::File,
                        format!("variant `{}` references missing path {}", v.name, p.display()),
                    ));
                }
            }
        }
        Ok(manifest)
    }

    pub fn variant(&self, name: &str) -> Result<&Variant> {
        self.variants
            .iter()
            .find(|v| v.name == name)
            .ok_or_else(|| Error::Invalid(format!("manifest has no variant `{name}`")))
    }
}

impl Variant {
    pub fn split(&self, name: &str) -> Result<&Split> {
        self.splits
            .get(name)
            .ok_or_else(|| Error::Invalid(format!("variant `{}` has no split `{name}`", self.name)))
    }
}
