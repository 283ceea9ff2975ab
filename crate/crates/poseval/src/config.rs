//! Run configuration, read from and echoed as TOML.
//!
//! Every section is optional and falls back to the library defaults. Unknown
//! keys are rejected, so a misspelt or differently-united key such as
//! `error_threshold_cm` fails instead of being ignored. All lengths are mm.

use std::fs;
use std::path::{Path, PathBuf};

use poseval_core::{EvalConfig, NoiseModel, ProcessConfig, SceneLayout};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Location, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub models: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimates: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
}

/// Synthetic scene generation for `perturb`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    pub scenes: usize,
    pub parts_per_scene: usize,
    /// Model to place; the lowest loaded id when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object_id: Option<u32>,
    pub layout: SceneLayout,
    pub seed: u64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self { scenes: 25, parts_per_scene: 8, object_id: None, layout: SceneLayout::default(), seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub replications: usize,
    /// Model to simulate; the lowest loaded id when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object_id: Option<u32>,
    /// Labels copied into `summary.csv`.
    pub method: String,
    pub variant: String,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self { replications: 1, object_id: None, method: "synthetic".into(), variant: String::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// When set, overrides the seeds of the `noise`, `process` and `scene` sections.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every available core. Results do not depend on it.
    pub jobs: usize,
    /// Reject unknown object ids (otherwise drop them with a warning).
    pub strict: bool,
    pub log_level: String,
    pub paths: Paths,
    pub eval: EvalConfig,
    pub noise: NoiseModel,
    pub process: ProcessConfig,
    pub scene: SceneConfig,
    pub simulate: SimulateConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: None,
            jobs: 0,
            strict: true,
            log_level: "warn".into(),
            paths: Paths::default(),
            eval: EvalConfig::default(),
            noise: NoiseModel::default(),
            process: ProcessConfig::default(),
            scene: SceneConfig::default(),
            simulate: SimulateConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let location = e
                .span()
                .map(|span| {
                    let line = text[..span.start].matches('\n').count() + 1;
                    let column = span.start - text[..span.start].rfind('\n').map_or(0, |i| i + 1) + 1;
                    Location::Line { line, column }
                })
                .unwrap_or(Location::File);
            Error::format(path, location, e.message())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path)
    }

    /// Propagates the top-level seed and checks every section.
    pub fn resolve(mut self) -> Result<Self> {
        if let Some(seed) = self.seed {
            // TOML integers are signed 64-bit
            if i64::try_from(seed).is_err() {
                return Err(Error::Invalid(format!("seed {seed} exceeds {}", i64::MAX)));
            }
            self.noise.seed = seed;
            self.process.seed = seed;
            self.scene.seed = seed;
        }
        self.eval.validate()?;
        self.noise.validate()?;
        self.process.validate()?;
        if self.scene.scenes == 0 || self.scene.parts_per_scene == 0 {
            return Err(Error::Invalid("scene.scenes and scene.parts_per_scene must be positive".into()));
        }
        if self.simulate.replications == 0 {
            return Err(Error::Invalid("simulate.replications must be positive".into()));
        }
        Ok(self)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Invalid(format!("cannot serialize config: {e}")))
    }
}
