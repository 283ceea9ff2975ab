//! Monte-Carlo model of the pick-and-place sequencing experiment.
//!
//! Each scene is a container of parts worked on until it is empty or the
//! time budget runs out. Every attempt takes a fresh set of estimates,
//! picks one target and classifies the grasp:
//!
//! * MDE above the crash threshold: `FpCrash`, the part is removed and
//!   counts as FN (a part can crash at most once);
//! * MDE within the grasp tolerance and the in-plane offset within the slot
//!   margin: `Tp`, the part is placed;
//! * anything else: `FpMisplace`, the part stays and may be retried;
//! * no estimate above the confidence threshold: `Skipped`.
//!
//! Parts left at the end are FN. AP/AR are computed per scene and averaged.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::annotation::{group_samples, Estimate, GtAnnotation};
use crate::geometry::{compute_mde, max_planar_offset, ModelSet, ObjectModel, Pose};
use crate::metrics::DEFAULT_ERROR_THRESHOLD_MM;
use crate::perturb::{perturb_tracked, sample_scene, NoiseModel, PerturbError, SceneLayout};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProcessError {
    #[error("invalid process config: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error("no model loaded for object id {0}")]
    MissingModel(u32),
    #[error("replay needs {required} ground-truth instances ({scenes} scenes x {parts} parts), found {available}")]
    InsufficientSamples { required: usize, available: usize, scenes: usize, parts: usize },
}

/// How the robot chooses among the estimates of one acquisition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum TargetPolicy {
    /// Highest confidence, ties to the estimate nearest the camera.
    #[default]
    HighestConfidence,
    /// Nearest the camera, ties to the higher confidence.
    NearestCamera,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct ProcessConfig {
    pub scenes: usize,
    pub parts_per_scene: usize,
    pub time_budget_s: f64,
    pub attempt_time_s: f64,
    /// Extra slot size in x and y beyond the part's footprint.
    pub slot_margin_mm: f64,
    /// MDE up to which a grasp succeeds.
    pub grasp_tolerance_mm: f64,
    /// MDE above which a grasp crashes.
    pub crash_threshold_mm: f64,
    pub confidence_threshold: f64,
    pub policy: TargetPolicy,
    pub layout: SceneLayout,
    pub seed: u64,
}

impl Default for ProcessConfig {
    fn default() -> Self {
        Self {
            scenes: 5,
            parts_per_scene: 8,
            time_budget_s: 160.0,
            attempt_time_s: 20.0,
            slot_margin_mm: 20.0,
            grasp_tolerance_mm: DEFAULT_ERROR_THRESHOLD_MM,
            crash_threshold_mm: 2.0 * DEFAULT_ERROR_THRESHOLD_MM,
            confidence_threshold: 0.0,
            policy: TargetPolicy::HighestConfidence,
            layout: SceneLayout::default(),
            seed: 0,
        }
    }
}

impl ProcessConfig {
    pub fn validate(&self) -> Result<(), ProcessError> {
        if self.scenes == 0 || self.parts_per_scene == 0 {
            return Err(ProcessError::Config("scenes and parts_per_scene must be at least 1"));
        }
        if !(self.attempt_time_s.is_finite() && self.attempt_time_s > 0.0) {
            return Err(ProcessError::Config("attempt_time_s must be positive"));
        }
        if !(self.time_budget_s.is_finite() && self.time_budget_s >= 0.0) {
            return Err(ProcessError::Config("time_budget_s must be finite and >= 0"));
        }
        if !(self.slot_margin_mm.is_finite() && self.slot_margin_mm >= 0.0) {
            return Err(ProcessError::Config("slot_margin_mm must be finite and >= 0"));
        }
        if !(self.grasp_tolerance_mm.is_finite() && self.grasp_tolerance_mm > 0.0) {
            return Err(ProcessError::Config("grasp_tolerance_mm must be positive"));
        }
        if !(self.crash_threshold_mm.is_finite() && self.crash_threshold_mm > self.grasp_tolerance_mm) {
            return Err(ProcessError::Config("crash_threshold_mm must exceed grasp_tolerance_mm"));
        }
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            return Err(ProcessError::Config("confidence_threshold must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Attempts that fit in the time budget.
    pub fn max_attempts(&self) -> usize {
        // tolerate rounding in budgets like 0.3 / 0.1
        libm::floor(self.time_budget_s / self.attempt_time_s + 1e-9) as usize
    }

    /// Config of replication `index`: same parameters, seed split from this one.
    pub fn replication(&self, index: u64) -> Self {
        Self { seed: derive_seed(self.seed, index), ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "snake_case"))]
pub enum AttemptVerdict {
    Tp,
    FpCrash,
    FpMisplace,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Attempt {
    /// Scene clock at the start of the attempt.
    pub start_s: f64,
    /// Target part (index within the scene), absent when skipped.
    pub part: Option<usize>,
    pub verdict: AttemptVerdict,
    pub mde_mm: Option<f64>,
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProcessCounts {
    pub tp: usize,
    pub fp: usize,
    #[cfg_attr(feature = "serde", serde(rename = "fn"))]
    pub fn_: usize,
}

impl ProcessCounts {
    fn add(self, other: Self) -> Self {
        Self { tp: self.tp + other.tp, fp: self.fp + other.fp, fn_: self.fn_ + other.fn_ }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SceneOutcome {
    pub scene: usize,
    pub attempts: Vec<Attempt>,
    pub crashed: Vec<usize>,
    pub counts: ProcessCounts,
    pub ap: f64,
    pub ar: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProcessOutcome {
    pub scenes: Vec<SceneOutcome>,
    pub counts: ProcessCounts,
    pub ap: f64,
    pub ar: f64,
}

impl ProcessOutcome {
    fn from_scenes(scenes: Vec<SceneOutcome>) -> Self {
        let counts = scenes.iter().fold(ProcessCounts::default(), |acc, s| acc.add(s.counts));
        let n = scenes.len() as f64;
        let ap = scenes.iter().map(|s| s.ap).sum::<f64>() / n;
        let ar = scenes.iter().map(|s| s.ar).sum::<f64>() / n;
        Self { scenes, counts, ap, ar }
    }

    pub fn attempts(&self) -> usize {
        self.scenes.iter().map(|s| s.attempts.len()).sum()
    }
}

/// One estimate offered to the robot, already resolved against a part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot {
    pub part: usize,
    pub mde_mm: f64,
    pub planar_offset_mm: f64,
    pub confidence: f64,
    pub camera_distance_mm: f64,
}

impl Shot {
    fn resolve(part: usize, gt: &Pose, est: &Pose, confidence: f64, model: &ObjectModel) -> Self {
        Self {
            part,
            mde_mm: compute_mde(gt, est, model),
            planar_offset_mm: max_planar_offset(gt, est, model),
            confidence,
            camera_distance_mm: est.translation().norm(),
        }
    }
}

fn policy_order(policy: TargetPolicy, a: &Shot, b: &Shot) -> Ordering {
    let by_conf = b.confidence.total_cmp(&a.confidence);
    let by_dist = a.camera_distance_mm.total_cmp(&b.camera_distance_mm);
    match policy {
        TargetPolicy::HighestConfidence => by_conf.then(by_dist),
        TargetPolicy::NearestCamera => by_dist.then(by_conf),
    }
}

/// Runs the attempt loop of one scene; `acquire(k, remaining)` supplies the
/// shots of attempt `k` for the parts still in the container.
fn run_scene<F>(cfg: &ProcessConfig, scene: usize, parts: usize, mut acquire: F) -> Result<SceneOutcome, ProcessError>
where
    F: FnMut(usize, &[usize]) -> Result<Vec<Shot>, ProcessError>,
{
    let mut remaining: Vec<usize> = (0..parts).collect();
    let mut attempts = Vec::new();
    let mut crashed = Vec::new();
    let mut counts = ProcessCounts::default();
    for k in 0..cfg.max_attempts() {
        if remaining.is_empty() {
            break;
        }
        let start_s = k as f64 * cfg.attempt_time_s;
        let chosen = acquire(k, &remaining)?
            .into_iter()
            .filter(|s| s.confidence >= cfg.confidence_threshold)
            .min_by(|a, b| policy_order(cfg.policy, a, b));
        let Some(shot) = chosen else {
            attempts.push(Attempt { start_s, part: None, verdict: AttemptVerdict::Skipped, mde_mm: None, confidence: None });
            continue;
        };
        let verdict = if shot.mde_mm > cfg.crash_threshold_mm {
            AttemptVerdict::FpCrash
        } else if shot.mde_mm <= cfg.grasp_tolerance_mm && shot.planar_offset_mm <= cfg.slot_margin_mm {
            AttemptVerdict::Tp
        } else {
            AttemptVerdict::FpMisplace
        };
        match verdict {
            AttemptVerdict::Tp => {
                counts.tp += 1;
                remaining.retain(|&p| p != shot.part);
            }
            AttemptVerdict::FpCrash => {
                counts.fp += 1;
                crashed.push(shot.part);
                remaining.retain(|&p| p != shot.part);
            }
            AttemptVerdict::FpMisplace => counts.fp += 1,
            AttemptVerdict::Skipped => unreachable!(),
        }
        attempts.push(Attempt {
            start_s,
            part: Some(shot.part),
            verdict,
            mde_mm: Some(shot.mde_mm),
            confidence: Some(shot.confidence),
        });
    }
    counts.fn_ = parts - counts.tp;
    let ap = if counts.tp + counts.fp == 0 { 1.0 } else { counts.tp as f64 / (counts.tp + counts.fp) as f64 };
    let ar = counts.tp as f64 / parts as f64;
    Ok(SceneOutcome { scene, attempts, crashed, counts, ap, ar })
}

/// Simulates the process with estimates drawn from `noise` on generated scenes.
///
/// Scene `s` uses seed `derive_seed(cfg.seed, s)`; its layout is drawn with
/// child seed 0 and attempt `k` perturbs with child seed `k + 1`. The noise
/// model's own seed is not used.
pub fn simulate(cfg: &ProcessConfig, model: &ObjectModel, noise: &NoiseModel) -> Result<ProcessOutcome, ProcessError> {
    cfg.validate()?;
    noise.validate()?;
    let models = ModelSet::from_models([model.clone()]).expect("single model");
    let scenes = (0..cfg.scenes)
        .map(|s| {
            let scene_seed = derive_seed(cfg.seed, s as u64);
            let gts = sample_scene(&cfg.layout, cfg.parts_per_scene, model, s as u32, derive_seed(scene_seed, 0))?;
            run_scene(cfg, s, gts.len(), |k, remaining| {
                let subset: Vec<GtAnnotation> = remaining.iter().map(|&p| gts[p].clone()).collect();
                let streams: Vec<u64> = remaining.iter().map(|&p| p as u64).collect();
                let attempt_noise = NoiseModel { seed: derive_seed(scene_seed, k as u64 + 1), ..*noise };
                let estimates = perturb_tracked(&subset, &streams, &models, &attempt_noise)?;
                Ok(estimates
                    .iter()
                    .map(|t| {
                        let est = &t.estimate;
                        // the grasp acts on whichever remaining part the estimate is closest to
                        let target = remaining
                            .iter()
                            .map(|&p| (p, compute_mde(&gts[p].pose, &est.pose, model)))
                            .min_by(|a, b| a.1.total_cmp(&b.1))
                            .map(|(p, _)| p)
                            .expect("remaining is non-empty");
                        Shot::resolve(target, &gts[target].pose, &est.pose, est.confidence, model)
                    })
                    .collect())
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProcessOutcome::from_scenes(scenes))
}

/// `n` independent replications of [`simulate`], replication `r` using
/// [`ProcessConfig::replication`]`(r)`.
pub fn simulate_replications(
    cfg: &ProcessConfig,
    model: &ObjectModel,
    noise: &NoiseModel,
    n: usize,
) -> Result<Vec<ProcessOutcome>, ProcessError> {
    (0..n as u64).map(|r| simulate(&cfg.replication(r), model, noise)).collect()
}

/// Replays recorded estimates through the process rules.
///
/// Ground-truth instances are taken in `(scene_id, image_id, input)` order;
/// the first `scenes × parts_per_scene` of them form the simulated scenes,
/// `parts_per_scene` at a time. Each recorded estimate is attached to its
/// closest same-object instance in its own image. At every attempt each
/// remaining part offers its next recorded estimate, cycling through its
/// list in input order; parts without any recorded estimate offer none.
pub fn simulate_from_estimates(
    cfg: &ProcessConfig,
    gts: &[GtAnnotation],
    estimates: &[Estimate],
    models: &ModelSet,
) -> Result<ProcessOutcome, ProcessError> {
    cfg.validate()?;
    let mut instances: Vec<Vec<Shot>> = Vec::new();
    for sample in group_samples(gts, estimates).into_values() {
        let base = instances.len();
        let mut shots: BTreeMap<usize, Vec<Shot>> = BTreeMap::new();
        for est in &sample.estimates {
            let model = models.get(est.object_id).ok_or(ProcessError::MissingModel(est.object_id))?;
            let closest = sample
                .gts
                .iter()
                .enumerate()
                .filter(|(_, g)| g.object_id == est.object_id)
                .map(|(i, g)| (i, compute_mde(&g.pose, &est.pose, model)))
                .fold(None::<(usize, f64)>, |best, (i, d)| match best {
                    Some((_, b)) if b <= d => best,
                    _ => Some((i, d)),
                });
            if let Some((i, _)) = closest {
                let shot = Shot::resolve(base + i, &sample.gts[i].pose, &est.pose, est.confidence, model);
                shots.entry(i).or_default().push(shot);
            }
        }
        for i in 0..sample.gts.len() {
            instances.push(shots.remove(&i).unwrap_or_default());
        }
    }
    let required = cfg.scenes * cfg.parts_per_scene;
    if instances.len() < required {
        return Err(ProcessError::InsufficientSamples {
            required,
            available: instances.len(),
            scenes: cfg.scenes,
            parts: cfg.parts_per_scene,
        });
    }
    let scenes = instances[..required]
        .chunks(cfg.parts_per_scene)
        .enumerate()
        .map(|(s, parts)| {
            let mut cursors = alloc::vec![0usize; parts.len()];
            run_scene(cfg, s, parts.len(), |_, remaining| {
                Ok(remaining
                    .iter()
                    .filter(|&&p| !parts[p].is_empty())
                    .map(|&p| {
                        let recorded = &parts[p];
                        let shot = recorded[cursors[p] % recorded.len()];
                        cursors[p] += 1;
                        Shot { part: p, ..shot }
                    })
                    .collect())
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProcessOutcome::from_scenes(scenes))
}
