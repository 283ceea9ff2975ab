//! Per-sample matching of estimates to ground truth and the scores derived
//! from it: average precision/recall, confidence sweeps, error
//! distributions and per-axis error statistics.
//!
//! Matching follows one rule set:
//!
//! * estimates below the confidence threshold are dropped first;
//! * each remaining estimate is compared (by MDE) against every ground-truth
//!   instance of the same object id in its sample and assigned to the
//!   closest one; ground truth may absorb any number of estimates;
//! * estimates are processed in increasing MDE order, ties broken by higher
//!   confidence and then input order;
//! * an assignment is a TP when its MDE is at most the error threshold,
//!   otherwise a FP; estimates without a same-object instance are FP;
//! * ground truth without a TP and with visibility at or above the
//!   visibility threshold is a FN.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::annotation::{group_samples, Estimate, GtAnnotation, Sample, SampleKey};
use crate::geometry::{compute_axis_components, compute_mde, ModelSet, Pose};

/// Default pose-error threshold, 1.5 cm.
pub const DEFAULT_ERROR_THRESHOLD_MM: f64 = 15.0;
pub const DEFAULT_VISIBILITY_THRESHOLD: f64 = 0.85;
/// Sweep grid `{0.00, 0.01, …, 0.99}`.
pub const DEFAULT_SWEEP_RESOLUTION: usize = 100;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("invalid evaluation config: {0}")]
    Config(&'static str),
    #[error("no model loaded for object id {object_id} (estimate in scene {scene_id}, image {image_id})")]
    MissingModel { object_id: u32, scene_id: u32, image_id: u32 },
    #[error("no samples")]
    NoSamples,
}

/// How samples with a zero precision or recall denominator enter the mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum EmptySamplePolicy {
    /// Score the sample as 1 (no action taken, nothing required).
    #[default]
    One,
    /// Leave the sample out of that mean.
    Skip,
}

/// Which matches feed the per-axis error statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum ComponentScope {
    #[default]
    AllMatches,
    TruePositives,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct EvalConfig {
    pub error_threshold_mm: f64,
    pub visibility_threshold: f64,
    pub confidence_threshold: f64,
    pub sweep_resolution: usize,
    pub empty_sample_policy: EmptySamplePolicy,
    pub component_scope: ComponentScope,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            error_threshold_mm: DEFAULT_ERROR_THRESHOLD_MM,
            visibility_threshold: DEFAULT_VISIBILITY_THRESHOLD,
            confidence_threshold: 0.0,
            sweep_resolution: DEFAULT_SWEEP_RESOLUTION,
            empty_sample_policy: EmptySamplePolicy::One,
            component_scope: ComponentScope::AllMatches,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.error_threshold_mm.is_finite() && self.error_threshold_mm > 0.0) {
            return Err(EvalError::Config("error_threshold_mm must be positive and finite"));
        }
        if !(0.0..=1.0).contains(&self.visibility_threshold) {
            return Err(EvalError::Config("visibility_threshold must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            return Err(EvalError::Config("confidence_threshold must lie in [0, 1]"));
        }
        if self.sweep_resolution < 2 {
            return Err(EvalError::Config("sweep_resolution must be at least 2"));
        }
        Ok(())
    }

    pub fn with_confidence_threshold(mut self, confidence_threshold: f64) -> Self {
        self.confidence_threshold = confidence_threshold;
        self
    }

    pub fn with_error_threshold(mut self, error_threshold_mm: f64) -> Self {
        self.error_threshold_mm = error_threshold_mm;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "UPPERCASE"))]
pub enum Verdict {
    Tp,
    Fp,
}

/// One estimate assigned to its closest same-object ground truth.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MatchRecord {
    /// Index into the sample's estimate list (before confidence filtering).
    pub estimate: usize,
    /// Index into the sample's ground-truth list.
    pub gt: usize,
    pub object_id: u32,
    pub mde_mm: f64,
    pub confidence: f64,
    pub verdict: Verdict,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub gt_pose: Pose,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub est_pose: Pose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[cfg_attr(feature = "serde", serde(rename = "fn"))]
    pub fn_: usize,
}

impl Counts {
    /// `TP / (TP + FP)`, `None` when there is nothing to score.
    pub fn precision(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fp)
    }

    /// `TP / (TP + FN)`, `None` when there is nothing to score.
    pub fn recall(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SampleMatchResult {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub key: SampleKey,
    /// In processing order.
    pub matches: Vec<MatchRecord>,
    /// Estimates with no same-object ground truth in the sample; always FP.
    pub unmatched_fp: Vec<usize>,
    /// Ground-truth indices counted as FN.
    pub fn_gts: Vec<usize>,
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq)]
struct GtEntry {
    object_id: u32,
    visibility: f64,
    pose: Pose,
}

#[derive(Debug, Clone, PartialEq)]
struct Candidate {
    estimate: usize,
    object_id: u32,
    confidence: f64,
    pose: Pose,
    /// Closest same-object ground truth and its MDE.
    best: Option<(usize, f64)>,
}

/// A sample with every estimate-to-ground-truth MDE already resolved, so it
/// can be re-matched under different thresholds without touching geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedSample {
    key: SampleKey,
    gts: Vec<GtEntry>,
    candidates: Vec<Candidate>,
}

impl PreparedSample {
    pub fn new(key: SampleKey, sample: &Sample, models: &ModelSet) -> Result<Self, EvalError> {
        let gts: Vec<GtEntry> = sample
            .gts
            .iter()
            .map(|g| GtEntry { object_id: g.object_id, visibility: g.visibility, pose: g.pose })
            .collect();
        let candidates = sample
            .estimates
            .iter()
            .enumerate()
            .map(|(index, est)| {
                let model = models.get(est.object_id).ok_or(EvalError::MissingModel {
                    object_id: est.object_id,
                    scene_id: key.scene_id,
                    image_id: key.image_id,
                })?;
                let mut best: Option<(usize, f64)> = None;
                for (gi, gt) in gts.iter().enumerate().filter(|(_, g)| g.object_id == est.object_id) {
                    let mde = compute_mde(&gt.pose, &est.pose, model);
                    if best.is_none_or(|(_, b)| mde < b) {
                        best = Some((gi, mde));
                    }
                }
                Ok(Candidate {
                    estimate: index,
                    object_id: est.object_id,
                    confidence: est.confidence,
                    pose: est.pose,
                    best,
                })
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        Ok(Self { key, gts, candidates })
    }

    pub fn key(&self) -> SampleKey {
        self.key
    }

    pub fn gt_count(&self) -> usize {
        self.gts.len()
    }

    pub fn estimate_count(&self) -> usize {
        self.candidates.len()
    }

    /// Runs the matching rules under `cfg`'s thresholds.
    pub fn match_with(&self, cfg: &EvalConfig) -> SampleMatchResult {
        let passing = self
            .candidates
            .iter()
            .filter(|c| c.confidence >= cfg.confidence_threshold);
        let (mut assigned, unassigned): (Vec<&Candidate>, Vec<&Candidate>) =
            passing.partition(|c| c.best.is_some());
        assigned.sort_by(|a, b| processing_order(a, b));

        let mut has_tp = alloc::vec![false; self.gts.len()];
        let mut counts = Counts::default();
        let matches: Vec<MatchRecord> = assigned
            .into_iter()
            .map(|c| {
                let (gt, mde_mm) = c.best.expect("partitioned on best");
                let verdict = if mde_mm <= cfg.error_threshold_mm {
                    has_tp[gt] = true;
                    counts.tp += 1;
                    Verdict::Tp
                } else {
                    counts.fp += 1;
                    Verdict::Fp
                };
                MatchRecord {
                    estimate: c.estimate,
                    gt,
                    object_id: c.object_id,
                    mde_mm,
                    confidence: c.confidence,
                    verdict,
                    gt_pose: self.gts[gt].pose,
                    est_pose: c.pose,
                }
            })
            .collect();
        let unmatched_fp: Vec<usize> = unassigned.iter().map(|c| c.estimate).collect();
        counts.fp += unmatched_fp.len();

        let fn_gts: Vec<usize> = self
            .gts
            .iter()
            .enumerate()
            .filter(|(i, g)| !has_tp[*i] && g.visibility >= cfg.visibility_threshold)
            .map(|(i, _)| i)
            .collect();
        counts.fn_ = fn_gts.len();

        SampleMatchResult { key: self.key, matches, unmatched_fp, fn_gts, counts }
    }
}

fn processing_order(a: &Candidate, b: &Candidate) -> Ordering {
    let (ma, mb) = (a.best.map_or(0.0, |x| x.1), b.best.map_or(0.0, |x| x.1));
    ma.total_cmp(&mb)
        .then_with(|| b.confidence.total_cmp(&a.confidence))
        .then_with(|| a.estimate.cmp(&b.estimate))
}

/// Groups the inputs into samples and resolves all MDEs, in key order.
pub fn prepare_samples(
    gts: &[GtAnnotation],
    estimates: &[Estimate],
    models: &ModelSet,
) -> Result<Vec<PreparedSample>, EvalError> {
    group_samples(gts, estimates)
        .iter()
        .map(|(key, sample)| PreparedSample::new(*key, sample, models))
        .collect()
}

/// Matches the estimates of one sample against its ground truth.
///
/// All inputs are expected to share one `(scene_id, image_id)`; the key is
/// taken from the first ground truth (or estimate).
pub fn match_sample(
    gts: &[GtAnnotation],
    estimates: &[Estimate],
    models: &ModelSet,
    cfg: &EvalConfig,
) -> Result<SampleMatchResult, EvalError> {
    cfg.validate()?;
    let key = gts
        .first()
        .map(GtAnnotation::key)
        .or_else(|| estimates.first().map(Estimate::key))
        .unwrap_or(SampleKey::new(0, 0));
    let sample = Sample { gts: gts.to_vec(), estimates: estimates.to_vec() };
    Ok(PreparedSample::new(key, &sample, models)?.match_with(cfg))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ApAr {
    pub ap: f64,
    pub ar: f64,
}

/// Unweighted means of per-sample precision and recall.
///
/// With [`EmptySamplePolicy::Skip`], a mean over zero eligible samples is 1.
pub fn compute_ap_ar(results: &[SampleMatchResult], policy: EmptySamplePolicy) -> Result<ApAr, EvalError> {
    if results.is_empty() {
        return Err(EvalError::NoSamples);
    }
    let ap = policy_mean(results.iter().map(|r| r.counts.precision()), policy);
    let ar = policy_mean(results.iter().map(|r| r.counts.recall()), policy);
    Ok(ApAr { ap, ar })
}

fn policy_mean(values: impl Iterator<Item = Option<f64>>, policy: EmptySamplePolicy) -> f64 {
    let (sum, n) = values.fold((0.0_f64, 0usize), |(sum, n), v| match (v, policy) {
        (Some(v), _) => (sum + v, n + 1),
        (None, EmptySamplePolicy::One) => (sum + 1.0, n + 1),
        (None, EmptySamplePolicy::Skip) => (sum, n),
    });
    if n == 0 {
        1.0
    } else {
        sum / n as f64
    }
}

/// Evenly spaced thresholds on `[0, 1)`: `i / resolution` for `i < resolution`.
pub fn sweep_thresholds(resolution: usize) -> Vec<f64> {
    (0..resolution).map(|i| i as f64 / resolution as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepPoint {
    pub confidence: f64,
    pub ap: f64,
    pub ar: f64,
}

/// AP/AR at each threshold of the sweep grid, over already prepared samples.
pub fn sweep_prepared(prepared: &[PreparedSample], cfg: &EvalConfig) -> Result<Vec<SweepPoint>, EvalError> {
    cfg.validate()?;
    sweep_thresholds(cfg.sweep_resolution)
        .into_iter()
        .map(|c| {
            let at = cfg.with_confidence_threshold(c);
            let results: Vec<_> = prepared.iter().map(|p| p.match_with(&at)).collect();
            let ApAr { ap, ar } = compute_ap_ar(&results, cfg.empty_sample_policy)?;
            Ok(SweepPoint { confidence: c, ap, ar })
        })
        .collect()
}

pub fn sweep_confidence(
    gts: &[GtAnnotation],
    estimates: &[Estimate],
    models: &ModelSet,
    cfg: &EvalConfig,
) -> Result<Vec<SweepPoint>, EvalError> {
    cfg.validate()?;
    sweep_prepared(&prepare_samples(gts, estimates, models)?, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DistributionRow {
    pub scene_id: u32,
    pub image_id: u32,
    pub object_id: u32,
    pub mde_mm: f64,
    pub verdict: Verdict,
}

/// Raw MDE of every matched estimate (TP and FP), for external plotting.
pub fn export_distribution(results: &[SampleMatchResult]) -> Vec<DistributionRow> {
    results
        .iter()
        .flat_map(|r| {
            r.matches.iter().map(move |m| DistributionRow {
                scene_id: r.key.scene_id,
                image_id: r.key.image_id,
                object_id: m.object_id,
                mde_mm: m.mde_mm,
                verdict: m.verdict,
            })
        })
        .collect()
}

/// Per-axis mean and sample standard deviation of the ADD error components.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ComponentStats {
    pub count: usize,
    pub mean_mm: [f64; 3],
    pub std_mm: [f64; 3],
    /// False when fewer than two matches were available; `std_mm` is then 0.
    pub std_defined: bool,
}

pub fn component_statistics(
    results: &[SampleMatchResult],
    models: &ModelSet,
    scope: ComponentScope,
) -> Result<ComponentStats, EvalError> {
    let mut components = Vec::new();
    for r in results {
        for m in r.matches.iter().filter(|m| scope == ComponentScope::AllMatches || m.verdict == Verdict::Tp) {
            let model = models.get(m.object_id).ok_or(EvalError::MissingModel {
                object_id: m.object_id,
                scene_id: r.key.scene_id,
                image_id: r.key.image_id,
            })?;
            components.push(compute_axis_components(&m.gt_pose, &m.est_pose, model));
        }
    }
    Ok(summarize_components(&components))
}

fn summarize_components(components: &[[f64; 3]]) -> ComponentStats {
    let count = components.len();
    let mut mean_mm = [0.0; 3];
    let mut std_mm = [0.0; 3];
    if count > 0 {
        for axis in 0..3 {
            mean_mm[axis] = components.iter().map(|c| c[axis]).sum::<f64>() / count as f64;
        }
    }
    let std_defined = count >= 2;
    if std_defined {
        for axis in 0..3 {
            let ss: f64 = components.iter().map(|c| (c[axis] - mean_mm[axis]) * (c[axis] - mean_mm[axis])).sum();
            std_mm[axis] = libm::sqrt(ss / (count - 1) as f64);
        }
    }
    ComponentStats { count, mean_mm, std_mm, std_defined }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EvalReport {
    pub config: EvalConfig,
    pub samples: usize,
    pub ap: f64,
    pub ar: f64,
    pub per_sample: Vec<SampleMatchResult>,
    pub distribution: Vec<DistributionRow>,
    pub components: ComponentStats,
    pub sweep: Vec<SweepPoint>,
}

impl EvalReport {
    /// Builds the report from prepared samples; their order does not matter.
    pub fn from_prepared(prepared: &[PreparedSample], models: &ModelSet, cfg: &EvalConfig) -> Result<Self, EvalError> {
        cfg.validate()?;
        let mut ordered: Vec<&PreparedSample> = prepared.iter().collect();
        ordered.sort_by_key(|p| p.key);
        let per_sample: Vec<SampleMatchResult> = ordered.iter().map(|p| p.match_with(cfg)).collect();
        let ApAr { ap, ar } = compute_ap_ar(&per_sample, cfg.empty_sample_policy)?;
        let owned: Vec<PreparedSample> = ordered.into_iter().cloned().collect();
        let sweep = sweep_prepared(&owned, cfg)?;
        Ok(Self {
            config: *cfg,
            samples: per_sample.len(),
            ap,
            ar,
            distribution: export_distribution(&per_sample),
            components: component_statistics(&per_sample, models, cfg.component_scope)?,
            per_sample,
            sweep,
        })
    }

    pub fn totals(&self) -> Counts {
        self.per_sample.iter().fold(Counts::default(), |acc, r| Counts {
            tp: acc.tp + r.counts.tp,
            fp: acc.fp + r.counts.fp,
            fn_: acc.fn_ + r.counts.fn_,
        })
    }
}

/// Full evaluation: matching, AP/AR, distribution, component statistics and sweep.
pub fn evaluate(
    gts: &[GtAnnotation],
    estimates: &[Estimate],
    models: &ModelSet,
    cfg: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    cfg.validate()?;
    let prepared = prepare_samples(gts, estimates, models)?;
    if prepared.is_empty() {
        return Err(EvalError::NoSamples);
    }
    EvalReport::from_prepared(&prepared, models, cfg)
}
