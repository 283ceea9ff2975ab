//! Ground-truth instances, pose estimates and their grouping into samples.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::geometry::Pose;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnnotationError {
    #[error("visibility {0} outside [0, 1]")]
    Visibility(f64),
    #[error("confidence {0} outside [0, 1]")]
    Confidence(f64),
    #[error("inference time {0} is not finite")]
    InferenceTime(f64),
}

/// One image of one scene; the unit over which precision and recall are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleKey {
    pub scene_id: u32,
    pub image_id: u32,
}

impl SampleKey {
    pub fn new(scene_id: u32, image_id: u32) -> Self {
        Self { scene_id, image_id }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GtAnnotation {
    pub scene_id: u32,
    pub image_id: u32,
    pub object_id: u32,
    pub pose: Pose,
    /// Visible fraction of the instance in `[0, 1]`.
    pub visibility: f64,
}

impl GtAnnotation {
    pub fn new(scene_id: u32, image_id: u32, object_id: u32, pose: Pose, visibility: f64) -> Result<Self, AnnotationError> {
        if !(0.0..=1.0).contains(&visibility) {
            return Err(AnnotationError::Visibility(visibility));
        }
        Ok(Self { scene_id, image_id, object_id, pose, visibility })
    }

    pub fn key(&self) -> SampleKey {
        SampleKey::new(self.scene_id, self.image_id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub scene_id: u32,
    pub image_id: u32,
    pub object_id: u32,
    pub pose: Pose,
    /// Estimator-supplied score in `[0, 1]`; 1.0 for estimators without one.
    pub confidence: f64,
    /// Seconds.
    pub inference_time: f64,
}

impl Estimate {
    pub fn new(
        scene_id: u32,
        image_id: u32,
        object_id: u32,
        pose: Pose,
        confidence: f64,
        inference_time: f64,
    ) -> Result<Self, AnnotationError> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(AnnotationError::Confidence(confidence));
        }
        if !inference_time.is_finite() {
            return Err(AnnotationError::InferenceTime(inference_time));
        }
        Ok(Self { scene_id, image_id, object_id, pose, confidence, inference_time })
    }

    pub fn key(&self) -> SampleKey {
        SampleKey::new(self.scene_id, self.image_id)
    }
}

/// The instances of one sample, each list in input order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Sample {
    pub gts: Vec<GtAnnotation>,
    pub estimates: Vec<Estimate>,
}

/// Groups annotations and estimates by `(scene_id, image_id)`.
///
/// Every key that occurs in either list yields a sample, so an image with
/// estimates but no ground truth is still scored.
pub fn group_samples(gts: &[GtAnnotation], estimates: &[Estimate]) -> BTreeMap<SampleKey, Sample> {
    let mut samples: BTreeMap<SampleKey, Sample> = BTreeMap::new();
    for gt in gts {
        samples.entry(gt.key()).or_default().gts.push(gt.clone());
    }
    for est in estimates {
        samples.entry(est.key()).or_default().estimates.push(est.clone());
    }
    samples
}
