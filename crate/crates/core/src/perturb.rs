//! Synthetic ground-truth scenes and noisy estimates with controlled error.
//!
//! Every random quantity for one part comes from that part's own ChaCha8
//! stream and the number of draws per part is fixed, so changing one rate
//! only changes the branch a part takes, never the numbers it sees.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Quaternion, Rotation3, UnitQuaternion, Vector3};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::annotation::{Estimate, GtAnnotation};
use crate::geometry::{compute_mde, ModelSet, ObjectModel, Pose};
use crate::metrics::DEFAULT_ERROR_THRESHOLD_MM;
use crate::seed::stream_rng;

/// Camera-to-part distance range of generated scenes.
pub const MIN_CAMERA_DISTANCE_MM: f64 = 300.0;
pub const MAX_CAMERA_DISTANCE_MM: f64 = 800.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PerturbError {
    #[error("invalid noise model: {0}")]
    Noise(&'static str),
    #[error("invalid scene layout: {0}")]
    Layout(&'static str),
    #[error("scene needs at least one part")]
    NoParts,
    #[error("{requested} parts exceed the container grid capacity of {capacity}")]
    GridCapacity { requested: usize, capacity: usize },
    #[error("no model loaded for object id {0}")]
    MissingModel(u32),
}

/// Maps a realized MDE to an estimator confidence.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum ConfidenceModel {
    /// `exp(−MDE / scale_mm)`: higher error, lower confidence.
    ExpDecay { scale_mm: f64 },
    /// Uniform random confidence, unrelated to the error.
    Miscalibrated,
    /// Fixed score, as for estimators that report none.
    Constant { value: f64 },
}

impl Default for ConfidenceModel {
    fn default() -> Self {
        Self::ExpDecay { scale_mm: DEFAULT_ERROR_THRESHOLD_MM }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct NoiseModel {
    /// Scale of the half-normal rotation angle about a uniformly random axis.
    pub rotation_sigma_deg: f64,
    /// Isotropic per-axis normal translation noise.
    pub translation_sigma_mm: f64,
    /// Systematic offset added to the camera-frame z translation.
    pub z_bias_mm: f64,
    /// Probability that an estimate is replaced by a random pose in the scene volume.
    pub outlier_rate: f64,
    /// Probability that a part yields no estimate.
    pub miss_rate: f64,
    pub confidence: ConfidenceModel,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            rotation_sigma_deg: 0.0,
            translation_sigma_mm: 0.0,
            z_bias_mm: 0.0,
            outlier_rate: 0.0,
            miss_rate: 0.0,
            confidence: ConfidenceModel::default(),
            seed: 0,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<(), PerturbError> {
        let non_negative = |v: f64| v.is_finite() && v >= 0.0;
        if !non_negative(self.rotation_sigma_deg) {
            return Err(PerturbError::Noise("rotation_sigma_deg must be finite and >= 0"));
        }
        if !non_negative(self.translation_sigma_mm) {
            return Err(PerturbError::Noise("translation_sigma_mm must be finite and >= 0"));
        }
        if !self.z_bias_mm.is_finite() {
            return Err(PerturbError::Noise("z_bias_mm must be finite"));
        }
        if !(0.0..=1.0).contains(&self.outlier_rate) {
            return Err(PerturbError::Noise("outlier_rate must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.miss_rate) {
            return Err(PerturbError::Noise("miss_rate must lie in [0, 1]"));
        }
        match self.confidence {
            ConfidenceModel::ExpDecay { scale_mm } if !(scale_mm.is_finite() && scale_mm > 0.0) => {
                Err(PerturbError::Noise("confidence scale_mm must be positive"))
            }
            ConfidenceModel::Constant { value } if !(0.0..=1.0).contains(&value) => {
                Err(PerturbError::Noise("constant confidence must lie in [0, 1]"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum SceneLayout {
    /// Upright parts in a regular grid on the container floor, all at the
    /// same camera distance; the grid pitch is the model diameter plus `gap_mm`.
    ContainerGrid { columns: usize, rows: usize, gap_mm: f64 },
    /// Independently dropped parts with uniform random orientation.
    /// A part is dimmed by `occlusion_factor` for each closer part whose
    /// footprint overlaps its own.
    RandomDrop { half_extent_mm: f64, occlusion_factor: f64 },
}

impl Default for SceneLayout {
    fn default() -> Self {
        Self::ContainerGrid { columns: 4, rows: 4, gap_mm: 10.0 }
    }
}

impl SceneLayout {
    pub fn capacity(&self) -> Option<usize> {
        match *self {
            Self::ContainerGrid { columns, rows, .. } => Some(columns * rows),
            Self::RandomDrop { .. } => None,
        }
    }

    fn validate(&self) -> Result<(), PerturbError> {
        match *self {
            Self::ContainerGrid { columns, rows, gap_mm } => {
                if columns == 0 || rows == 0 {
                    return Err(PerturbError::Layout("grid needs at least one row and column"));
                }
                if !(gap_mm.is_finite() && gap_mm >= 0.0) {
                    return Err(PerturbError::Layout("gap_mm must be finite and >= 0"));
                }
            }
            Self::RandomDrop { half_extent_mm, occlusion_factor } => {
                if !(half_extent_mm.is_finite() && half_extent_mm >= 0.0) {
                    return Err(PerturbError::Layout("half_extent_mm must be finite and >= 0"));
                }
                if !(0.0..=1.0).contains(&occlusion_factor) {
                    return Err(PerturbError::Layout("occlusion_factor must lie in [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

/// Ground-truth poses for one generated scene (image 0 of `scene_id`).
pub fn sample_scene(
    layout: &SceneLayout,
    n_parts: usize,
    model: &ObjectModel,
    scene_id: u32,
    seed: u64,
) -> Result<Vec<GtAnnotation>, PerturbError> {
    layout.validate()?;
    if n_parts == 0 {
        return Err(PerturbError::NoParts);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let placements: Vec<(Pose, f64)> = match *layout {
        SceneLayout::ContainerGrid { columns, rows, gap_mm } => {
            let capacity = columns * rows;
            if n_parts > capacity {
                return Err(PerturbError::GridCapacity { requested: n_parts, capacity });
            }
            let distance = rng.random_range(MIN_CAMERA_DISTANCE_MM..=MAX_CAMERA_DISTANCE_MM);
            let pitch = model.diameter() + gap_mm;
            let mut slots: Vec<usize> = (0..capacity).collect();
            slots.shuffle(&mut rng);
            let flip = Rotation3::from_axis_angle(&Vector3::x_axis(), PI);
            slots[..n_parts]
                .iter()
                .map(|&slot| {
                    let (col, row) = ((slot % columns) as f64, (slot / columns) as f64);
                    let x = (col - (columns as f64 - 1.0) / 2.0) * pitch;
                    let y = (row - (rows as f64 - 1.0) / 2.0) * pitch;
                    let yaw = rng.random_range(0.0..TAU);
                    let rotation = Rotation3::from_axis_angle(&Vector3::z_axis(), yaw) * flip;
                    (Pose::from_parts_unchecked(rotation.into_inner(), Vector3::new(x, y, distance)), 1.0)
                })
                .collect()
        }
        SceneLayout::RandomDrop { half_extent_mm, occlusion_factor } => {
            let poses: Vec<Pose> = (0..n_parts)
                .map(|_| {
                    let x = rng.random_range(-half_extent_mm..=half_extent_mm);
                    let y = rng.random_range(-half_extent_mm..=half_extent_mm);
                    let z = rng.random_range(MIN_CAMERA_DISTANCE_MM..=MAX_CAMERA_DISTANCE_MM);
                    let u = [rng.random(), rng.random(), rng.random()];
                    Pose::from_parts_unchecked(uniform_rotation(u), Vector3::new(x, y, z))
                })
                .collect();
            let footprint = model.diameter();
            poses
                .iter()
                .map(|p| {
                    let t = p.translation();
                    let occluders = poses
                        .iter()
                        .filter(|q| {
                            let s = q.translation();
                            s.z < t.z && libm::hypot(s.x - t.x, s.y - t.y) < footprint
                        })
                        .count();
                    (*p, libm::pow(occlusion_factor, occluders as f64))
                })
                .collect()
        }
    };
    Ok(placements
        .into_iter()
        .map(|(pose, visibility)| GtAnnotation {
            scene_id,
            image_id: 0,
            object_id: model.object_id(),
            pose,
            visibility,
        })
        .collect())
}

/// Uniformly distributed rotation from three uniforms in `[0, 1)` (Shoemake).
fn uniform_rotation(u: [f64; 3]) -> Matrix3<f64> {
    let (a, b) = (libm::sqrt(1.0 - u[0]), libm::sqrt(u[0]));
    let (t1, t2) = (TAU * u[1], TAU * u[2]);
    let q = Quaternion::new(b * libm::cos(t2), a * libm::sin(t1), a * libm::cos(t1), b * libm::sin(t2));
    UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner()
}

/// Axis-aligned region outliers are drawn from: the footprint of a scene's
/// parts grown by the largest model diameter, over the full camera range.
#[derive(Debug, Clone, Copy)]
struct SceneVolume {
    min: Vector3<f64>,
    max: Vector3<f64>,
}

impl SceneVolume {
    fn sample(&self, u: [f64; 3]) -> Vector3<f64> {
        Vector3::from_fn(|i, _| self.min[i] + u[i] * (self.max[i] - self.min[i]))
    }
}

fn scene_volumes(gts: &[GtAnnotation], models: &ModelSet) -> Result<BTreeMap<u32, SceneVolume>, PerturbError> {
    let mut volumes: BTreeMap<u32, (SceneVolume, f64)> = BTreeMap::new();
    for gt in gts {
        let diameter = models.get(gt.object_id).ok_or(PerturbError::MissingModel(gt.object_id))?.diameter();
        let t = gt.pose.translation();
        let entry = volumes.entry(gt.scene_id).or_insert((
            SceneVolume {
                min: Vector3::new(t.x, t.y, MIN_CAMERA_DISTANCE_MM),
                max: Vector3::new(t.x, t.y, MAX_CAMERA_DISTANCE_MM),
            },
            diameter,
        ));
        for i in 0..2 {
            entry.0.min[i] = entry.0.min[i].min(t[i]);
            entry.0.max[i] = entry.0.max[i].max(t[i]);
        }
        entry.1 = entry.1.max(diameter);
    }
    Ok(volumes
        .into_iter()
        .map(|(scene, (mut v, grow))| {
            for i in 0..2 {
                v.min[i] -= grow;
                v.max[i] += grow;
            }
            (scene, v)
        })
        .collect())
}

/// The fixed set of draws one part consumes, whichever branch it takes.
struct PartDraws {
    miss: f64,
    outlier: f64,
    axis: Vector3<f64>,
    angle_unit: f64,
    translation_unit: Vector3<f64>,
    outlier_position: [f64; 3],
    outlier_rotation: [f64; 3],
    confidence: f64,
}

impl PartDraws {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        let mut normal = || -> f64 { rng.sample(StandardNormal) };
        let axis = Vector3::new(normal(), normal(), normal());
        let angle_unit = normal();
        let translation_unit = Vector3::new(normal(), normal(), normal());
        Self {
            axis,
            angle_unit,
            translation_unit,
            miss: rng.random(),
            outlier: rng.random(),
            outlier_position: [rng.random(), rng.random(), rng.random()],
            outlier_rotation: [rng.random(), rng.random(), rng.random()],
            confidence: rng.random(),
        }
    }
}

/// An estimate together with the index of the ground truth it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedEstimate {
    pub source: usize,
    pub estimate: Estimate,
}

/// Noisy estimates for `gts`; part `i` draws from stream `i`.
pub fn perturb(gts: &[GtAnnotation], models: &ModelSet, noise: &NoiseModel) -> Result<Vec<Estimate>, PerturbError> {
    let streams: Vec<u64> = (0..gts.len() as u64).collect();
    Ok(perturb_tracked(gts, &streams, models, noise)?
        .into_iter()
        .map(|t| t.estimate)
        .collect())
}

/// Like [`perturb`], with an explicit stream id per ground truth so a part
/// keeps its random stream when other parts are added or removed.
pub fn perturb_tracked(
    gts: &[GtAnnotation],
    streams: &[u64],
    models: &ModelSet,
    noise: &NoiseModel,
) -> Result<Vec<TrackedEstimate>, PerturbError> {
    noise.validate()?;
    assert_eq!(gts.len(), streams.len(), "one stream id per ground truth");
    let volumes = scene_volumes(gts, models)?;
    let rotation_sigma = noise.rotation_sigma_deg.to_radians();
    let mut out = Vec::with_capacity(gts.len());
    for (source, (gt, &stream)) in gts.iter().zip(streams).enumerate() {
        let model = models.get(gt.object_id).ok_or(PerturbError::MissingModel(gt.object_id))?;
        let d = PartDraws::draw(&mut stream_rng(noise.seed, stream));
        if d.miss < noise.miss_rate {
            continue;
        }
        let pose = if d.outlier < noise.outlier_rate {
            let volume = volumes[&gt.scene_id];
            Pose::from_parts_unchecked(uniform_rotation(d.outlier_rotation), volume.sample(d.outlier_position))
        } else {
            let angle = d.angle_unit.abs() * rotation_sigma;
            let delta = match nalgebra::Unit::try_new(d.axis, 0.0) {
                Some(axis) if angle > 0.0 => Rotation3::from_axis_angle(&axis, angle).into_inner(),
                _ => Matrix3::identity(),
            };
            let mut offset = d.translation_unit * noise.translation_sigma_mm;
            offset.z += noise.z_bias_mm;
            Pose::from_parts_unchecked(delta * gt.pose.rotation(), gt.pose.translation() + offset)
        };
        let confidence = match noise.confidence {
            ConfidenceModel::ExpDecay { scale_mm } => {
                libm::exp(-compute_mde(&gt.pose, &pose, model) / scale_mm).clamp(0.0, 1.0)
            }
            ConfidenceModel::Miscalibrated => d.confidence,
            ConfidenceModel::Constant { value } => value,
        };
        out.push(TrackedEstimate {
            source,
            estimate: Estimate {
                scene_id: gt.scene_id,
                image_id: gt.image_id,
                object_id: gt.object_id,
                pose,
                confidence,
                inference_time: 0.0,
            },
        });
    }
    Ok(out)
}
