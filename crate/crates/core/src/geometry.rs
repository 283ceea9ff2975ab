//! Rigid poses, object models and the pose-error functions built on them.
//!
//! All lengths are millimeters. A pose maps model coordinates into the
//! camera frame as `R·v + t`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};

/// Absolute tolerance applied to every entry of `RᵀR − I` and to `det(R) − 1`.
pub const ROTATION_TOLERANCE: f64 = 1e-6;

/// Minimum number of vertices an [`ObjectModel`] must carry.
pub const MIN_MODEL_VERTICES: usize = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("{what} contains a non-finite value")]
    NonFinite { what: &'static str },
    #[error("rotation is not orthonormal: max |RᵀR − I| entry is {deviation:e}")]
    NotOrthonormal { deviation: f64 },
    #[error("rotation determinant is {det}, expected +1")]
    Determinant { det: f64 },
    #[error("object model {object_id} has {found} vertices, need at least {MIN_MODEL_VERTICES}")]
    TooFewVertices { object_id: u32, found: usize },
    #[error("object model {object_id} has zero diameter")]
    DegenerateModel { object_id: u32 },
    #[error("duplicate object id {0}")]
    DuplicateObject(u32),
}

/// A rigid transform `[R | t]` with `R ∈ SO(3)` and `t` in millimeters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Pose {
    /// Builds a pose after checking that `rotation` is a proper rotation.
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self, GeometryError> {
        validate_rotation(&rotation)?;
        if translation.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite { what: "translation" });
        }
        Ok(Self { rotation, translation })
    }

    /// Row-major rotation entries and a translation, the layout used on disk.
    pub fn from_row_major(rotation: [f64; 9], translation: [f64; 3]) -> Result<Self, GeometryError> {
        Self::new(
            Matrix3::from_row_slice(&rotation),
            Vector3::from(translation),
        )
    }

    /// For products of already validated rotations.
    pub(crate) fn from_parts_unchecked(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self { rotation, translation }
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn from_translation(translation: Vector3<f64>) -> Result<Self, GeometryError> {
        Self::new(Matrix3::identity(), translation)
    }

    /// Rotation by `angle` radians about `axis` followed by `translation`.
    /// A zero axis yields the identity rotation.
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64, translation: Vector3<f64>) -> Result<Self, GeometryError> {
        let rotation = match Unit::try_new(axis, 0.0) {
            Some(axis) => Rotation3::from_axis_angle(&axis, angle).into_inner(),
            None => Matrix3::identity(),
        };
        Self::new(rotation, translation)
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn rotation_row_major(&self) -> [f64; 9] {
        let r = &self.rotation;
        [
            r[(0, 0)], r[(0, 1)], r[(0, 2)],
            r[(1, 0)], r[(1, 1)], r[(1, 2)],
            r[(2, 0)], r[(2, 1)], r[(2, 2)],
        ]
    }

    pub fn translation_array(&self) -> [f64; 3] {
        [self.translation.x, self.translation.y, self.translation.z]
    }

    #[inline]
    pub fn transform_point(&self, point: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * point + self.translation
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            translation: -(rt * self.translation),
            rotation: rt,
        }
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

/// Checks finiteness, orthonormality and `det = +1` within [`ROTATION_TOLERANCE`].
pub fn validate_rotation(rotation: &Matrix3<f64>) -> Result<(), GeometryError> {
    if rotation.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite { what: "rotation" });
    }
    let gram = rotation.transpose() * rotation - Matrix3::identity();
    let deviation = gram.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if deviation > ROTATION_TOLERANCE {
        return Err(GeometryError::NotOrthonormal { deviation });
    }
    let det = rotation.determinant();
    if (det - 1.0).abs() > ROTATION_TOLERANCE {
        return Err(GeometryError::Determinant { det });
    }
    Ok(())
}

/// Vertex set of one rigid part, in millimeters.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectModel {
    object_id: u32,
    vertices: Vec<Vector3<f64>>,
    diameter: f64,
}

impl ObjectModel {
    /// Validates the vertices and computes the diameter (max pairwise distance).
    pub fn new(object_id: u32, vertices: Vec<Vector3<f64>>) -> Result<Self, GeometryError> {
        if vertices.len() < MIN_MODEL_VERTICES {
            return Err(GeometryError::TooFewVertices { object_id, found: vertices.len() });
        }
        if vertices.iter().flat_map(|v| v.iter()).any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite { what: "model vertices" });
        }
        let diameter = max_pairwise_distance(&vertices);
        if diameter <= 0.0 {
            return Err(GeometryError::DegenerateModel { object_id });
        }
        Ok(Self { object_id, vertices, diameter })
    }

    pub fn object_id(&self) -> u32 {
        self.object_id
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }
}

fn max_pairwise_distance(vertices: &[Vector3<f64>]) -> f64 {
    let mut best_sq = 0.0_f64;
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            best_sq = best_sq.max((a - b).norm_squared());
        }
    }
    libm::sqrt(best_sq)
}

/// Models keyed by object id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelSet {
    models: BTreeMap<u32, ObjectModel>,
}

impl ModelSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_models<I: IntoIterator<Item = ObjectModel>>(models: I) -> Result<Self, GeometryError> {
        let mut set = Self::new();
        for model in models {
            set.insert(model)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, model: ObjectModel) -> Result<(), GeometryError> {
        let id = model.object_id();
        if self.models.contains_key(&id) {
            return Err(GeometryError::DuplicateObject(id));
        }
        self.models.insert(id, model);
        Ok(())
    }

    pub fn get(&self, object_id: u32) -> Option<&ObjectModel> {
        self.models.get(&object_id)
    }

    pub fn contains(&self, object_id: u32) -> bool {
        self.models.contains_key(&object_id)
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ObjectModel> {
        self.models.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.models.keys().copied()
    }
}

/// Per-vertex displacement `(R̄ − R̂)·v + (t̄ − t̂)` between two poses.
struct Displacement {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Displacement {
    fn between(gt: &Pose, est: &Pose) -> Self {
        Self {
            rotation: gt.rotation - est.rotation,
            translation: gt.translation - est.translation,
        }
    }

    #[inline]
    fn at(&self, vertex: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * vertex + self.translation
    }
}

/// Maximum distance error: the largest displacement of any model vertex
/// between the ground-truth and estimated pose.
///
/// The per-point error `x ↦ ‖(R̄ − R̂)x + (t̄ − t̂)‖` is convex, so its maximum
/// over the model surface (inside the vertex hull) is attained at a vertex.
pub fn compute_mde(gt: &Pose, est: &Pose, model: &ObjectModel) -> f64 {
    let d = Displacement::between(gt, est);
    let max_sq = model
        .vertices
        .iter()
        .map(|v| d.at(v).norm_squared())
        .fold(0.0_f64, f64::max);
    libm::sqrt(max_sq)
}

/// Mean corresponding-point distance over the model vertices (ADD).
pub fn compute_add(gt: &Pose, est: &Pose, model: &ObjectModel) -> f64 {
    let d = Displacement::between(gt, est);
    let sum: f64 = model.vertices.iter().map(|v| d.at(v).norm()).sum();
    sum / model.vertices.len() as f64
}

/// Per camera axis, the mean absolute vertex displacement.
pub fn compute_axis_components(gt: &Pose, est: &Pose, model: &ObjectModel) -> [f64; 3] {
    let d = Displacement::between(gt, est);
    let mut sums = [0.0_f64; 3];
    for v in &model.vertices {
        let e = d.at(v);
        for (s, c) in sums.iter_mut().zip(e.iter()) {
            *s += c.abs();
        }
    }
    let n = model.vertices.len() as f64;
    sums.map(|s| s / n)
}

/// Largest per-vertex displacement along the camera x or y axis.
pub fn max_planar_offset(gt: &Pose, est: &Pose, model: &ObjectModel) -> f64 {
    let d = Displacement::between(gt, est);
    model
        .vertices
        .iter()
        .map(|v| {
            let e = d.at(v);
            e.x.abs().max(e.y.abs())
        })
        .fold(0.0_f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    pub(crate) fn unit_cube(id: u32) -> ObjectModel {
        let mut vs = Vec::new();
        for x in [-1.0, 1.0] {
            for y in [-1.0, 1.0] {
                for z in [-1.0, 1.0] {
                    vs.push(Vector3::new(x, y, z));
                }
            }
        }
        ObjectModel::new(id, vs).unwrap()
    }

    fn rot_z_90() -> Pose {
        Pose::from_row_major([0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0], [0.0; 3]).unwrap()
    }

    #[test]
    fn identical_poses_have_zero_error() {
        let m = unit_cube(1);
        let p = Pose::from_axis_angle(Vector3::new(1.0, 2.0, 3.0), 0.7, Vector3::new(5.0, -3.0, 400.0)).unwrap();
        assert_eq!(compute_mde(&p, &p, &m), 0.0);
        assert_eq!(compute_add(&p, &p, &m), 0.0);
        assert_eq!(compute_axis_components(&p, &p, &m), [0.0; 3]);
    }

    #[test]
    fn pure_translation_offset() {
        let m = unit_cube(1);
        let est = Pose::from_translation(Vector3::new(3.0, 4.0, 0.0)).unwrap();
        let gt = Pose::identity();
        assert_eq!(compute_mde(&gt, &est, &m), 5.0);
        assert_eq!(compute_add(&gt, &est, &m), 5.0);
        assert_eq!(compute_axis_components(&gt, &est, &m), [3.0, 4.0, 0.0]);
    }

    #[test]
    fn quarter_turn_on_cube() {
        let m = unit_cube(1);
        let gt = Pose::identity();
        let est = rot_z_90();
        // every vertex moves by |(x - (-y), y - x)| = sqrt(2)·sqrt(2) = 2
        assert!((compute_mde(&gt, &est, &m) - 2.0).abs() < 1e-15);
        assert!((compute_add(&gt, &est, &m) - 2.0).abs() < 1e-15);
        // Δ = (x + y, y − x, 0): |Δx| and |Δy| are 2 on half the vertices, 0 on the rest
        assert_eq!(compute_axis_components(&gt, &est, &m), [1.0, 1.0, 0.0]);
    }

    #[test]
    fn reflection_is_rejected() {
        let err = Pose::from_row_major([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0], [0.0; 3]).unwrap_err();
        assert!(matches!(err, GeometryError::Determinant { .. }));
    }

    #[test]
    fn skewed_rotation_is_rejected() {
        let err = Pose::from_row_major([1.0, 1e-3, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], [0.0; 3]).unwrap_err();
        assert!(matches!(err, GeometryError::NotOrthonormal { .. }));
        let err = Pose::from_row_major([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], [f64::NAN, 0.0, 0.0]).unwrap_err();
        assert_eq!(err, GeometryError::NonFinite { what: "translation" });
    }

    #[test]
    fn tolerance_boundary() {
        // 1e-7 perturbation is inside the 1e-6 band
        assert!(Pose::from_row_major([1.0 + 1e-7, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], [0.0; 3]).is_ok());
    }

    #[test]
    fn cube_diameter() {
        let m = unit_cube(1);
        assert!((m.diameter() - 2.0 * 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn model_validation() {
        let err = ObjectModel::new(3, vec![Vector3::zeros(); 3]).unwrap_err();
        assert_eq!(err, GeometryError::TooFewVertices { object_id: 3, found: 3 });
        let err = ObjectModel::new(3, vec![Vector3::new(1.0, 1.0, 1.0); 5]).unwrap_err();
        assert_eq!(err, GeometryError::DegenerateModel { object_id: 3 });
    }

    #[test]
    fn duplicate_model_ids() {
        let mut set = ModelSet::new();
        set.insert(unit_cube(7)).unwrap();
        assert_eq!(set.insert(unit_cube(7)), Err(GeometryError::DuplicateObject(7)));
    }

    #[test]
    fn compose_and_inverse() {
        let p = Pose::from_axis_angle(Vector3::new(0.3, -1.0, 0.2), 1.1, Vector3::new(10.0, 20.0, 30.0)).unwrap();
        let id = p.compose(&p.inverse());
        assert!((id.rotation() - Matrix3::identity()).amax() < 1e-12);
        assert!(id.translation().amax() < 1e-12);
    }
}
