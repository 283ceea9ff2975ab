//! Loading and writing of models, ground truth, estimates and manifests.

mod estimates;
mod manifest;
mod models;
mod scene_gt;

pub use estimates::{load_estimates, read_estimates, save_estimates, write_estimates, HEADER as ESTIMATE_HEADER};
pub use manifest::{DatasetManifest, Split, Variant};
pub use models::{load_model, load_models, object_id_from_stem, read_ply_vertices};
pub use scene_gt::{
    load_ground_truth, load_scene_gt, parse_scene_gt, scene_gt_json, scene_id_for, write_ground_truth_tree,
    write_scene_gt, SCENE_GT_FILE,
};

use poseval_core::{Estimate, GtAnnotation, ModelSet};

use crate::error::{Error, Result};

/// Treatment of object ids without a loaded model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObjectPolicy {
    /// Reject the input.
    #[default]
    Strict,
    /// Drop the affected instances and count them.
    Lenient,
}

/// Input restricted to known objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Checked {
    pub gts: Vec<GtAnnotation>,
    pub estimates: Vec<Estimate>,
    pub skipped: usize,
}

pub fn check_objects(
    gts: Vec<GtAnnotation>,
    estimates: Vec<Estimate>,
    models: &ModelSet,
    policy: ObjectPolicy,
) -> Result<Checked> {
    let unknown = |id: u32, kind: &str, scene: u32, image: u32| {
        Error::Invalid(format!("unknown object id {id} ({kind} in scene {scene}, image {image})"))
    };
    if policy == ObjectPolicy::Strict {
        if let Some(g) = gts.iter().find(|g| !models.contains(g.object_id)) {
            return Err(unknown(g.object_id, "ground truth", g.scene_id, g.image_id));
        }
        if let Some(e) = estimates.iter().find(|e| !models.contains(e.object_id)) {
            return Err(unknown(e.object_id, "estimate", e.scene_id, e.image_id));
        }
        return Ok(Checked { gts, estimates, skipped: 0 });
    }
    let total = gts.len() + estimates.len();
    let gts: Vec<_> = gts.into_iter().filter(|g| models.contains(g.object_id)).collect();
    let estimates: Vec<_> = estimates.into_iter().filter(|e| models.contains(e.object_id)).collect();
    let skipped = total - gts.len() - estimates.len();
    if skipped > 0 {
        log::warn!("skipped {skipped} instances with unknown object ids");
    }
    Ok(Checked { gts, estimates, skipped })
}
