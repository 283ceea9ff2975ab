//! Scene ground truth: one JSON file per scene mapping image ids to the
//! annotated instances of that image.
//!
//! ```json
//! {"0": [{"obj_id": 1, "cam_R_m2c": [9 floats], "cam_t_m2c": [3 floats], "visib_fract": 0.93}]}
//! ```
//!
//! The scene id is not stored in the file; it is taken from the name of the
//! enclosing directory (`…/000003/scene_gt.json` is scene 3).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use poseval_core::{GtAnnotation, Pose};
use serde::{Deserialize, Serialize};

use super::models::object_id_from_stem;
use crate::error::{Error, Location, Result};

pub const SCENE_GT_FILE: &str = "scene_gt.json";

#[derive(Debug, Serialize, Deserialize)]
#[allow(non_snake_case)]
struct RawInstance {
    obj_id: u32,
    cam_R_m2c: [f64; 9],
    cam_t_m2c: [f64; 3],
    visib_fract: f64,
}

/// Scene id of a scene-GT file: the numeric parent directory, else the
/// trailing digits of the file stem, else 0.
pub fn scene_id_for(path: &Path) -> u32 {
    let parent = path.parent().and_then(Path::file_name).and_then(|n| n.to_str());
    if let Some(id) = parent.and_then(|n| n.parse().ok()) {
        return id;
    }
    path.file_stem().and_then(|s| s.to_str()).and_then(object_id_from_stem).unwrap_or(0)
}

pub fn parse_scene_gt(text: &str, scene_id: u32, path: &Path) -> Result<Vec<GtAnnotation>> {
    let raw: BTreeMap<u32, Vec<RawInstance>> = serde_json::from_str(text).map_err(|e| {
        Error::format(path, Location::Line { line: e.line(), column: e.column() }, e)
    })?;
    let mut out = Vec::new();
    for (image_id, instances) in raw {
        for (i, inst) in instances.into_iter().enumerate() {
            let at = |field: &str| Location::Entry { image: image_id.to_string(), instance: i, field: field.into() };
            let pose = Pose::from_row_major(inst.cam_R_m2c, inst.cam_t_m2c)
                .map_err(|e| Error::format(path, at("cam_R_m2c"), e))?;
            let gt = GtAnnotation::new(scene_id, image_id, inst.obj_id, pose, inst.visib_fract)
                .map_err(|e| Error::format(path, at("visib_fract"), e))?;
            out.push(gt);
        }
    }
    Ok(out)
}

pub fn load_scene_gt(path: &Path) -> Result<Vec<GtAnnotation>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scene_gt(&text, scene_id_for(path), path)
}

fn find_scene_files(dir: &Path, found: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        entries.push(entry.map_err(|e| Error::io(dir, e))?.path());
    }
    entries.sort();
    for path in entries {
        if path.is_dir() {
            find_scene_files(&path, found)?;
        } else if path.file_name().is_some_and(|n| n == SCENE_GT_FILE) {
            found.push(path);
        }
    }
    Ok(())
}

/// Loads one scene-GT file, or every `scene_gt.json` below a directory.
/// Annotations come back ordered by `(scene_id, image_id)`, keeping file
/// order within an image.
pub fn load_ground_truth(path: &Path) -> Result<Vec<GtAnnotation>> {
    let files = if path.is_dir() {
        let mut files = Vec::new();
        find_scene_files(path, &mut files)?;
        if files.is_empty() {
            return Err(Error::Invalid(format!("{}: no {SCENE_GT_FILE} found", path.display())));
        }
        files
    } else {
        vec![path.to_path_buf()]
    };
    let mut all = Vec::new();
    for file in files {
        all.extend(load_scene_gt(&file)?);
    }
    all.sort_by_key(GtAnnotation::key);
    Ok(all)
}

/// Serializes the annotations of a single scene.
pub fn scene_gt_json(gts: &[GtAnnotation]) -> Result<String> {
    if let Some(first) = gts.first() {
        if gts.iter().any(|g| g.scene_id != first.scene_id) {
            return Err(Error::Invalid("a scene-GT file holds exactly one scene".into()));
        }
    }
    let mut raw: BTreeMap<u32, Vec<RawInstance>> = BTreeMap::new();
    for g in gts {
        raw.entry(g.image_id).or_default().push(RawInstance {
            obj_id: g.object_id,
            cam_R_m2c: g.pose.rotation_row_major(),
            cam_t_m2c: g.pose.translation_array(),
            visib_fract: g.visibility,
        });
    }
    let mut text = serde_json::to_string_pretty(&raw).map_err(|e| Error::Invalid(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn write_scene_gt(path: &Path, gts: &[GtAnnotation]) -> Result<()> {
    fs::write(path, scene_gt_json(gts)?).map_err(|e| Error::io(path, e))
}

/// Writes `root/<scene_id:06>/scene_gt.json` for every scene present.
pub fn write_ground_truth_tree(root: &Path, gts: &[GtAnnotation]) -> Result<Vec<PathBuf>> {
    let mut scenes: BTreeMap<u32, Vec<GtAnnotation>> = BTreeMap::new();
    for g in gts {
        scenes.entry(g.scene_id).or_default().push(g.clone());
    }
    let mut written = Vec::new();
    for (scene, gts) in scenes {
        let dir = root.join(format!("{scene:06}"));
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join(SCENE_GT_FILE);
        write_scene_gt(&path, &gts)?;
        written.push(path);
    }
    Ok(written)
}
