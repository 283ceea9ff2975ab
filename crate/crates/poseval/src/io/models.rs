//! Object models from PLY meshes, one file per object.

use std::fs;
use std::path::Path;

use ply_rs_bw::parser::Parser;
use ply_rs_bw::ply::{DefaultElement, Property};
use poseval_core::{ModelSet, ObjectModel, Vector3};

use crate::error::{Error, Location, Result};

/// Object id encoded in a file stem by its trailing digits, e.g. `obj_000012` → 12.
pub fn object_id_from_stem(stem: &str) -> Option<u32> {
    let digits: String = stem.chars().rev().take_while(char::is_ascii_digit).collect();
    if digits.is_empty() {
        return None;
    }
    digits.chars().rev().collect::<String>().parse().ok()
}

fn scalar(p: &Property) -> Option<f64> {
    Some(match *p {
        Property::Char(v) => v.into(),
        Property::UChar(v) => v.into(),
        Property::Short(v) => v.into(),
        Property::UShort(v) => v.into(),
        Property::Int(v) => v.into(),
        Property::UInt(v) => v.into(),
        Property::Float(v) => v.into(),
        Property::Double(v) => v,
        _ => return None,
    })
}

/// Reads the vertex positions of a PLY file (ASCII or binary); faces and
/// other elements are ignored.
pub fn read_ply_vertices(path: &Path) -> Result<Vec<Vector3<f64>>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let ply = Parser::<DefaultElement>::new()
        .read_ply(&mut bytes.as_slice())
        .map_err(|e| Error::format(path, Location::File, format!("unparseable PLY: {e}")))?;
    let Some(vertices) = ply.payload.get("vertex") else {
        return Err(Error::format(path, Location::File, "no vertex element"));
    };
    vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut xyz = [0.0; 3];
            for (slot, name) in xyz.iter_mut().zip(["x", "y", "z"]) {
                let value = v.get(name).and_then(scalar).ok_or_else(|| {
                    Error::format(path, Location::File, format!("vertex {i} lacks a scalar `{name}` property"))
                })?;
                if !value.is_finite() {
                    return Err(Error::format(path, Location::File, format!("vertex {i}: non-finite `{name}`")));
                }
                *slot = value;
            }
            Ok(Vector3::from(xyz))
        })
        .collect()
}

pub fn load_model(path: &Path, object_id: u32) -> Result<ObjectModel> {
    let vertices = read_ply_vertices(path)?;
    if vertices.is_empty() {
        return Err(Error::format(path, Location::File, "empty vertex list"));
    }
    ObjectModel::new(object_id, vertices).map_err(|e| Error::format(path, Location::File, e))
}

/// Loads every `*.ply` file of a directory. The object id is taken from the
/// trailing digits of the file stem.
pub fn load_models(dir: &Path) -> Result<ModelSet> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_ply = path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("ply"));
        if is_ply && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::Invalid(format!("{}: no models found", dir.display())));
    }
    let mut models = ModelSet::new();
    for path in files {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let id = object_id_from_stem(stem)
            .ok_or_else(|| Error::format(&path, Location::File, "file name carries no object id"))?;
        if models.contains(id) {
            return Err(Error::format(&path, Location::File, format!("duplicate object id {id}")));
        }
        models.insert(load_model(&path, id)?)?;
    }
    Ok(models)
}
