//! Pose estimates as CSV: `scene_id,im_id,obj_id,score,R,t,time`, with `R`
//! nine space-separated row-major floats and `t` three floats in mm.
//!
//! A header row is optional. With a header, columns are found by name and
//! `score` and `time` may be left out (they default to 1.0 and 0.0).
//! Without one, every row must carry all seven columns in the order above.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim, WriterBuilder};
use poseval_core::{Estimate, Pose};

use crate::error::{Error, Location, Result};

pub const HEADER: [&str; 7] = ["scene_id", "im_id", "obj_id", "score", "R", "t", "time"];

#[derive(Debug, Clone, Copy)]
struct Columns {
    scene: usize,
    image: usize,
    object: usize,
    score: Option<usize>,
    rotation: usize,
    translation: usize,
    time: Option<usize>,
    width: usize,
}

const DEFAULT_COLUMNS: Columns = Columns {
    scene: 0,
    image: 1,
    object: 2,
    score: Some(3),
    rotation: 4,
    translation: 5,
    time: Some(6),
    width: 7,
};

fn canonical(name: &str) -> Option<&'static str> {
    Some(match name.to_ascii_lowercase().as_str() {
        "scene_id" => "scene_id",
        "im_id" | "image_id" => "im_id",
        "obj_id" | "object_id" => "obj_id",
        "score" | "confidence" => "score",
        "r" => "R",
        "t" => "t",
        "time" | "inference_time" => "time",
        _ => return None,
    })
}

fn columns_from_header(header: &StringRecord, path: &Path, row: u64) -> Result<Columns> {
    let mut found: [Option<usize>; 7] = [None; 7];
    for (i, name) in header.iter().enumerate() {
        let Some(name) = canonical(name) else {
            return Err(Error::format(path, Location::Row(row), format!("unknown column `{name}`")));
        };
        let slot = HEADER.iter().position(|h| *h == name).unwrap();
        if found[slot].replace(i).is_some() {
            return Err(Error::format(path, Location::Row(row), format!("column `{name}` appears twice")));
        }
    }
    let required = |slot: usize| {
        found[slot]
            .ok_or_else(|| Error::format(path, Location::Row(row), format!("header lacks column `{}`", HEADER[slot])))
    };
    Ok(Columns {
        scene: required(0)?,
        image: required(1)?,
        object: required(2)?,
        score: found[3],
        rotation: required(4)?,
        translation: required(5)?,
        time: found[6],
        width: header.len(),
    })
}

fn is_header(record: &StringRecord) -> bool {
    record.get(0).is_some_and(|f| f.parse::<u32>().is_err())
}

struct Row<'a> {
    record: &'a StringRecord,
    number: u64,
    path: &'a Path,
}

impl Row<'_> {
    fn err(&self, field: &str, message: impl std::fmt::Display) -> Error {
        Error::format(self.path, Location::RowField(self.number, field.into()), message)
    }

    fn id(&self, col: usize, field: &str) -> Result<u32> {
        let s = &self.record[col];
        s.parse().map_err(|_| self.err(field, format!("`{s}` is not a non-negative integer")))
    }

    fn float(&self, col: usize, field: &str) -> Result<f64> {
        let s = &self.record[col];
        let v: f64 = s.parse().map_err(|_| self.err(field, format!("`{s}` is not a number")))?;
        if !v.is_finite() {
            return Err(self.err(field, "non-finite value"));
        }
        Ok(v)
    }

    fn floats<const N: usize>(&self, col: usize, field: &str) -> Result<[f64; N]> {
        let parts: Vec<&str> = self.record[col].split_whitespace().collect();
        if parts.len() != N {
            return Err(self.err(field, format!("expected {N} space-separated values, found {}", parts.len())));
        }
        let mut out = [0.0f64; N];
        for (slot, s) in out.iter_mut().zip(parts) {
            *slot = s.parse().map_err(|_| self.err(field, format!("`{s}` is not a number")))?;
            if !slot.is_finite() {
                return Err(self.err(field, "non-finite value"));
            }
        }
        Ok(out)
    }

    fn estimate(&self, cols: &Columns) -> Result<Estimate> {
        let scene = self.id(cols.scene, "scene_id")?;
        let image = self.id(cols.image, "im_id")?;
        let object = self.id(cols.object, "obj_id")?;
        let score = cols.score.map(|c| self.float(c, "score")).transpose()?.unwrap_or(1.0);
        let rotation = self.floats::<9>(cols.rotation, "R")?;
        let translation = self.floats::<3>(cols.translation, "t")?;
        let time = cols.time.map(|c| self.float(c, "time")).transpose()?.unwrap_or(0.0);
        let pose = Pose::from_row_major(rotation, translation).map_err(|e| self.err("R", e))?;
        Estimate::new(scene, image, object, pose, score, time).map_err(|e| self.err("score", e))
    }
}

pub fn read_estimates<R: Read>(reader: R, path: &Path) -> Result<Vec<Estimate>> {
    let mut csv = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut cols: Option<Columns> = None;
    let mut out = Vec::new();
    let mut record = StringRecord::new();
    loop {
        match csv.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let row = e.position().map_or(0, |p| p.line());
                return Err(Error::format(path, Location::Row(row), e));
            }
        }
        let number = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let columns = match cols {
            Some(c) => c,
            None if is_header(&record) => {
                cols = Some(columns_from_header(&record, path, number)?);
                continue;
            }
            None => *cols.insert(DEFAULT_COLUMNS),
        };
        if record.len() != columns.width {
            let message = if columns.width == DEFAULT_COLUMNS.width {
                format!("expected {} columns ({}), found {}", columns.width, HEADER.join(","), record.len())
            } else {
                format!("expected {} columns, found {}", columns.width, record.len())
            };
            return Err(Error::format(path, Location::Row(number), message));
        }
        out.push(Row { record: &record, number, path }.estimate(&columns)?);
    }
    Ok(out)
}

pub fn load_estimates(path: &Path) -> Result<Vec<Estimate>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_estimates(std::io::BufReader::new(file), path)
}

fn joined(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

/// Writes estimates with a full header; floats are printed in their
/// shortest round-trip form, so reading the file back is lossless.
pub fn write_estimates<W: Write>(writer: W, estimates: &[Estimate]) -> std::io::Result<()> {
    let mut csv = WriterBuilder::new().from_writer(writer);
    csv.write_record(HEADER)?;
    for e in estimates {
        csv.write_record([
            e.scene_id.to_string(),
            e.image_id.to_string(),
            e.object_id.to_string(),
            e.confidence.to_string(),
            joined(&e.pose.rotation_row_major()),
            joined(&e.pose.translation_array()),
            e.inference_time.to_string(),
        ])?;
    }
    csv.flush()
}

pub fn save_estimates(path: &Path, estimates: &[Estimate]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_estimates(std::io::BufWriter::new(file), estimates).map_err(|e| Error::io(path, e))
}
