#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn cube_vertices(half: f64) -> Vec<[f64; 3]> {
    let mut vs = Vec::new();
    for x in [-half, half] {
        for y in [-half, half] {
            for z in [-half, half] {
                vs.push([x, y, z]);
            }
        }
    }
    vs
}

/// Box of 120 × 30 × 20 mm.
pub fn handle_vertices() -> Vec<[f64; 3]> {
    cube_vertices(1.0).into_iter().map(|[x, y, z]| [60.0 * x, 15.0 * y, 10.0 * z]).collect()
}

pub fn ascii_ply(vertices: &[[f64; 3]]) -> String {
    let mut s = format!(
        "ply\nformat ascii 1.0\ncomment test mesh\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\n\
         element face 1\nproperty list uchar int vertex_indices\nend_header\n",
        vertices.len()
    );
    for v in vertices {
        s.push_str(&format!("{} {} {}\n", v[0], v[1], v[2]));
    }
    s.push_str("3 0 1 2\n");
    s
}

pub fn binary_ply(vertices: &[[f64; 3]]) -> Vec<u8> {
    let header = format!(
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\n\
         property uchar red\nend_header\n",
        vertices.len()
    );
    let mut bytes = header.into_bytes();
    for v in vertices {
        for c in v {
            bytes.extend_from_slice(&c.to_le_bytes());
        }
        bytes.push(200);
    }
    bytes
}

pub fn write_models(dir: &Path, models: &[(u32, Vec<[f64; 3]>)]) -> PathBuf {
    let models_dir = dir.join("models");
    fs::create_dir_all(&models_dir).unwrap();
    for (id, vs) in models {
        fs::write(models_dir.join(format!("obj_{id:06}.ply")), ascii_ply(vs)).unwrap();
    }
    models_dir
}

pub fn poseval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poseval")).args(args).output().expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).to_string()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}
