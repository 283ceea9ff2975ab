//! Result files: JSON reports and CSV tables for external plotting.

use std::fs;
use std::path::{Path, PathBuf};

use poseval_core::{ComponentStats, DistributionRow, EvalReport, ProcessOutcome, SweepPoint, Verdict};
use serde::Serialize;

use crate::error::{Error, Result};

/// A fresh output directory. An existing one is only reused with `force`,
/// in which case files of the same name are overwritten.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path, force: bool) -> Result<Self> {
        if root.exists() && !force {
            return Err(Error::OutputExists(root.to_path_buf()));
        }
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Invalid(e.to_string()))?;
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn write_csv<R, I>(&self, name: &str, header: &[&str], rows: I) -> Result<PathBuf>
    where
        R: IntoIterator<Item = String>,
        I: IntoIterator<Item = R>,
    {
        let path = self.path(name);
        let io = |e: csv::Error| match e.into_kind() {
            csv::ErrorKind::Io(e) => Error::io(&path, e),
            other => Error::Invalid(format!("{}: {other:?}", path.display())),
        };
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// `AP 97.5 AR 92.5`: percentages with one decimal.
pub fn format_ap_ar(ap: f64, ar: f64) -> String {
    format!("AP {:.1} AR {:.1}", ap * 100.0, ar * 100.0)
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Tp => "TP",
        Verdict::Fp => "FP",
    }
}

pub fn write_ap_ar(out: &OutputDir, report: &EvalReport) -> Result<PathBuf> {
    let totals = report.totals();
    let row = [
        report.ap.to_string(),
        report.ar.to_string(),
        report.samples.to_string(),
        totals.tp.to_string(),
        totals.fp.to_string(),
        totals.fn_.to_string(),
    ];
    out.write_csv("ap_ar.csv", &["ap", "ar", "samples", "tp", "fp", "fn"], [row])
}

pub fn write_sweep(out: &OutputDir, sweep: &[SweepPoint]) -> Result<PathBuf> {
    let rows = sweep.iter().map(|p| [p.confidence.to_string(), p.ap.to_string(), p.ar.to_string()]);
    out.write_csv("sweep.csv", &["confidence", "ap", "ar"], rows)
}

pub fn write_distribution(out: &OutputDir, rows: &[DistributionRow]) -> Result<PathBuf> {
    let rows = rows.iter().map(|r| {
        [
            r.scene_id.to_string(),
            r.image_id.to_string(),
            r.object_id.to_string(),
            r.mde_mm.to_string(),
            verdict_label(r.verdict).to_string(),
        ]
    });
    out.write_csv("mde_distribution.csv", &["scene_id", "im_id", "obj_id", "mde_mm", "verdict"], rows)
}

/// Per-axis mean and sample standard deviation; the deviation is left
/// empty when fewer than two errors were collected.
pub fn write_components(out: &OutputDir, stats: &ComponentStats) -> Result<PathBuf> {
    let rows = ["x", "y", "z"].iter().enumerate().map(|(k, axis)| {
        let std = if stats.std_defined { stats.std_mm[k].to_string() } else { String::new() };
        [axis.to_string(), stats.mean_mm[k].to_string(), std, stats.count.to_string()]
    });
    out.write_csv("components.csv", &["axis", "mean_mm", "std_mm", "count"], rows)
}

pub struct SummaryLabels<'a> {
    pub object: u32,
    pub method: &'a str,
    pub variant: &'a str,
}

pub fn write_process_summary(out: &OutputDir, labels: &SummaryLabels, outcomes: &[ProcessOutcome]) -> Result<PathBuf> {
    let rows = outcomes.iter().enumerate().map(|(r, o)| {
        [
            labels.object.to_string(),
            labels.method.to_string(),
            labels.variant.to_string(),
            r.to_string(),
            o.ap.to_string(),
            o.ar.to_string(),
            o.counts.tp.to_string(),
            o.counts.fp.to_string(),
            o.counts.fn_.to_string(),
        ]
    });
    out.write_csv(
        "summary.csv",
        &["object", "method", "variant", "replication", "ap", "ar", "tp", "fp", "fn"],
        rows,
    )
}
