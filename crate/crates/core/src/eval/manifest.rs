//! Prediction directories and their manifest.
//!
//! `manifest.json` lists one entry per model:
//!
//! ```json
//! {"v": 1, "entries": [{"id": "000001", "pred": "000001.plank", "status": "ok"},
//!                      {"id": "000002", "status": "failed"}]}
//! ```
//!
//! `pred` is relative to the manifest's directory and may be a `.plank`
//! program or a reconstruction solution JSON. Without a manifest, a model
//! `id` is looked up as `{id}.plank`, then `{id}.solution.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{aggregate, score_model, Averaging, FailurePolicy, MatchReport, ModelScore};
use crate::geom::Aabb;
use crate::program::parse_program;
use crate::recon::solution_from_json;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred: Option<String>,
    pub status: EntryStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalManifest {
    pub v: u32,
    pub entries: Vec<ManifestEntry>,
}

impl EvalManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Self {
        Self { v: MANIFEST_VERSION, entries }
    }

    pub fn entry(&self, id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

#[derive(Debug, Error)]
pub enum EvalIoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error("{0}: unsupported manifest version {1}")]
    Version(PathBuf, u32),
    #[error("no ground-truth .plank files in {0}")]
    EmptyGroundTruth(PathBuf),
}

fn read(path: &Path) -> Result<String, EvalIoError> {
    fs::read_to_string(path).map_err(|source| EvalIoError::Io { path: path.into(), source })
}

fn format_err(path: &Path, msg: impl ToString) -> EvalIoError {
    EvalIoError::Format { path: path.into(), msg: msg.to_string() }
}

pub fn read_manifest(path: &Path) -> Result<EvalManifest, EvalIoError> {
    let m: EvalManifest = serde_json::from_str(&read(path)?).map_err(|e| format_err(path, e))?;
    if m.v != MANIFEST_VERSION {
        return Err(EvalIoError::Version(path.into(), m.v));
    }
    Ok(m)
}

pub fn write_manifest(path: &Path, m: &EvalManifest) -> Result<(), EvalIoError> {
    let text = serde_json::to_string_pretty(m).expect("manifest serializes") + "\n";
    fs::write(path, text).map_err(|source| EvalIoError::Io { path: path.into(), source })
}

/// Boxes of a `.plank` program.
pub fn read_plank_boxes(path: &Path) -> Result<Vec<Aabb>, EvalIoError> {
    let p = parse_program(&read(path)?).map_err(|e| format_err(path, e))?;
    p.resolve().map_err(|e| format_err(path, e))
}

/// `None` when the file records a failed reconstruction.
pub fn read_prediction(path: &Path) -> Result<Option<Vec<Aabb>>, EvalIoError> {
    if path.extension().is_some_and(|e| e == "plank") {
        return read_plank_boxes(path).map(Some);
    }
    let v: serde_json::Value = serde_json::from_str(&read(path)?).map_err(|e| format_err(path, e))?;
    let (status, boxes) = solution_from_json(&v).map_err(|e| format_err(path, e))?;
    Ok(status.has_output().then_some(boxes))
}

/// Sorted ids of the `.plank` files in a directory.
pub fn plank_ids(dir: &Path) -> Result<Vec<String>, EvalIoError> {
    let rd = fs::read_dir(dir).map_err(|source| EvalIoError::Io { path: dir.into(), source })?;
    let mut ids = Vec::new();
    for e in rd {
        let e = e.map_err(|source| EvalIoError::Io { path: dir.into(), source })?;
        let p = e.path();
        if p.extension().is_some_and(|x| x == "plank") {
            if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
                ids.push(stem.to_string());
            }
        }
    }
    ids.sort();
    Ok(ids)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub iou_thresh: f64,
    pub averaging: Averaging,
    pub failures: FailurePolicy,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { iou_thresh: super::DEFAULT_IOU_THRESH, averaging: Averaging::Macro, failures: FailurePolicy::Zero }
    }
}

/// Score every ground-truth model in `gt_dir` against `pred_dir`. Missing
/// or unreadable predictions count as failed reconstructions.
pub fn evaluate_dirs(pred_dir: &Path, gt_dir: &Path, opts: &EvalOptions) -> Result<MatchReport, EvalIoError> {
    let ids = plank_ids(gt_dir)?;
    if ids.is_empty() {
        return Err(EvalIoError::EmptyGroundTruth(gt_dir.into()));
    }
    let manifest_path = pred_dir.join(MANIFEST_FILE);
    let manifest = if manifest_path.exists() { Some(read_manifest(&manifest_path)?) } else { None };
    let mut models = Vec::with_capacity(ids.len());
    for id in ids {
        let gt = read_plank_boxes(&gt_dir.join(format!("{id}.plank")))?;
        let pred_path = match &manifest {
            Some(m) => match m.entry(&id) {
                Some(ManifestEntry { status: EntryStatus::Ok, pred: Some(p), .. }) => Some(pred_dir.join(p)),
                _ => None,
            },
            None => [format!("{id}.plank"), format!("{id}.solution.json")]
                .into_iter()
                .map(|f| pred_dir.join(f))
                .find(|p| p.exists()),
        };
        let pred = match pred_path.map(|p| read_prediction(&p)) {
            Some(Ok(p)) => p,
            Some(Err(e)) => {
                log::warn!("{e}; counted as failed");
                None
            }
            None => None,
        };
        models.push(match pred {
            Some(boxes) => score_model(&boxes, &gt, opts.iou_thresh).with_id(id),
            None => ModelScore::failed(id, gt.len()),
        });
    }
    Ok(aggregate(models, opts.averaging, opts.failures))
}
