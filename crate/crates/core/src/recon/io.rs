//! Solution JSON: `{"status": "Verified", "blocks": [[x0,y0,z0,x1,y1,z1], ...]}`.
//!
//! A block that is not a single box is written as its box partition, so
//! `blocks` lists boxes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ReconSolution, ReconStatus};
use crate::geom::Aabb;

#[derive(Debug, Error)]
pub enum SolutionJsonError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("box {0} has non-positive volume")]
    Degenerate(usize),
}

#[derive(Serialize, Deserialize)]
struct SolutionJson {
    status: ReconStatus,
    blocks: Vec<[f64; 6]>,
}

pub fn solution_to_json(s: &ReconSolution) -> serde_json::Value {
    let doc = SolutionJson { status: s.status, blocks: s.boxes().iter().map(Aabb::coords).collect() };
    serde_json::to_value(doc).expect("solution JSON is always serializable")
}

pub fn solution_from_json(v: &serde_json::Value) -> Result<(ReconStatus, Vec<Aabb>), SolutionJsonError> {
    let doc = SolutionJson::deserialize(v)?;
    let boxes: Vec<Aabb> = doc.blocks.into_iter().map(Aabb::from_coords).collect();
    if let Some(i) = boxes.iter().position(|b| !b.is_positive()) {
        return Err(SolutionJsonError::Degenerate(i));
    }
    Ok((doc.status, boxes))
}
