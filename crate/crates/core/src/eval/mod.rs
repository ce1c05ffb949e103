//! Plank-set scoring: IoU, Hungarian matching and precision/recall/F1.

mod manifest;

use serde::{Deserialize, Serialize};

use crate::geom::Aabb;

pub use manifest::{
    evaluate_dirs, plank_ids, read_manifest, read_plank_boxes, read_prediction, write_manifest, EntryStatus, EvalIoError,
    EvalManifest, EvalOptions, ManifestEntry, MANIFEST_FILE, MANIFEST_VERSION,
};

pub const DEFAULT_IOU_THRESH: f64 = 0.5;

/// Intersection over union of two boxes; 0 when the union is empty.
pub fn iou(a: &Aabb, b: &Aabb) -> f64 {
    let inter = a.intersection_volume(b);
    let union = a.volume().max(0.0) + b.volume().max(0.0) - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

/// Minimum-cost assignment of every row to a distinct column; needs
/// `rows <= cols`. Returns the column of each row.
fn hungarian(cost: &[Vec<f64>], cols: usize) -> Vec<usize> {
    let n = cost.len();
    let m = cols;
    debug_assert!(n <= m);
    // 1-based potentials; p[j] is the row assigned to column j.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![usize::MAX; n];
    for j in 1..=m {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub pred: usize,
    pub gt: usize,
    pub iou: f64,
}

/// Maximum total-IoU matching; pairs at or below `thresh` are discarded.
pub fn match_planks(pred: &[Aabb], gt: &[Aabb], thresh: f64) -> Vec<MatchedPair> {
    if pred.is_empty() || gt.is_empty() {
        return Vec::new();
    }
    let transpose = pred.len() > gt.len();
    let (rows, cols) = if transpose { (gt, pred) } else { (pred, gt) };
    let cost: Vec<Vec<f64>> = rows.iter().map(|r| cols.iter().map(|c| -iou(r, c)).collect()).collect();
    let assignment = hungarian(&cost, cols.len());
    let mut pairs: Vec<MatchedPair> = assignment
        .into_iter()
        .enumerate()
        .map(|(r, c)| {
            let (p, g) = if transpose { (c, r) } else { (r, c) };
            MatchedPair { pred: p, gt: g, iou: -cost[r][c] }
        })
        .filter(|m| m.iou > thresh)
        .collect();
    pairs.sort_by_key(|m| m.pred);
    pairs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub const ZERO: Prf = Prf { precision: 0.0, recall: 0.0, f1: 0.0 };

    pub fn from_counts(tp: usize, n_pred: usize, n_gt: usize) -> Prf {
        let ratio = |n: usize| {
            if n == 0 {
                if n_pred == 0 && n_gt == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                tp as f64 / n as f64
            }
        };
        let (p, r) = (ratio(n_pred), ratio(n_gt));
        let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        Prf { precision: p, recall: r, f1 }
    }
}

pub fn prf(pred: &[Aabb], gt: &[Aabb], thresh: f64) -> Prf {
    score_model(pred, gt, thresh).prf
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub id: String,
    /// False for NoMatch / Timeout reconstructions.
    pub succeeded: bool,
    pub n_pred: usize,
    pub n_gt: usize,
    pub tp: usize,
    pub prf: Prf,
    pub pairs: Vec<MatchedPair>,
}

pub fn score_model(pred: &[Aabb], gt: &[Aabb], thresh: f64) -> ModelScore {
    let pairs = match_planks(pred, gt, thresh);
    let tp = pairs.len();
    ModelScore {
        id: String::new(),
        succeeded: true,
        n_pred: pred.len(),
        n_gt: gt.len(),
        tp,
        prf: Prf::from_counts(tp, pred.len(), gt.len()),
        pairs,
    }
}

impl ModelScore {
    /// Score of a reconstruction that produced no usable output.
    pub fn failed(id: impl Into<String>, n_gt: usize) -> Self {
        Self { id: id.into(), succeeded: false, n_pred: 0, n_gt, tp: 0, prf: Prf::ZERO, pairs: Vec::new() }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Mean of per-model scores.
    #[default]
    Macro,
    /// Scores from pooled TP / prediction / ground-truth counts.
    Micro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailurePolicy {
    /// Failed models count as P = R = F1 = 0.
    #[default]
    Zero,
    /// Failed models are left out.
    Exclude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub averaging: Averaging,
    pub failures: FailurePolicy,
    pub n_models: usize,
    pub n_failed: usize,
    pub mean: Prf,
    pub models: Vec<ModelScore>,
}

pub fn aggregate(models: Vec<ModelScore>, averaging: Averaging, failures: FailurePolicy) -> MatchReport {
    let counted: Vec<&ModelScore> =
        models.iter().filter(|m| m.succeeded || failures == FailurePolicy::Zero).collect();
    let mean = if counted.is_empty() {
        Prf::ZERO
    } else {
        match averaging {
            Averaging::Macro => {
                let n = counted.len() as f64;
                let sum = |f: fn(&Prf) -> f64| counted.iter().map(|m| f(&m.prf)).sum::<f64>() / n;
                Prf { precision: sum(|p| p.precision), recall: sum(|p| p.recall), f1: sum(|p| p.f1) }
            }
            Averaging::Micro => {
                let tp = counted.iter().map(|m| m.tp).sum();
                let np = counted.iter().map(|m| m.n_pred).sum();
                let ng = counted.iter().map(|m| m.n_gt).sum();
                Prf::from_counts(tp, np, ng)
            }
        }
    };
    MatchReport {
        averaging,
        failures,
        n_models: models.len(),
        n_failed: models.iter().filter(|m| !m.succeeded).count(),
        mean,
        models,
    }
}

impl MatchReport {
    /// Fixed-width table, one row per model plus the mean.
    pub fn table(&self) -> String {
        let mut s = format!("{:<24} {:>6} {:>6} {:>4} {:>9} {:>9} {:>9}\n", "model", "pred", "gt", "tp", "precision", "recall", "f1");
        for m in &self.models {
            let id = if m.succeeded { m.id.clone() } else { format!("{} (failed)", m.id) };
            s += &format!(
                "{:<24} {:>6} {:>6} {:>4} {:>9.4} {:>9.4} {:>9.4}\n",
                id, m.n_pred, m.n_gt, m.tp, m.prf.precision, m.prf.recall, m.prf.f1
            );
        }
        s += &format!(
            "{:<24} {:>6} {:>6} {:>4} {:>9.4} {:>9.4} {:>9.4}\n",
            format!("mean ({:?})", self.averaging).to_lowercase(),
            "",
            "",
            "",
            self.mean.precision,
            self.mean.recall,
            self.mean.f1
        );
        s
    }
}
