//! Drawing corruption: random edge deletion or sliding, and visible-only
//! variants.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::projector::{DrawingSet, Edge2D, View};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Fraction of all edges (across views) that get corrupted.
    pub ratio: f64,
    pub delete_prob: f64,
    /// Endpoint shift bound as a fraction of the edge length.
    pub max_shift_frac: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { ratio: 0.0, delete_prob: 0.5, max_shift_frac: 0.1, seed: 0 }
    }
}

impl NoiseConfig {
    pub fn new(ratio: f64, seed: u64) -> Self {
        Self { ratio, seed, ..Self::default() }
    }

    pub fn deletion_only(ratio: f64, seed: u64) -> Self {
        Self { ratio, delete_prob: 1.0, seed, ..Self::default() }
    }

    /// Clamped copy; out-of-range fields are pulled into their valid range.
    pub fn sanitized(self) -> Self {
        Self {
            ratio: self.ratio.clamp(0.0, 1.0),
            delete_prob: self.delete_prob.clamp(0.0, 1.0),
            max_shift_frac: self.max_shift_frac.max(0.0),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NoiseReport {
    pub selected: usize,
    pub deleted: usize,
    pub shifted: usize,
    /// Shifted edges that collapsed and were removed.
    pub degenerate: usize,
}

/// Number of edges corrupted out of `n`.
pub fn selected_count(ratio: f64, n: usize) -> usize {
    ((ratio * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
}

pub fn inject_noise(d: &DrawingSet, c: &NoiseConfig) -> DrawingSet {
    inject_noise_with_report(d, c).0
}

pub fn inject_noise_with_report(d: &DrawingSet, c: &NoiseConfig) -> (DrawingSet, NoiseReport) {
    let c = c.sanitized();
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let flat: Vec<(View, usize)> =
        View::ALL.iter().flat_map(|&v| (0..d.view(v).edges.len()).map(move |i| (v, i))).collect();
    let k = selected_count(c.ratio, flat.len());
    let mut chosen = sample(&mut rng, flat.len(), k).into_vec();
    // Draw per-edge outcomes in a fixed order so the result depends only on the selected set.
    chosen.sort_unstable();

    let mut report = NoiseReport { selected: k, ..Default::default() };
    let mut replaced: Vec<Vec<Option<Option<Edge2D>>>> =
        View::ALL.iter().map(|&v| vec![None; d.view(v).edges.len()]).collect();
    for idx in chosen {
        let (view, i) = flat[idx];
        let e = d.view(view).edges[i];
        let outcome = if rng.random_bool(c.delete_prob) {
            report.deleted += 1;
            None
        } else {
            let shifted = slide(&e, c.max_shift_frac, &mut rng);
            if shifted.is_some() {
                report.shifted += 1;
            } else {
                report.degenerate += 1;
            }
            shifted
        };
        replaced[view.index()][i] = Some(outcome);
    }

    let mut out = d.clone();
    for view in View::ALL {
        let slots = &replaced[view.index()];
        out.view_mut(view).edges = d
            .view(view)
            .edges
            .iter()
            .zip(slots)
            .filter_map(|(e, slot)| match slot {
                None => Some(*e),
                Some(r) => *r,
            })
            .collect();
    }
    (out, report)
}

/// Move each endpoint along the edge direction; `None` when the result has
/// non-positive length or flips.
fn slide(e: &Edge2D, max_frac: f64, rng: &mut impl Rng) -> Option<Edge2D> {
    let len = e.length();
    let dir = [(e.x2 - e.x1) / len, (e.y2 - e.y1) / len];
    let bound = max_frac * len;
    let mut draw = || if bound > 0.0 { rng.random_range(-bound..=bound) } else { 0.0 };
    let (s1, s2) = (draw(), draw());
    if len + s2 - s1 <= 0.0 {
        return None;
    }
    let p = [e.x1 + dir[0] * s1, e.y1 + dir[1] * s1];
    let q = [e.x2 + dir[0] * s2, e.y2 + dir[1] * s2];
    // keep axis-aligned segments exactly axis-aligned
    let p = [if e.is_vertical() { e.x1 } else { p[0] }, if e.is_horizontal() { e.y1 } else { p[1] }];
    let q = [if e.is_vertical() { e.x2 } else { q[0] }, if e.is_horizontal() { e.y2 } else { q[1] }];
    Edge2D::new(p, q, e.visible)
}

/// Only the visible edges.
pub fn strip_hidden(d: &DrawingSet) -> DrawingSet {
    let mut out = d.clone();
    for view in View::ALL {
        out.view_mut(view).edges.retain(|e| e.visible);
    }
    out
}
