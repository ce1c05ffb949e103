//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use plankforge::geom::Aabb;
use plankforge::projector::{DrawingSet, Edge2D, View};
use plankforge::{parse_program, Program};
use rand::Rng;

pub const REFERENCE_CABINET: &str = include_str!("../fixtures/reference_cabinet.plank");

pub fn reference_cabinet() -> Program {
    parse_program(REFERENCE_CABINET).expect("fixture parses")
}

/// Length of the union of every cuboid outline segment in a view, computed
/// per carrier line from raw rectangle sides.
pub fn raw_union_length(planks: &[Aabb], view: View) -> f64 {
    let ax = view.axes();
    // (vertical?, line bits) -> intervals
    let mut lines: BTreeMap<(bool, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for b in planks {
        let (u0, u1, v0, v1) = (b.min[ax.u], b.max[ax.u], b.min[ax.v], b.max[ax.v]);
        for v in [v0, v1] {
            lines.entry((false, v.to_bits())).or_default().push((u0, u1));
        }
        for u in [u0, u1] {
            lines.entry((true, u.to_bits())).or_default().push((v0, v1));
        }
    }
    let mut total = 0.0;
    for (_, mut iv) in lines {
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (mut s, mut e) = iv[0];
        for &(a, b) in &iv[1..] {
            if a > e {
                total += e - s;
                s = a;
                e = b;
            } else {
                e = e.max(b);
            }
        }
        total += e - s;
    }
    total
}

pub fn drawn_length(d: &DrawingSet, view: View) -> f64 {
    d.view(view).edges.iter().map(Edge2D::length).sum()
}

/// Distinct coordinates along one drawing axis (0 = u, 1 = v).
pub fn breakpoints(d: &DrawingSet, view: View, slot: usize) -> Vec<f64> {
    let mut v: Vec<f64> = d
        .view(view)
        .edges
        .iter()
        .flat_map(|e| if slot == 0 { [e.x1, e.x2] } else { [e.y1, e.y2] })
        .collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Front/top share x, top/side share y, front/side share z.
pub fn views_consistent(d: &DrawingSet) -> bool {
    breakpoints(d, View::Front, 0) == breakpoints(d, View::Top, 0)
        && breakpoints(d, View::Top, 1) == breakpoints(d, View::Side, 0)
        && breakpoints(d, View::Front, 1) == breakpoints(d, View::Side, 1)
}

/// Edges present in exactly one of the two drawings.
pub fn edge_diff(a: &DrawingSet, b: &DrawingSet) -> usize {
    let key = |e: &Edge2D| (e.x1.to_bits(), e.y1.to_bits(), e.x2.to_bits(), e.y2.to_bits(), e.visible);
    let mut diff = 0;
    for v in View::ALL {
        let mut ka: Vec<_> = a.view(v).edges.iter().map(key).collect();
        let mut kb: Vec<_> = b.view(v).edges.iter().map(key).collect();
        ka.sort_unstable();
        kb.sort_unstable();
        diff += ka.iter().filter(|k| kb.binary_search(k).is_err()).count();
        diff += kb.iter().filter(|k| ka.binary_search(k).is_err()).count();
    }
    diff
}

/// Monte-Carlo IoU on an `m`³ grid over the pair's hull, one jittered sample
/// per cell.
pub fn voxel_iou(a: &Aabb, b: &Aabb, m: usize, rng: &mut impl Rng) -> f64 {
    let h = a.union_hull(b);
    let step: [f64; 3] = std::array::from_fn(|k| (h.max[k] - h.min[k]) / m as f64);
    let inside = |x: &Aabb, p: [f64; 3]| (0..3).all(|k| x.min[k] <= p[k] && p[k] < x.max[k]);
    let (mut inter, mut union) = (0u64, 0u64);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let p = [
                    h.min[0] + (i as f64 + rng.random::<f64>()) * step[0],
                    h.min[1] + (j as f64 + rng.random::<f64>()) * step[1],
                    h.min[2] + (k as f64 + rng.random::<f64>()) * step[2],
                ];
                let (ia, ib) = (inside(a, p), inside(b, p));
                inter += (ia && ib) as u64;
                union += (ia || ib) as u64;
            }
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn interval_iou(a: &Aabb, b: &Aabb) -> f64 {
    let mut inter = 1.0;
    for k in 0..3 {
        inter *= (a.max[k].min(b.max[k]) - a.min[k].max(b.min[k])).max(0.0);
    }
    let vol = |x: &Aabb| (0..3).map(|k| x.max[k] - x.min[k]).product::<f64>();
    inter / (vol(a) + vol(b) - inter)
}

/// Exhaustive maximum-IoU-sum matching; returns the kept `(pred, gt)` pairs.
pub fn brute_force_match(pred: &[Aabb], gt: &[Aabb], thresh: f64) -> Vec<(usize, usize)> {
    fn go(i: usize, w: &[Vec<f64>], used: &mut Vec<bool>, cur: &mut Vec<Option<usize>>, best: &mut (f64, Vec<Option<usize>>), sum: f64) {
        if i == w.len() {
            if sum > best.0 + 1e-12 {
                *best = (sum, cur.clone());
            }
            return;
        }
        // leaving a row unmatched only matters when rows outnumber columns
        if w.len() > used.len() {
            cur.push(None);
            go(i + 1, w, used, cur, best, sum);
            cur.pop();
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push(Some(j));
                go(i + 1, w, used, cur, best, sum + w[i][j]);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let w: Vec<Vec<f64>> = pred.iter().map(|p| gt.iter().map(|g| interval_iou(p, g)).collect()).collect();
    let mut best = (-1.0, Vec::new());
    go(0, &w, &mut vec![false; gt.len()], &mut Vec::new(), &mut best, 0.0);
    let mut pairs: Vec<(usize, usize)> = best
        .1
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (i, j)))
        .filter(|&(i, j)| w[i][j] > thresh)
        .collect();
    pairs.sort_unstable();
    pairs
}

pub fn random_box(rng: &mut impl Rng) -> Aabb {
    let lo: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..0.8));
    let hi: [f64; 3] = std::array::from_fn(|k| (lo[k] + rng.random_range(0.01..1.0)).min(1.0));
    Aabb::new(lo, hi)
}

/// A box that keeps most of `b` (for matching instances with real overlaps).
pub fn jitter_box(b: &Aabb, rng: &mut impl Rng, amount: f64) -> Aabb {
    let lo: [f64; 3] = std::array::from_fn(|k| b.min[k] + rng.random_range(-amount..amount) * b.extent(k));
    let hi: [f64; 3] = std::array::from_fn(|k| (b.max[k] + rng.random_range(-amount..amount) * b.extent(k)).max(lo[k] + 1e-3));
    Aabb::new(lo, hi)
}
