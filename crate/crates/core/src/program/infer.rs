//! Recover attachment structure from raw plank geometry.
//!
//! Each plank's two faces normal to its thickness axis are sidefaces, the
//! other four are endfaces. An endface attaches to a parallel, opposite-facing
//! sideface of another plank when the planes are within the threshold and the
//! face rectangles overlap with positive area. Any face lying on the matching
//! wall of the bounding box attaches to the box.

use super::{topo_order, CoordRef, Plank, Program, ProgramError, BBOX};
use crate::geom::{Aabb, Dof};

const OVERLAP_EPS: f64 = 1e-12;

fn faces_overlap(a: &Aabb, b: &Aabb, axis: usize) -> bool {
    (0..3).filter(|&k| k != axis).all(|k| a.max[k].min(b.max[k]) - a.min[k].max(b.min[k]) > OVERLAP_EPS)
}

/// Infer a program from resolved planks. `threshold` is in normalized units.
///
/// Planks are re-ordered topologically so every reference points backwards;
/// among ready planks the lowest input index goes first, so input that is
/// already consistent keeps its order.
pub fn infer_attachments(bbox: [f64; 6], planks: &[Aabb], threshold: f64) -> Result<Program, ProgramError> {
    let boxed = Aabb::from_coords(bbox);
    let thick: Vec<usize> = planks.iter().map(Aabb::thickness_axis).collect();
    // cuboid index = plank index + 1
    let mut coords: Vec<[CoordRef; 6]> = planks.iter().map(|p| p.coords().map(CoordRef::Literal)).collect();

    for (ai, a) in planks.iter().enumerate() {
        for dof in Dof::ALL {
            let axis = dof.axis();
            let value = a.get(dof);
            let mut best: Option<(f64, usize, Dof)> = None;
            let mut offer = |dist: f64, target: usize, tdof: Dof| {
                if dist <= threshold && best.is_none_or(|(bd, bt, _)| dist < bd || (dist == bd && target < bt)) {
                    best = Some((dist, target, tdof));
                }
            };
            offer((value - boxed.get(dof)).abs(), BBOX, dof);
            if axis != thick[ai] {
                for (bi, b) in planks.iter().enumerate() {
                    if bi == ai || thick[bi] != axis {
                        continue;
                    }
                    let tdof = dof.opposite();
                    if faces_overlap(a, b, axis) {
                        offer((value - b.get(tdof)).abs(), bi + 1, tdof);
                    }
                }
            }
            if let Some((_, target, tdof)) = best {
                coords[ai][dof.index()] = CoordRef::Attach { plank: target, dof: tdof };
            }
        }
    }

    let mut deps = vec![Vec::new(); planks.len() + 1];
    for (i, cs) in coords.iter().enumerate() {
        for c in cs {
            if let CoordRef::Attach { plank, .. } = *c {
                if plank != BBOX && !deps[i + 1].contains(&plank) {
                    deps[i + 1].push(plank);
                }
            }
        }
    }
    let order = topo_order(&deps, |a, b| a.cmp(&b))?;
    let raw = Program {
        scale_mm_per_unit: 1.0,
        bbox,
        planks: coords.into_iter().map(|coords| Plank { coords }).collect(),
    };
    Ok(raw.reordered(&order))
}

/// As [`infer_attachments`], with the threshold given in millimetres.
pub fn infer_attachments_mm(
    bbox: [f64; 6],
    planks: &[Aabb],
    scale_mm_per_unit: f64,
    threshold_mm: f64,
) -> Result<Program, ProgramError> {
    let mut p = infer_attachments(bbox, planks, threshold_mm / scale_mm_per_unit)?;
    p.scale_mm_per_unit = scale_mm_per_unit;
    Ok(p)
}
