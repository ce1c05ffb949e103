//! Exact three-view line drawings of axis-aligned plank assemblies.
//!
//! View conventions (u, v are drawing coordinates):
//!
//! | view  | u | v | looking along | nearer  |
//! |-------|---|---|---------------|---------|
//! | front | x | z | +y            | small y |
//! | top   | x | y | -z            | large z |
//! | side  | y | z | -x            | large x |
//!
//! Every cuboid edge not parallel to the viewing direction is projected, the
//! projected segments are split against each other, and each atomic piece is
//! classified by testing its midpoint against the open footprint of every
//! cuboid whose near face is strictly nearer than the piece's depth. A piece
//! is visible if any coincident 3D edge is unoccluded. Collinear adjacent
//! pieces with equal visibility are merged.

mod io;

use serde::{Deserialize, Serialize};

use crate::geom::Aabb;
use crate::snap;

pub use io::{drawing_from_json, drawing_to_json, drawing_to_svg, DrawingJsonError};

/// Snap tolerance for arrangement events, normalized units.
pub const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    Front,
    Top,
    Side,
}

/// World axes of a view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ViewAxes {
    pub u: usize,
    pub v: usize,
    pub depth: usize,
    /// The viewer sits on the `max` side of the depth axis.
    pub near_is_max: bool,
}

impl View {
    pub const ALL: [View; 3] = [View::Front, View::Top, View::Side];

    pub fn axes(self) -> ViewAxes {
        match self {
            View::Front => ViewAxes { u: 0, v: 2, depth: 1, near_is_max: false },
            View::Top => ViewAxes { u: 0, v: 1, depth: 2, near_is_max: true },
            View::Side => ViewAxes { u: 1, v: 2, depth: 0, near_is_max: true },
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            View::Front => "front",
            View::Top => "top",
            View::Side => "side",
        }
    }
}

/// A drawing segment; `(x1, y1)` precedes `(x2, y2)` by x, then y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge2D {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub visible: bool,
}

impl Edge2D {
    /// Orders the endpoints; `None` for a zero-length segment.
    pub fn new(a: [f64; 2], b: [f64; 2], visible: bool) -> Option<Self> {
        let (p, q) = match a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])) {
            std::cmp::Ordering::Less => (a, b),
            std::cmp::Ordering::Greater => (b, a),
            std::cmp::Ordering::Equal => return None,
        };
        Some(Self { x1: p[0], y1: p[1], x2: q[0], y2: q[1], visible })
    }

    pub fn p1(&self) -> [f64; 2] {
        [self.x1, self.y1]
    }

    pub fn p2(&self) -> [f64; 2] {
        [self.x2, self.y2]
    }

    pub fn length(&self) -> f64 {
        (self.x2 - self.x1).hypot(self.y2 - self.y1)
    }

    /// Constant y.
    pub fn is_horizontal(&self) -> bool {
        self.y1 == self.y2
    }

    pub fn is_vertical(&self) -> bool {
        self.x1 == self.x2
    }

    fn sort_key(&self) -> [f64; 4] {
        [self.x1, self.x2, self.y1, self.y2]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewDrawing {
    pub view: View,
    pub edges: Vec<Edge2D>,
}

impl ViewDrawing {
    pub fn empty(view: View) -> Self {
        Self { view, edges: Vec::new() }
    }

    pub fn hidden_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.visible).count()
    }

    /// Deterministic edge order: `(x1, x2, y1, y2)`, visible first.
    pub fn sort(&mut self) {
        self.edges.sort_by(|a, b| {
            let (ka, kb) = (a.sort_key(), b.sort_key());
            ka.iter()
                .zip(kb.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.visible.cmp(&a.visible))
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrawingSet {
    pub front: ViewDrawing,
    pub top: ViewDrawing,
    pub side: ViewDrawing,
    pub scale_mm_per_unit: f64,
}

impl DrawingSet {
    pub fn empty() -> Self {
        Self {
            front: ViewDrawing::empty(View::Front),
            top: ViewDrawing::empty(View::Top),
            side: ViewDrawing::empty(View::Side),
            scale_mm_per_unit: 1.0,
        }
    }

    pub fn view(&self, v: View) -> &ViewDrawing {
        match v {
            View::Front => &self.front,
            View::Top => &self.top,
            View::Side => &self.side,
        }
    }

    pub fn view_mut(&mut self, v: View) -> &mut ViewDrawing {
        match v {
            View::Front => &mut self.front,
            View::Top => &mut self.top,
            View::Side => &mut self.side,
        }
    }

    pub fn views(&self) -> [&ViewDrawing; 3] {
        [&self.front, &self.top, &self.side]
    }

    pub fn count_edges(&self) -> usize {
        self.views().iter().map(|v| v.edges.len()).sum()
    }

    pub fn hidden_count(&self) -> usize {
        self.views().iter().map(|v| v.hidden_count()).sum()
    }

    /// Hidden edges over all edges; 0 for an empty drawing.
    pub fn hidden_fraction(&self) -> f64 {
        let n = self.count_edges();
        if n == 0 {
            0.0
        } else {
            self.hidden_count() as f64 / n as f64
        }
    }
}

pub fn count_edges(d: &DrawingSet) -> usize {
    d.count_edges()
}

pub fn hidden_fraction(d: &DrawingSet) -> f64 {
    d.hidden_fraction()
}

/// A projected 3D edge. `depth` grows away from the viewer.
#[derive(Debug, Clone, Copy)]
struct RawSegment {
    horizontal: bool,
    fixed: f64,
    lo: f64,
    hi: f64,
    depth: f64,
}

/// Open footprint of a cuboid and the depth of its near face.
#[derive(Debug, Clone, Copy)]
struct Occluder {
    u: [f64; 2],
    v: [f64; 2],
    near: f64,
}

fn view_primitives(planks: &[Aabb], view: View) -> (Vec<RawSegment>, Vec<Occluder>) {
    let ax = view.axes();
    let mut raws = Vec::with_capacity(8 * planks.len());
    let mut occ = Vec::with_capacity(planks.len());
    for p in planks {
        let (u0, u1) = (p.min[ax.u], p.max[ax.u]);
        let (v0, v1) = (p.min[ax.v], p.max[ax.v]);
        let (near, far) = if ax.near_is_max {
            (-p.max[ax.depth], -p.min[ax.depth])
        } else {
            (p.min[ax.depth], p.max[ax.depth])
        };
        for depth in [near, far] {
            for v in [v0, v1] {
                raws.push(RawSegment { horizontal: true, fixed: v, lo: u0, hi: u1, depth });
            }
            for u in [u0, u1] {
                raws.push(RawSegment { horizontal: false, fixed: u, lo: v0, hi: v1, depth });
            }
        }
        occ.push(Occluder { u: [u0, u1], v: [v0, v1], near });
    }
    (raws, occ)
}

fn occluded(occ: &[Occluder], u: f64, v: f64, depth: f64, tol: f64) -> bool {
    occ.iter().any(|o| {
        o.near < depth - tol && o.u[0] + tol < u && u < o.u[1] - tol && o.v[0] + tol < v && v < o.v[1] - tol
    })
}

/// Lines of one orientation, grouped by their fixed coordinate.
fn group_lines(raws: &[RawSegment], horizontal: bool, tol: f64) -> Vec<(f64, Vec<RawSegment>)> {
    let mut segs: Vec<RawSegment> = raws.iter().filter(|r| r.horizontal == horizontal && r.hi - r.lo > tol).copied().collect();
    segs.sort_by(|a, b| a.fixed.total_cmp(&b.fixed));
    let mut lines: Vec<(f64, Vec<RawSegment>)> = Vec::new();
    for s in segs {
        match lines.last_mut() {
            Some((f, group)) if s.fixed - *f <= tol => group.push(s),
            _ => lines.push((s.fixed, vec![s])),
        }
    }
    lines
}

fn arrange(raws: &[RawSegment], occ: &[Occluder], tol: f64) -> Vec<Edge2D> {
    let mut out = Vec::new();
    for horizontal in [true, false] {
        let crossing: Vec<&RawSegment> = raws.iter().filter(|r| r.horizontal != horizontal).collect();
        for (fixed, segs) in group_lines(raws, horizontal, tol) {
            let lo = segs.iter().map(|s| s.lo).fold(f64::INFINITY, f64::min);
            let hi = segs.iter().map(|s| s.hi).fold(f64::NEG_INFINITY, f64::max);
            let mut cuts: Vec<f64> = segs.iter().flat_map(|s| [s.lo, s.hi]).collect();
            cuts.extend(
                crossing
                    .iter()
                    .filter(|c| c.lo - tol <= fixed && fixed <= c.hi + tol && lo - tol <= c.fixed && c.fixed <= hi + tol)
                    .map(|c| c.fixed),
            );
            let cuts = snap::cluster(cuts, tol);

            // (start, end, visible) runs along the line.
            let mut runs: Vec<(f64, f64, bool)> = Vec::new();
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                let mid = 0.5 * (a + b);
                let mut covered = false;
                let mut visible = false;
                for s in segs.iter().filter(|s| s.lo <= a + tol && s.hi >= b - tol) {
                    covered = true;
                    let (u, v) = if horizontal { (mid, fixed) } else { (fixed, mid) };
                    if !occluded(occ, u, v, s.depth, tol) {
                        visible = true;
                        break;
                    }
                }
                if !covered {
                    continue;
                }
                match runs.last_mut() {
                    Some(last) if last.2 == visible && (a - last.1).abs() <= tol => last.1 = b,
                    _ => runs.push((a, b, visible)),
                }
            }
            for (a, b, visible) in runs {
                let (p, q) = if horizontal { ([a, fixed], [b, fixed]) } else { ([fixed, a], [fixed, b]) };
                out.extend(Edge2D::new(p, q, visible));
            }
        }
    }
    out
}

/// Drawing of one view.
pub fn project_view(planks: &[Aabb], view: View) -> ViewDrawing {
    let (raws, occ) = view_primitives(planks, view);
    let mut d = ViewDrawing { view, edges: arrange(&raws, &occ, SNAP_TOL) };
    d.sort();
    d
}

/// Three-view drawing of an assembly (bounding box excluded by the caller).
pub fn project(planks: &[Aabb]) -> DrawingSet {
    DrawingSet {
        front: project_view(planks, View::Front),
        top: project_view(planks, View::Top),
        side: project_view(planks, View::Side),
        scale_mm_per_unit: 1.0,
    }
}

/// Project a program's planks and carry its scale.
pub fn project_program(p: &crate::program::Program) -> Result<DrawingSet, crate::program::ProgramError> {
    let mut d = project(&p.resolve()?);
    d.scale_mm_per_unit = p.scale_mm_per_unit;
    Ok(d)
}
