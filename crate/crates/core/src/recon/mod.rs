//! Classical three-view reconstruction: 2D nodes to 3D vertices, edges,
//! faces and closed blocks, then a block subset chosen by re-projection.
//!
//! All stages work on an index frame: the drawing coordinates of each world
//! axis are clustered (tolerance half a quantization bin) and every vertex,
//! edge, face and block is expressed in cluster indices.

mod io;
mod search;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::geom::Aabb;
use crate::projector::{DrawingSet, View};
use crate::snap;

pub use io::{solution_from_json, solution_to_json, SolutionJsonError};
pub use search::{group_blocks, union_all, verify_search, ReconSolution, ReconStatus, SearchConfig};

/// Half of one quantization bin.
pub const DEFAULT_SNAP_TOL: f64 = 1.0 / 511.0;

/// Sorted coordinate representatives per world axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub coords: [Vec<f64>; 3],
    pub tol: f64,
}

impl Frame {
    pub fn from_drawing(d: &DrawingSet, tol: f64) -> Frame {
        let mut values: [Vec<f64>; 3] = Default::default();
        for v in d.views() {
            let ax = v.view.axes();
            for e in &v.edges {
                values[ax.u].extend([e.x1, e.x2]);
                values[ax.v].extend([e.y1, e.y2]);
            }
        }
        Frame { coords: values.map(|v| snap::cluster(v, tol)), tol }
    }

    pub fn len(&self, axis: usize) -> usize {
        self.coords[axis].len()
    }

    pub fn index(&self, axis: usize, x: f64) -> Option<usize> {
        snap::lookup(&self.coords[axis], x, self.tol)
    }

    pub fn point(&self, idx: [usize; 3]) -> [f64; 3] {
        std::array::from_fn(|a| self.coords[a][idx[a]])
    }

    pub fn box_of(&self, lo: [usize; 3], hi: [usize; 3]) -> Aabb {
        Aabb::new(self.point(lo), self.point(hi))
    }

    fn cells(&self, axis: usize) -> usize {
        self.len(axis).saturating_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Orient {
    /// Constant v, runs along u.
    H,
    /// Constant u, runs along v.
    V,
}

/// Flattened ids of unit intervals between adjacent frame coordinates on
/// every drawing line of every view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitLayout {
    n: [usize; 3],
    offsets: [usize; 7],
}

impl UnitLayout {
    fn new(frame: &Frame) -> Self {
        let n = [frame.len(0), frame.len(1), frame.len(2)];
        let mut offsets = [0; 7];
        for view in View::ALL {
            let ax = view.axes();
            for (o, orient) in [Orient::H, Orient::V].into_iter().enumerate() {
                let k = 2 * view.index() + o;
                let (lines, units) = Self::dims_of(n, ax.u, ax.v, orient);
                offsets[k + 1] = offsets[k] + lines * units;
            }
        }
        Self { n, offsets }
    }

    fn dims_of(n: [usize; 3], u: usize, v: usize, orient: Orient) -> (usize, usize) {
        match orient {
            Orient::H => (n[v], n[u].saturating_sub(1)),
            Orient::V => (n[u], n[v].saturating_sub(1)),
        }
    }

    fn dims(&self, view: View, orient: Orient) -> (usize, usize) {
        let ax = view.axes();
        Self::dims_of(self.n, ax.u, ax.v, orient)
    }

    fn id(&self, view: View, orient: Orient, line: usize, unit: usize) -> usize {
        let k = 2 * view.index() + if orient == Orient::H { 0 } else { 1 };
        let (_, units) = self.dims(view, orient);
        self.offsets[k] + line * units + unit
    }

    pub fn len(&self) -> usize {
        self.offsets[6]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Per-unit drawing state: 0 absent, 1 hidden, 2 visible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitStates {
    pub layout: UnitLayout,
    pub state: Vec<u8>,
    /// Edges that could not be mapped onto the frame (off-frame endpoints
    /// or not axis-aligned).
    pub stray: usize,
}

#[derive(Debug, Clone, Copy)]
struct Seg {
    line: usize,
    lo: usize,
    hi: usize,
}

impl UnitStates {
    fn build(frame: &Frame, d: &DrawingSet) -> (Self, [[Vec<Seg>; 2]; 3]) {
        let layout = UnitLayout::new(frame);
        let mut state = vec![0u8; layout.len()];
        let mut stray = 0;
        let mut segs: [[Vec<Seg>; 2]; 3] = Default::default();
        for v in d.views() {
            let ax = v.view.axes();
            for e in &v.edges {
                let idx = (frame.index(ax.u, e.x1), frame.index(ax.v, e.y1), frame.index(ax.u, e.x2), frame.index(ax.v, e.y2));
                let (Some(u1), Some(v1), Some(u2), Some(v2)) = idx else {
                    stray += 1;
                    continue;
                };
                let (orient, seg) = if v1 == v2 && u1 != u2 {
                    (Orient::H, Seg { line: v1, lo: u1.min(u2), hi: u1.max(u2) })
                } else if u1 == u2 && v1 != v2 {
                    (Orient::V, Seg { line: u1, lo: v1.min(v2), hi: v1.max(v2) })
                } else {
                    if u1 != u2 || v1 != v2 {
                        stray += 1;
                    }
                    continue;
                };
                let s = if e.visible { 2 } else { 1 };
                for unit in seg.lo..seg.hi {
                    let id = layout.id(v.view, orient, seg.line, unit);
                    state[id] = state[id].max(s);
                }
                segs[v.view.index()][if orient == Orient::H { 0 } else { 1 }].push(seg);
            }
        }
        (Self { layout, state, stray }, segs)
    }

    pub fn from_drawing(frame: &Frame, d: &DrawingSet) -> Self {
        Self::build(frame, d).0
    }

    fn covered(&self, view: View, orient: Orient, line: usize, lo: usize, hi: usize) -> bool {
        (lo..hi).all(|u| self.state[self.layout.id(view, orient, line, u)] > 0)
    }

    /// Units covered by the outline of the index box `lo..hi` in every view.
    pub(crate) fn box_units(&self, lo: [usize; 3], hi: [usize; 3], out: &mut Vec<usize>) {
        for view in View::ALL {
            let ax = view.axes();
            for line in [lo[ax.v], hi[ax.v]] {
                out.extend((lo[ax.u]..hi[ax.u]).map(|u| self.layout.id(view, Orient::H, line, u)));
            }
            for line in [lo[ax.u], hi[ax.u]] {
                out.extend((lo[ax.v]..hi[ax.v]).map(|u| self.layout.id(view, Orient::V, line, u)));
            }
        }
    }
}

/// A drawing mapped onto its frame.
#[derive(Debug, Clone)]
pub struct IndexedDrawing {
    pub frame: Frame,
    pub states: UnitStates,
    /// Per view, (u, v) index pairs of segment endpoints and crossings.
    pub nodes: [HashSet<(usize, usize)>; 3],
}

impl IndexedDrawing {
    pub fn new(d: &DrawingSet, tol: f64) -> Self {
        let frame = Frame::from_drawing(d, tol);
        let (states, segs) = UnitStates::build(&frame, d);
        let nodes = std::array::from_fn(|vi| {
            let [h, v] = &segs[vi];
            let mut n = HashSet::new();
            for s in h {
                n.insert((s.lo, s.line));
                n.insert((s.hi, s.line));
            }
            for s in v {
                n.insert((s.line, s.lo));
                n.insert((s.line, s.hi));
            }
            for a in h {
                for b in v {
                    if (a.lo..=a.hi).contains(&b.line) && (b.lo..=b.hi).contains(&a.line) {
                        n.insert((b.line, a.line));
                    }
                }
            }
            n
        });
        Self { frame, states, nodes }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateVertex {
    pub idx: [usize; 3],
    pub position: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateEdge {
    /// Vertex ids, `a` below `b` along `axis`.
    pub a: usize,
    pub b: usize,
    pub axis: usize,
    pub from: [usize; 3],
    pub to: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateFace {
    /// Plane normal axis and offset index.
    pub normal: usize,
    pub offset: usize,
    /// 2D cells in the plane, indexed along the two remaining axes in
    /// ascending axis order.
    pub cells: Vec<[usize; 2]>,
    /// Candidate edges on the face boundary.
    pub boundary: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateBlock {
    /// Index-space boxes partitioning the block.
    pub index_boxes: Vec<([usize; 3], [usize; 3])>,
    pub boxes: Vec<Aabb>,
    pub hull: Aabb,
    pub volume: f64,
    /// Candidate faces bounding the block.
    pub faces: Vec<usize>,
}

/// 3D vertex at `(x, y, z)` iff front has node `(x, z)`, top `(x, y)` and
/// side `(y, z)`.
pub fn gen_vertices(ix: &IndexedDrawing) -> Vec<CandidateVertex> {
    let [front, top, side] = &ix.nodes;
    let mut top_by_x: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(x, y) in top {
        top_by_x.entry(x).or_default().push(y);
    }
    let mut out: Vec<[usize; 3]> = Vec::new();
    for &(x, z) in front {
        for &y in top_by_x.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
            if side.contains(&(y, z)) {
                out.push([x, y, z]);
            }
        }
    }
    out.sort_unstable();
    out.into_iter().map(|idx| CandidateVertex { idx, position: ix.frame.point(idx) }).collect()
}

fn segment_covered(ix: &IndexedDrawing, axis: usize, at: [usize; 3], lo: usize, hi: usize) -> bool {
    View::ALL.iter().all(|&view| {
        let ax = view.axes();
        if axis == ax.u {
            ix.states.covered(view, Orient::H, at[ax.v], lo, hi)
        } else if axis == ax.v {
            ix.states.covered(view, Orient::V, at[ax.u], lo, hi)
        } else {
            true
        }
    })
}

/// Minimal axis-aligned edges between consecutive collinear vertices whose
/// projections are covered in every view.
pub fn gen_edges(ix: &IndexedDrawing, vs: &[CandidateVertex]) -> Vec<CandidateEdge> {
    let mut out = Vec::new();
    for axis in 0..3 {
        let mut lines: HashMap<[usize; 3], Vec<(usize, usize)>> = HashMap::new();
        for (id, v) in vs.iter().enumerate() {
            let mut key = v.idx;
            key[axis] = usize::MAX;
            lines.entry(key).or_default().push((v.idx[axis], id));
        }
        let mut keys: Vec<_> = lines.keys().copied().collect();
        keys.sort_unstable();
        for key in keys {
            let mut pts = lines.remove(&key).unwrap();
            pts.sort_unstable();
            for w in pts.windows(2) {
                let ((lo, a), (hi, b)) = (w[0], w[1]);
                if segment_covered(ix, axis, vs[a].idx, lo, hi) {
                    out.push(CandidateEdge { a, b, axis, from: vs[a].idx, to: vs[b].idx });
                }
            }
        }
    }
    out
}

fn plane_axes(n: usize) -> (usize, usize) {
    match n {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Walls of one plane: along-p walls indexed `[q_line][p_cell]`, along-q
/// walls `[p_line][q_cell]`.
struct PlaneWalls {
    cp: usize,
    cq: usize,
    along_p: Vec<bool>,
    along_q: Vec<bool>,
    edges: Vec<usize>,
}

impl PlaneWalls {
    fn new(cp: usize, cq: usize) -> Self {
        Self { cp, cq, along_p: vec![false; (cq + 1) * cp], along_q: vec![false; (cp + 1) * cq], edges: Vec::new() }
    }

    /// Neighbours of a cell: `Some(Some(cell))` inside, `Some(None)` escaping
    /// through an open border, `None` blocked.
    fn step(&self, (i, j): (usize, usize), dir: usize) -> Option<Option<(usize, usize)>> {
        let (line_blocked, next) = match dir {
            0 => (self.along_q[i * self.cq + j], i.checked_sub(1).map(|i| (i, j))),
            1 => (self.along_q[(i + 1) * self.cq + j], (i + 1 < self.cp).then_some((i + 1, j))),
            2 => (self.along_p[j * self.cp + i], j.checked_sub(1).map(|j| (i, j))),
            _ => (self.along_p[(j + 1) * self.cp + i], (j + 1 < self.cq).then_some((i, j + 1))),
        };
        if line_blocked {
            None
        } else {
            Some(next)
        }
    }
}

/// Bounded regions of every plane's edge arrangement.
pub fn gen_faces(frame: &Frame, es: &[CandidateEdge]) -> Vec<CandidateFace> {
    let mut planes: HashMap<(usize, usize), PlaneWalls> = HashMap::new();
    for (id, e) in es.iter().enumerate() {
        for n in (0..3).filter(|&n| n != e.axis) {
            let (p, q) = plane_axes(n);
            let w = planes.entry((n, e.from[n])).or_insert_with(|| PlaneWalls::new(frame.cells(p), frame.cells(q)));
            w.edges.push(id);
            let (lo, hi) = (e.from[e.axis], e.to[e.axis]);
            if e.axis == p {
                let line = e.from[q];
                for i in lo..hi {
                    w.along_p[line * w.cp + i] = true;
                }
            } else {
                let line = e.from[p];
                for j in lo..hi {
                    w.along_q[line * w.cq + j] = true;
                }
            }
        }
    }
    let mut keys: Vec<_> = planes.keys().copied().collect();
    keys.sort_unstable();
    let mut faces = Vec::new();
    for key in keys {
        let w = &planes[&key];
        if w.edges.len() < 4 || w.cp == 0 || w.cq == 0 {
            continue;
        }
        let mut comp = vec![usize::MAX; w.cp * w.cq];
        let mut next_comp = 0;
        for start in 0..comp.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![(start / w.cq, start % w.cq)];
            comp[start] = next_comp;
            let mut cells = Vec::new();
            let mut bounded = true;
            while let Some(c) = stack.pop() {
                cells.push([c.0, c.1]);
                for dir in 0..4 {
                    match w.step(c, dir) {
                        None => {}
                        Some(None) => bounded = false,
                        Some(Some(n)) => {
                            let k = n.0 * w.cq + n.1;
                            if comp[k] == usize::MAX {
                                comp[k] = next_comp;
                                stack.push(n);
                            }
                        }
                    }
                }
            }
            if bounded {
                cells.sort_unstable();
                let boundary = face_boundary(key.0, w, &comp, next_comp, es);
                faces.push(CandidateFace { normal: key.0, offset: key.1, cells, boundary });
            }
            next_comp += 1;
        }
    }
    faces
}

fn face_boundary(n: usize, w: &PlaneWalls, comp: &[usize], id: usize, es: &[CandidateEdge]) -> Vec<usize> {
    let (p, q) = plane_axes(n);
    let inside = |i: Option<usize>, j: Option<usize>| match (i, j) {
        (Some(i), Some(j)) if i < w.cp && j < w.cq => comp[i * w.cq + j] == id,
        _ => false,
    };
    w.edges
        .iter()
        .copied()
        .filter(|&e| {
            let e = &es[e];
            let (lo, hi) = (e.from[e.axis], e.to[e.axis]);
            (lo..hi).any(|k| {
                let (a, b) = if e.axis == p {
                    let line = e.from[q];
                    (inside(Some(k), line.checked_sub(1)), inside(Some(k), Some(line)))
                } else {
                    let line = e.from[p];
                    (inside(line.checked_sub(1), Some(k)), inside(Some(line), Some(k)))
                };
                a != b
            })
        })
        .collect()
}

/// Closed 3D regions: grid cells flood-filled across boundaries that no
/// candidate face covers; regions that cannot escape the grid are blocks.
pub fn gen_blocks(frame: &Frame, fs: &[CandidateFace]) -> Vec<CandidateBlock> {
    let c = [frame.cells(0), frame.cells(1), frame.cells(2)];
    if c.contains(&0) {
        return Vec::new();
    }
    // face id + 1 covering each 2D cell of a plane
    let mut cover: HashMap<(usize, usize), Vec<u32>> = HashMap::new();
    for (fid, f) in fs.iter().enumerate() {
        let (_, q) = plane_axes(f.normal);
        let cq = c[q];
        let grid = cover.entry((f.normal, f.offset)).or_insert_with(|| {
            let (p, q) = plane_axes(f.normal);
            vec![0; c[p] * c[q]]
        });
        for &[i, j] in &f.cells {
            grid[i * cq + j] = fid as u32 + 1;
        }
    }
    let face_at = |n: usize, plane: usize, cell: [usize; 3]| -> u32 {
        let (p, q) = plane_axes(n);
        cover.get(&(n, plane)).map_or(0, |g| g[cell[p] * c[q] + cell[q]])
    };
    let flat = |x: [usize; 3]| (x[0] * c[1] + x[1]) * c[2] + x[2];
    let mut comp = vec![u32::MAX; c[0] * c[1] * c[2]];
    let mut blocks = Vec::new();
    let mut next = 0u32;
    for x in 0..c[0] {
        for y in 0..c[1] {
            for z in 0..c[2] {
                if comp[flat([x, y, z])] != u32::MAX {
                    continue;
                }
                comp[flat([x, y, z])] = next;
                let mut stack = vec![[x, y, z]];
                let mut cells = Vec::new();
                let mut faces = HashSet::new();
                let mut bounded = true;
                while let Some(cell) = stack.pop() {
                    cells.push(cell);
                    for n in 0..3 {
                        for up in [false, true] {
                            let plane = if up { cell[n] + 1 } else { cell[n] };
                            let f = face_at(n, plane, cell);
                            if f != 0 {
                                faces.insert(f - 1);
                                continue;
                            }
                            let mut nb = cell;
                            if up {
                                if cell[n] + 1 == c[n] {
                                    bounded = false;
                                    continue;
                                }
                                nb[n] += 1;
                            } else {
                                if cell[n] == 0 {
                                    bounded = false;
                                    continue;
                                }
                                nb[n] -= 1;
                            }
                            let k = flat(nb);
                            if comp[k] == u32::MAX {
                                comp[k] = next;
                                stack.push(nb);
                            }
                        }
                    }
                }
                if bounded {
                    blocks.push(make_block(frame, cells, faces));
                }
                next += 1;
            }
        }
    }
    blocks
}

fn make_block(frame: &Frame, cells: Vec<[usize; 3]>, faces: HashSet<u32>) -> CandidateBlock {
    let index_boxes = decompose(&cells);
    let boxes: Vec<Aabb> = index_boxes.iter().map(|&(lo, hi)| frame.box_of(lo, hi)).collect();
    let hull = Aabb::hull(&boxes).expect("blocks have at least one cell");
    let volume = boxes.iter().map(Aabb::volume).sum();
    let mut faces: Vec<usize> = faces.into_iter().map(|f| f as usize).collect();
    faces.sort_unstable();
    CandidateBlock { index_boxes, boxes, hull, volume, faces }
}

/// Greedy partition of a cell set into index boxes (x runs, then y, then z).
fn decompose(cells: &[[usize; 3]]) -> Vec<([usize; 3], [usize; 3])> {
    let lo: [usize; 3] = std::array::from_fn(|a| cells.iter().map(|c| c[a]).min().unwrap());
    let hi: [usize; 3] = std::array::from_fn(|a| cells.iter().map(|c| c[a]).max().unwrap() + 1);
    let d = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
    let at = |x: usize, y: usize, z: usize| (z * d[1] + y) * d[0] + x;
    let mut left = vec![false; d[0] * d[1] * d[2]];
    for c in cells {
        left[at(c[0] - lo[0], c[1] - lo[1], c[2] - lo[2])] = true;
    }
    let mut out = Vec::new();
    for z in 0..d[2] {
        for y in 0..d[1] {
            for x in 0..d[0] {
                if !left[at(x, y, z)] {
                    continue;
                }
                let mut x1 = x + 1;
                while x1 < d[0] && left[at(x1, y, z)] {
                    x1 += 1;
                }
                let row = |y: usize, z: usize, left: &[bool]| (x..x1).all(|xx| left[at(xx, y, z)]);
                let mut y1 = y + 1;
                while y1 < d[1] && row(y1, z, &left) {
                    y1 += 1;
                }
                let mut z1 = z + 1;
                while z1 < d[2] && (y..y1).all(|yy| row(yy, z1, &left)) {
                    z1 += 1;
                }
                for zz in z..z1 {
                    for yy in y..y1 {
                        for xx in x..x1 {
                            left[at(xx, yy, zz)] = false;
                        }
                    }
                }
                out.push(([lo[0] + x, lo[1] + y, lo[2] + z], [lo[0] + x1, lo[1] + y1, lo[2] + z1]));
            }
        }
    }
    out
}

/// All candidate stages for one drawing.
#[derive(Debug, Clone)]
pub struct Candidates {
    pub indexed: IndexedDrawing,
    pub vertices: Vec<CandidateVertex>,
    pub edges: Vec<CandidateEdge>,
    pub faces: Vec<CandidateFace>,
    pub blocks: Vec<CandidateBlock>,
}

impl Candidates {
    pub fn new(d: &DrawingSet, tol: f64) -> Self {
        let indexed = IndexedDrawing::new(d, tol);
        let vertices = gen_vertices(&indexed);
        let edges = gen_edges(&indexed, &vertices);
        let faces = gen_faces(&indexed.frame, &edges);
        let blocks = gen_blocks(&indexed.frame, &faces);
        Self { indexed, vertices, edges, faces, blocks }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projector::{project, Edge2D};

    fn cand(planks: &[Aabb]) -> Candidates {
        Candidates::new(&project(planks), DEFAULT_SNAP_TOL)
    }

    fn cube() -> Aabb {
        Aabb::from_coords([-0.5, -0.25, -0.75, 0.5, 0.25, 0.75])
    }

    #[test]
    fn single_cuboid_counts() {
        let c = cand(&[cube()]);
        assert_eq!(c.vertices.len(), 8);
        assert_eq!(c.edges.len(), 12);
        assert_eq!(c.faces.len(), 6);
        assert_eq!(c.blocks.len(), 1);
        assert_eq!(c.blocks[0].boxes, vec![cube()]);
        assert_eq!(c.blocks[0].faces.len(), 6);
        assert!(c.faces.iter().all(|f| f.boundary.len() == 4));
    }

    #[test]
    fn empty_front_view_has_no_vertices() {
        let mut d = project(&[cube()]);
        d.front.edges.clear();
        let ix = IndexedDrawing::new(&d, DEFAULT_SNAP_TOL);
        assert!(gen_vertices(&ix).is_empty());
    }

    #[test]
    fn two_disjoint_cuboids() {
        // separated along the diagonal so no projection overlaps
        let a = Aabb::from_coords([-0.9, -0.9, -0.9, -0.5, -0.5, -0.5]);
        let b = Aabb::from_coords([0.2, 0.3, 0.4, 0.6, 0.7, 0.8]);
        let c = cand(&[a, b]);
        assert_eq!(c.vertices.len(), 16);
        assert_eq!(c.edges.len(), 24);
        assert_eq!(c.blocks.len(), 2);
    }

    #[test]
    fn window_pane_has_four_faces() {
        let edges: Vec<CandidateEdge> = {
            // 3x3 vertex lattice in the plane z = 0 of a 3x3x1 frame
            let mut es = Vec::new();
            for j in 0..3 {
                for i in 0..2 {
                    es.push(CandidateEdge { a: 0, b: 0, axis: 0, from: [i, j, 0], to: [i + 1, j, 0] });
                    es.push(CandidateEdge { a: 0, b: 0, axis: 1, from: [j, i, 0], to: [j, i + 1, 0] });
                }
            }
            es
        };
        assert_eq!(edges.len(), 12);
        let frame = Frame { coords: [vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0], vec![0.0, 1.0]], tol: 1e-9 };
        let faces = gen_faces(&frame, &edges);
        assert_eq!(faces.len(), 4);
        assert!(faces.iter().all(|f| f.cells.len() == 1 && f.boundary.len() == 4));
    }

    #[test]
    fn open_loop_has_no_face() {
        let edges = vec![
            CandidateEdge { a: 0, b: 0, axis: 0, from: [0, 0, 0], to: [1, 0, 0] },
            CandidateEdge { a: 0, b: 0, axis: 1, from: [1, 0, 0], to: [1, 1, 0] },
            CandidateEdge { a: 0, b: 0, axis: 0, from: [0, 1, 0], to: [1, 1, 0] },
            CandidateEdge { a: 0, b: 0, axis: 0, from: [0, 2, 0], to: [1, 2, 0] },
        ];
        let frame = Frame { coords: [vec![0.0, 1.0], vec![0.0, 1.0, 2.0], vec![0.0, 1.0]], tol: 1e-9 };
        assert!(gen_faces(&frame, &edges).is_empty());
    }

    #[test]
    fn vertices_match_cross_product_oracle() {
        let p = crate::program::parse_program(crate::program::fixtures::REFERENCE_CABINET).unwrap();
        let d = crate::projector::project_program(&p).unwrap();
        let ix = IndexedDrawing::new(&d, DEFAULT_SNAP_TOL);
        // brute force over every index triple
        let mut expect = 0;
        for x in 0..ix.frame.len(0) {
            for y in 0..ix.frame.len(1) {
                for z in 0..ix.frame.len(2) {
                    if ix.nodes[0].contains(&(x, z)) && ix.nodes[1].contains(&(x, y)) && ix.nodes[2].contains(&(y, z)) {
                        expect += 1;
                    }
                }
            }
        }
        assert_eq!(gen_vertices(&ix).len(), expect);
        assert!(expect > 8);
    }

    #[test]
    fn reference_blocks_cover_every_plank() {
        let p = crate::program::parse_program(crate::program::fixtures::REFERENCE_CABINET).unwrap();
        let planks = p.resolve().unwrap();
        let c = cand(&planks);
        for plank in &planks {
            let inside: f64 = c
                .blocks
                .iter()
                .filter(|b| b.boxes.iter().all(|x| x.intersection_volume(plank) > 0.0 || x.volume() == 0.0))
                .filter(|b| (b.boxes.iter().map(|x| x.intersection_volume(plank)).sum::<f64>() - b.volume).abs() < 1e-12)
                .map(|b| b.volume)
                .sum();
            assert!((inside - plank.volume()).abs() < 1e-9, "{plank:?}");
        }
    }

    #[test]
    fn deleting_an_edge_removes_covering_candidates() {
        let d = project(&[cube()]);
        let mut cut = d.clone();
        cut.front.edges.remove(0);
        let full = Candidates::new(&d, DEFAULT_SNAP_TOL);
        let less = Candidates::new(&cut, DEFAULT_SNAP_TOL);
        assert!(less.edges.len() < full.edges.len());
        assert!(less.vertices.len() <= full.vertices.len());
        assert!(less.blocks.is_empty());
    }

    #[test]
    fn unit_states_record_visibility() {
        let d = project(&[cube()]);
        let ix = IndexedDrawing::new(&d, DEFAULT_SNAP_TOL);
        assert_eq!(ix.states.stray, 0);
        assert!(ix.states.state.iter().all(|&s| s != 1));
        let mut skew = d.clone();
        skew.front.edges.push(Edge2D::new([-0.5, -0.75], [0.5, 0.75], true).unwrap());
        assert_eq!(UnitStates::from_drawing(&ix.frame, &skew).stray, 1);
    }
}
