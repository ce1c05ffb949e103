//! Cabinet shape programs.
//!
//! A program is a bounding box followed by an ordered list of planks. Every
//! plank has six coordinates `(x_min, y_min, z_min, x_max, y_max, z_max)`;
//! each is either a literal in normalized units or an attachment to a DOF of
//! an earlier cuboid. Cuboid index 0 is the bounding box, so the plank stored
//! at `planks[i]` has cuboid index `i + 1`.
//!
//! Attachments to the bounding box are same-side (a plank's `x_min` may sit
//! on the box's `x_min` wall); attachments to any other plank are
//! opposite-side (`x_min` rests on a neighbour's `x_max`).

mod graph;
mod infer;
mod json;
mod parse;

use std::fmt;

use thiserror::Error;

use crate::geom::{Aabb, Dof, ResolvedPlank};

pub use graph::{from_graph, literals, to_graph, AttachmentGraph};
pub use infer::{infer_attachments, infer_attachments_mm};
pub use json::{program_from_json, program_to_json};
pub use parse::{parse_program, print_program, ParseError, ParseErrorKind};

/// Cuboid index of the bounding box.
pub const BBOX: usize = 0;

/// One plank coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoordRef {
    Literal(f64),
    Attach { plank: usize, dof: Dof },
}

impl CoordRef {
    pub fn attach(plank: usize, dof: Dof) -> Self {
        CoordRef::Attach { plank, dof }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, CoordRef::Literal(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plank {
    pub coords: [CoordRef; 6],
}

impl Plank {
    pub fn literal(c: [f64; 6]) -> Self {
        Self { coords: c.map(CoordRef::Literal) }
    }

    pub fn coord(&self, dof: Dof) -> CoordRef {
        self.coords[dof.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    /// Millimetres per normalized unit.
    pub scale_mm_per_unit: f64,
    pub bbox: [f64; 6],
    pub planks: Vec<Plank>,
}

/// Which attachment targets are admissible for a DOF.
///
/// Returns true when `dof` of a non-box plank may reference `target_dof` of
/// cuboid `target`.
pub fn attachment_is_legal(dof: Dof, target: usize, target_dof: Dof) -> bool {
    if dof.axis() != target_dof.axis() {
        return false;
    }
    if target == BBOX {
        dof == target_dof
    } else {
        dof == target_dof.opposite()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProgramError {
    #[error("cuboid {plank} has zero or negative volume")]
    ZeroVolume { plank: usize },
    #[error("cuboid {plank} {dof} references cuboid {target}, which is not earlier in program order")]
    ForwardReference { plank: usize, dof: Dof, target: usize },
    #[error("cuboid {plank} {dof} is an attachment and cannot be edited directly")]
    EditOnAttachment { plank: usize, dof: Dof },
    #[error("cuboid index {plank} out of range")]
    NoSuchPlank { plank: usize },
    #[error("attachment cycle among planks {cycle:?}")]
    CyclicAttachment { cycle: Vec<usize> },
    #[error("face {face} has out-degree {degree} (at most one allowed)")]
    OutDegree { face: usize, degree: usize },
    #[error("graph face id {face} out of range for {num_faces} faces")]
    FaceOutOfRange { face: usize, num_faces: usize },
}

/// A single validation finding.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub plank: usize,
    pub dof: Option<Dof>,
    pub kind: DiagnosticKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    SameSideAttachment,
    BboxOppositeSide,
    CrossAxisAttachment,
    SelfAttachment,
    ForwardReference,
    DanglingReference,
    ZeroVolume,
    NonFiniteLiteral,
}

impl DiagnosticKind {
    pub fn message(self) -> &'static str {
        match self {
            DiagnosticKind::SameSideAttachment => "same-side attachment",
            DiagnosticKind::BboxOppositeSide => "opposite-side attachment to bbox",
            DiagnosticKind::CrossAxisAttachment => "cross-axis attachment",
            DiagnosticKind::SelfAttachment => "self attachment",
            DiagnosticKind::ForwardReference => "forward reference",
            DiagnosticKind::DanglingReference => "dangling reference",
            DiagnosticKind::ZeroVolume => "zero volume",
            DiagnosticKind::NonFiniteLiteral => "non-finite literal",
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dof {
            Some(d) => write!(f, "cuboid {} {}: {}", self.plank, d, self.kind.message()),
            None => write!(f, "cuboid {}: {}", self.plank, self.kind.message()),
        }
    }
}

impl Program {
    pub fn new(bbox: [f64; 6]) -> Self {
        Self { scale_mm_per_unit: 1.0, bbox, planks: Vec::new() }
    }

    /// Number of cuboids including the bounding box.
    pub fn num_cuboids(&self) -> usize {
        self.planks.len() + 1
    }

    pub fn coord(&self, cuboid: usize, dof: Dof) -> Option<CoordRef> {
        if cuboid == BBOX {
            Some(CoordRef::Literal(self.bbox[dof.index()]))
        } else {
            self.planks.get(cuboid - 1).map(|p| p.coord(dof))
        }
    }

    /// Coordinates of every cuboid (box first) without any volume check.
    ///
    /// References that do not point backwards resolve to `NaN`.
    pub fn evaluate(&self) -> Vec<[f64; 6]> {
        let mut table: Vec<[f64; 6]> = Vec::with_capacity(self.num_cuboids());
        table.push(self.bbox);
        for (i, plank) in self.planks.iter().enumerate() {
            let me = i + 1;
            let row = plank.coords.map(|c| match c {
                CoordRef::Literal(v) => v,
                CoordRef::Attach { plank, dof } if plank < me => table[plank][dof.index()],
                CoordRef::Attach { .. } => f64::NAN,
            });
            table.push(row);
        }
        table
    }

    /// Execute the program. The bounding box is excluded.
    pub fn resolve(&self) -> Result<Vec<ResolvedPlank>, ProgramError> {
        let mut all = self.resolve_all()?;
        all.remove(0);
        Ok(all)
    }

    /// Execute the program, bounding box first.
    pub fn resolve_all(&self) -> Result<Vec<ResolvedPlank>, ProgramError> {
        for (i, plank) in self.planks.iter().enumerate() {
            for (d, c) in Dof::ALL.iter().zip(plank.coords.iter()) {
                if let CoordRef::Attach { plank: target, .. } = *c {
                    if target > i {
                        return Err(ProgramError::ForwardReference { plank: i + 1, dof: *d, target });
                    }
                }
            }
        }
        self.evaluate()
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                let b = Aabb::from_coords(c);
                if b.is_positive() {
                    Ok(b)
                } else {
                    Err(ProgramError::ZeroVolume { plank: i })
                }
            })
            .collect()
    }

    /// Check every attachment rule and positive volume.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (a, v) in self.bbox.iter().enumerate() {
            if !v.is_finite() {
                out.push(Diagnostic { plank: BBOX, dof: Dof::from_index(a), kind: DiagnosticKind::NonFiniteLiteral });
            }
        }
        for (i, plank) in self.planks.iter().enumerate() {
            let me = i + 1;
            for dof in Dof::ALL {
                let kind = match plank.coord(dof) {
                    CoordRef::Literal(v) if !v.is_finite() => Some(DiagnosticKind::NonFiniteLiteral),
                    CoordRef::Literal(_) => None,
                    CoordRef::Attach { plank: t, dof: td } => {
                        if t == me {
                            Some(DiagnosticKind::SelfAttachment)
                        } else if t > self.planks.len() {
                            Some(DiagnosticKind::DanglingReference)
                        } else if t > me {
                            Some(DiagnosticKind::ForwardReference)
                        } else if td.axis() != dof.axis() {
                            Some(DiagnosticKind::CrossAxisAttachment)
                        } else if attachment_is_legal(dof, t, td) {
                            None
                        } else if t == BBOX {
                            Some(DiagnosticKind::BboxOppositeSide)
                        } else {
                            Some(DiagnosticKind::SameSideAttachment)
                        }
                    }
                };
                if let Some(kind) = kind {
                    out.push(Diagnostic { plank: me, dof: Some(dof), kind });
                }
            }
        }
        for (i, c) in self.evaluate().iter().enumerate() {
            let b = Aabb::from_coords(*c);
            // NaN coordinates were already reported as reference problems.
            if (0..3).all(|a| !b.min[a].is_nan() && !b.max[a].is_nan()) && !b.is_positive() {
                out.push(Diagnostic { plank: i, dof: None, kind: DiagnosticKind::ZeroVolume });
            }
        }
        out
    }

    /// Set a literal coordinate and re-execute.
    ///
    /// `plank` is a cuboid index (0 edits the bounding box).
    pub fn edit_propagate(&self, plank: usize, dof: Dof, value: f64) -> Result<Vec<ResolvedPlank>, ProgramError> {
        self.with_edit(plank, dof, value)?.resolve()
    }

    /// The edited program itself; attachment topology is unchanged.
    pub fn with_edit(&self, plank: usize, dof: Dof, value: f64) -> Result<Program, ProgramError> {
        let mut p = self.clone();
        if plank == BBOX {
            p.bbox[dof.index()] = value;
            return Ok(p);
        }
        let target = p.planks.get_mut(plank - 1).ok_or(ProgramError::NoSuchPlank { plank })?;
        match target.coords[dof.index()] {
            CoordRef::Literal(_) => {
                target.coords[dof.index()] = CoordRef::Literal(value);
                Ok(p)
            }
            CoordRef::Attach { .. } => Err(ProgramError::EditOnAttachment { plank, dof }),
        }
    }

    /// Number of attachment coordinates.
    pub fn attachment_count(&self) -> usize {
        self.planks.iter().flat_map(|p| p.coords.iter()).filter(|c| !c.is_literal()).count()
    }

    /// Plank-level dependency lists (targets other than the box), per cuboid.
    pub(crate) fn dependencies(&self) -> Vec<Vec<usize>> {
        let mut deps = vec![Vec::new(); self.num_cuboids()];
        for (i, p) in self.planks.iter().enumerate() {
            for c in p.coords {
                if let CoordRef::Attach { plank, .. } = c {
                    if plank != BBOX && !deps[i + 1].contains(&plank) {
                        deps[i + 1].push(plank);
                    }
                }
            }
        }
        deps
    }

    /// Canonical plank order: topological (targets before referencers),
    /// ready planks taken in ascending order of their resolved 6-tuple.
    ///
    /// Returns cuboid indices starting with the box.
    pub fn canonical_order(&self) -> Result<Vec<usize>, ProgramError> {
        let values = self.evaluate();
        topo_order(&self.dependencies(), |a, b| {
            let ka = &values[a];
            let kb = &values[b];
            for k in 0..6 {
                match ka[k].total_cmp(&kb[k]) {
                    std::cmp::Ordering::Equal => continue,
                    o => return o,
                }
            }
            a.cmp(&b)
        })
    }

    /// Reorder planks (keeping the box first) and remap references.
    ///
    /// `order` lists cuboid indices; it must start with 0 and be a
    /// permutation in which every reference points backwards.
    pub fn reordered(&self, order: &[usize]) -> Program {
        let mut new_index = vec![0usize; order.len()];
        for (pos, &old) in order.iter().enumerate() {
            new_index[old] = pos;
        }
        let planks = order[1..]
            .iter()
            .map(|&old| {
                let p = self.planks[old - 1];
                Plank {
                    coords: p.coords.map(|c| match c {
                        CoordRef::Attach { plank, dof } => CoordRef::Attach { plank: new_index[plank], dof },
                        lit => lit,
                    }),
                }
            })
            .collect();
        Program { scale_mm_per_unit: self.scale_mm_per_unit, bbox: self.bbox, planks }
    }

    /// The program with planks in canonical order.
    pub fn canonicalize(&self) -> Result<Program, ProgramError> {
        Ok(self.reordered(&self.canonical_order()?))
    }

    /// Structural equality with literals compared to within `tol`.
    pub fn approx_eq(&self, other: &Program, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol;
        self.planks.len() == other.planks.len()
            && self.bbox.iter().zip(other.bbox.iter()).all(|(a, b)| close(*a, *b))
            && self.planks.iter().zip(other.planks.iter()).all(|(p, q)| {
                p.coords.iter().zip(q.coords.iter()).all(|pair| match pair {
                    (CoordRef::Literal(a), CoordRef::Literal(b)) => close(*a, *b),
                    (a, b) => a == b,
                })
            })
    }
}

/// Kahn's algorithm over cuboid dependency lists; cuboid 0 always first.
///
/// On a cycle, reports one cycle found among the unplaced cuboids.
pub(crate) fn topo_order(
    deps: &[Vec<usize>],
    mut cmp: impl FnMut(usize, usize) -> std::cmp::Ordering,
) -> Result<Vec<usize>, ProgramError> {
    let n = deps.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    if n == 0 {
        return Ok(order);
    }
    placed[0] = true;
    order.push(0);
    while order.len() < n {
        let next = (1..n)
            .filter(|&i| !placed[i] && deps[i].iter().all(|&d| placed[d]))
            .min_by(|&a, &b| cmp(a, b));
        match next {
            Some(i) => {
                placed[i] = true;
                order.push(i);
            }
            None => return Err(ProgramError::CyclicAttachment { cycle: find_cycle(deps, &placed) }),
        }
    }
    Ok(order)
}

fn find_cycle(deps: &[Vec<usize>], placed: &[bool]) -> Vec<usize> {
    // Every unplaced node has an unplaced dependency, so walking them must loop.
    let start = match (0..deps.len()).find(|&i| !placed[i]) {
        Some(s) => s,
        None => return Vec::new(),
    };
    let mut seen = vec![usize::MAX; deps.len()];
    let mut path = Vec::new();
    let mut cur = start;
    loop {
        if seen[cur] != usize::MAX {
            return path[seen[cur]..].to_vec();
        }
        seen[cur] = path.len();
        path.push(cur);
        cur = match deps[cur].iter().copied().find(|&d| !placed[d]) {
            Some(d) => d,
            None => return path,
        };
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::REFERENCE_CABINET;
    use super::*;

    fn reference() -> Program {
        parse_program(REFERENCE_CABINET).unwrap()
    }

    #[test]
    fn reference_resolves_plank3() {
        let r = reference().resolve().unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r[2].coords(), [-0.34, -0.23, -0.70, 0.34, 0.23, -0.69]);
    }

    #[test]
    fn literal_only_program_resolves_to_literals() {
        let mut p = Program::new([-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]);
        p.planks.push(Plank::literal([0.0, 0.1, 0.2, 0.5, 0.6, 0.7]));
        assert_eq!(p.resolve().unwrap()[0].coords(), [0.0, 0.1, 0.2, 0.5, 0.6, 0.7]);
        assert_eq!(p.resolve_all().unwrap().len(), 2);
    }

    #[test]
    fn attachment_chain_matches_manual_substitution() {
        // a.x_max = 0.2; b.x_min -> a.x_max; c.x_min -> b.x_max
        let mut p = Program::new([-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]);
        p.planks.push(Plank::literal([-0.5, 0.0, 0.0, 0.2, 0.1, 0.1]));
        let mut b = Plank::literal([0.0, 0.0, 0.0, 0.4, 0.1, 0.1]);
        b.coords[0] = CoordRef::attach(1, Dof::XMax);
        p.planks.push(b);
        let mut c = Plank::literal([0.0, 0.0, 0.0, 0.9, 0.1, 0.1]);
        c.coords[0] = CoordRef::attach(2, Dof::XMax);
        c.coords[1] = CoordRef::attach(BBOX, Dof::YMin);
        p.planks.push(c);
        let r = p.resolve().unwrap();
        assert_eq!(r[1].min[0], 0.2);
        assert_eq!(r[2].min[0], 0.4);
        assert_eq!(r[2].min[1], -1.0);
    }

    #[test]
    fn zero_volume_is_reported() {
        let mut p = Program::new([-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]);
        p.planks.push(Plank::literal([0.5, 0.0, 0.0, 0.5, 0.1, 0.1]));
        assert_eq!(p.resolve(), Err(ProgramError::ZeroVolume { plank: 1 }));
        let diags = p.validate();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind.message(), "zero volume");
    }

    #[test]
    fn reference_validates_clean() {
        assert!(reference().validate().is_empty());
    }

    #[test]
    fn same_side_attachment_is_diagnosed() {
        let mut p = reference();
        p.planks[2].coords[0] = CoordRef::attach(1, Dof::XMin);
        let d = p.validate();
        assert!(d.iter().any(|d| d.kind == DiagnosticKind::SameSideAttachment && d.plank == 3));
        assert_eq!(DiagnosticKind::SameSideAttachment.message(), "same-side attachment");
    }

    #[test]
    fn cross_axis_and_bbox_side_rules() {
        let mut p = reference();
        p.planks[2].coords[0] = CoordRef::attach(1, Dof::YMax);
        p.planks[3].coords[1] = CoordRef::attach(BBOX, Dof::YMax);
        let kinds: Vec<_> = p.validate().into_iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::CrossAxisAttachment));
        assert!(kinds.contains(&DiagnosticKind::BboxOppositeSide));
    }

    #[test]
    fn forward_reference_is_rejected_by_resolve() {
        let mut p = reference();
        p.planks[0].coords[3] = CoordRef::attach(3, Dof::XMin);
        assert!(matches!(p.resolve(), Err(ProgramError::ForwardReference { plank: 1, .. })));
        assert!(p.validate().iter().any(|d| d.kind == DiagnosticKind::ForwardReference));
    }

    #[test]
    fn editing_bbox_top_moves_top_plank() {
        let r = reference().edit_propagate(BBOX, Dof::ZMax, 1.0).unwrap();
        assert_eq!(r[3].max[2], 1.0);
        // side panels reference bbox_6 as well
        assert_eq!(r[0].max[2], 1.0);
        assert_eq!(r[1].max[2], 1.0);
        // the bottom is untouched
        assert_eq!(r[2].max[2], -0.69);
    }

    #[test]
    fn editing_unreferenced_dof_changes_one_plank() {
        let p = reference();
        let before = p.resolve().unwrap();
        // plank5.y_max (0.22) is referenced by nobody.
        let after = p.edit_propagate(5, Dof::YMax, 0.225).unwrap();
        for (i, (a, b)) in before.iter().zip(after.iter()).enumerate() {
            if i == 4 {
                assert_eq!(b.max[1], 0.225);
            } else {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn editing_an_attachment_is_an_error() {
        let p = reference();
        assert_eq!(
            p.edit_propagate(3, Dof::XMin, 0.0),
            Err(ProgramError::EditOnAttachment { plank: 3, dof: Dof::XMin })
        );
    }

    #[test]
    fn edit_with_current_value_is_identity() {
        let p = reference();
        let before = p.resolve().unwrap();
        assert_eq!(p.edit_propagate(3, Dof::ZMin, -0.70).unwrap(), before);
    }

    #[test]
    fn canonical_order_of_reference() {
        assert_eq!(reference().canonical_order().unwrap(), vec![0, 1, 2, 3, 6, 4, 7, 5]);
    }

    #[test]
    fn canonicalize_preserves_geometry() {
        let p = reference();
        let c = p.canonicalize().unwrap();
        assert!(c.validate().is_empty());
        let mut a: Vec<_> = p.resolve().unwrap().iter().map(|b| b.coords()).collect();
        let mut b: Vec<_> = c.resolve().unwrap().iter().map(|b| b.coords()).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(a, b);
    }
}
