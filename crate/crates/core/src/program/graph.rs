//! Faces-as-vertices view of a program.

use super::{CoordRef, Plank, Program, ProgramError};
use crate::geom::Dof;

/// Attachment DAG over faces. Face id `6 * cuboid + dof`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttachmentGraph {
    pub num_faces: usize,
    /// Sparse adjacency: `(from, to)` means face `from` attaches to face `to`.
    pub edges: Vec<(usize, usize)>,
}

impl AttachmentGraph {
    pub fn face_id(cuboid: usize, dof: Dof) -> usize {
        6 * cuboid + dof.index()
    }

    pub fn face_of(id: usize) -> (usize, Dof) {
        (id / 6, Dof::ALL[id % 6])
    }

    /// Dense adjacency row-major `num_faces x num_faces`, entries 0/1.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.num_faces]; self.num_faces];
        for &(i, j) in &self.edges {
            m[i][j] = 1;
        }
        m
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_faces];
        for &(i, _) in &self.edges {
            d[i] += 1;
        }
        d
    }
}

pub fn to_graph(p: &Program) -> AttachmentGraph {
    let mut edges = Vec::new();
    for (i, plank) in p.planks.iter().enumerate() {
        for dof in Dof::ALL {
            if let CoordRef::Attach { plank: t, dof: td } = plank.coord(dof) {
                edges.push((AttachmentGraph::face_id(i + 1, dof), AttachmentGraph::face_id(t, td)));
            }
        }
    }
    AttachmentGraph { num_faces: 6 * p.num_cuboids(), edges }
}

/// Per-face values: the literal where the face is a literal, the resolved
/// value otherwise.
pub fn literals(p: &Program) -> Vec<f64> {
    p.evaluate().into_iter().flatten().collect()
}

/// Rebuild a program from its graph and a per-face literal table.
pub fn from_graph(g: &AttachmentGraph, literals: &[f64], scale_mm_per_unit: f64) -> Result<Program, ProgramError> {
    let n = g.num_faces;
    let mut target: Vec<Option<usize>> = vec![None; n];
    for &(i, j) in &g.edges {
        for f in [i, j] {
            if f >= n {
                return Err(ProgramError::FaceOutOfRange { face: f, num_faces: n });
            }
        }
        if target[i].is_some() {
            return Err(ProgramError::OutDegree { face: i, degree: g.out_degrees()[i] });
        }
        target[i] = Some(j);
    }
    if literals.len() < n || n < 6 || n % 6 != 0 {
        return Err(ProgramError::FaceOutOfRange { face: literals.len(), num_faces: n });
    }
    let coord = |f: usize| match target[f] {
        Some(t) => {
            let (plank, dof) = AttachmentGraph::face_of(t);
            CoordRef::Attach { plank, dof }
        }
        None => CoordRef::Literal(literals[f]),
    };
    let mut bbox = [0.0; 6];
    for (d, b) in bbox.iter_mut().enumerate() {
        if let Some(t) = target[d] {
            return Err(ProgramError::ForwardReference { plank: 0, dof: Dof::ALL[d], target: t / 6 });
        }
        *b = literals[d];
    }
    let planks = (1..n / 6)
        .map(|c| Plank { coords: std::array::from_fn(|d| coord(6 * c + d)) })
        .collect();
    Ok(Program { scale_mm_per_unit, bbox, planks })
}
