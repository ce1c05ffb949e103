//! Axis-aligned boxes and the six plank degrees of freedom.

use std::fmt;

use serde::{Deserialize, Serialize};

/// One of the six boundary coordinates of an axis-aligned cuboid.
///
/// The discriminant is the coordinate's position in
/// `(x_min, y_min, z_min, x_max, y_max, z_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Dof {
    XMin = 0,
    YMin = 1,
    ZMin = 2,
    XMax = 3,
    YMax = 4,
    ZMax = 5,
}

impl Dof {
    pub const ALL: [Dof; 6] = [Dof::XMin, Dof::YMin, Dof::ZMin, Dof::XMax, Dof::YMax, Dof::ZMax];

    pub fn from_index(i: usize) -> Option<Dof> {
        Dof::ALL.get(i).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Axis 0, 1 or 2 (x, y, z).
    pub fn axis(self) -> usize {
        self.index() % 3
    }

    pub fn is_max(self) -> bool {
        self.index() >= 3
    }

    /// The DOF on the same axis and the other side.
    pub fn opposite(self) -> Dof {
        Dof::ALL[(self.index() + 3) % 6]
    }

    pub fn of(axis: usize, is_max: bool) -> Dof {
        Dof::ALL[axis + if is_max { 3 } else { 0 }]
    }

    pub fn name(self) -> &'static str {
        match self {
            Dof::XMin => "x_min",
            Dof::YMin => "y_min",
            Dof::ZMin => "z_min",
            Dof::XMax => "x_max",
            Dof::YMax => "y_max",
            Dof::ZMax => "z_max",
        }
    }
}

impl fmt::Display for Dof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<Dof> for u8 {
    fn from(d: Dof) -> u8 {
        d as u8
    }
}

impl TryFrom<u8> for Dof {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Dof::from_index(v as usize).ok_or_else(|| format!("dof index {v} outside 0..6"))
    }
}

/// Axis-aligned box in normalized units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

/// The execution result of one plank.
pub type ResolvedPlank = Aabb;

impl Aabb {
    pub fn new(min: [f64; 3], max: [f64; 3]) -> Self {
        Self { min, max }
    }

    /// Build from `(x_min, y_min, z_min, x_max, y_max, z_max)`.
    pub fn from_coords(c: [f64; 6]) -> Self {
        Self { min: [c[0], c[1], c[2]], max: [c[3], c[4], c[5]] }
    }

    pub fn coords(&self) -> [f64; 6] {
        [self.min[0], self.min[1], self.min[2], self.max[0], self.max[1], self.max[2]]
    }

    pub fn get(&self, dof: Dof) -> f64 {
        if dof.is_max() {
            self.max[dof.axis()]
        } else {
            self.min[dof.axis()]
        }
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|a| self.extent(a).max(0.0)).product()
    }

    /// True when every axis has `min < max`.
    pub fn is_positive(&self) -> bool {
        (0..3).all(|a| self.min[a] < self.max[a])
    }

    pub fn intersection_volume(&self, other: &Aabb) -> f64 {
        (0..3)
            .map(|a| (self.max[a].min(other.max[a]) - self.min[a].max(other.min[a])).max(0.0))
            .product()
    }

    pub fn union_hull(&self, other: &Aabb) -> Aabb {
        let mut out = *self;
        for a in 0..3 {
            out.min[a] = out.min[a].min(other.min[a]);
            out.max[a] = out.max[a].max(other.max[a]);
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Aabb {
        Aabb {
            min: self.min.map(|v| v * factor),
            max: self.max.map(|v| v * factor),
        }
    }

    /// Axis of minimum extent; ties go to the lower axis.
    pub fn thickness_axis(&self) -> usize {
        let mut best = 0;
        for a in 1..3 {
            if self.extent(a) < self.extent(best) {
                best = a;
            }
        }
        best
    }

    /// Hull of a set of boxes, `None` when empty.
    pub fn hull<'a>(boxes: impl IntoIterator<Item = &'a Aabb>) -> Option<Aabb> {
        boxes.into_iter().fold(None, |acc, b| match acc {
            None => Some(*b),
            Some(h) => Some(h.union_hull(b)),
        })
    }
}
