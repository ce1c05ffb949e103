//! Wavefront OBJ output, one object per plank, 12 triangles each.

use std::fmt::Write as _;

use crate::geom::Aabb;

/// Corner `k` of a box: bit 0 selects max x, bit 1 max y, bit 2 max z.
fn corner(b: &Aabb, k: usize) -> [f64; 3] {
    std::array::from_fn(|a| if k >> a & 1 == 1 { b.max[a] } else { b.min[a] })
}

/// Outward-facing (counter-clockwise) triangles over corner ids.
const TRIANGLES: [[usize; 3]; 12] = [
    [0, 2, 1],
    [1, 2, 3],
    [4, 5, 6],
    [5, 7, 6],
    [0, 1, 4],
    [1, 5, 4],
    [2, 6, 3],
    [3, 6, 7],
    [0, 4, 2],
    [2, 4, 6],
    [1, 3, 5],
    [3, 7, 5],
];

/// `scale` multiplies every coordinate (e.g. millimetres per unit).
pub fn boxes_to_obj(boxes: &[Aabb], scale: f64) -> String {
    let mut s = String::new();
    for (i, b) in boxes.iter().enumerate() {
        writeln!(s, "o plank{}", i + 1).unwrap();
        for k in 0..8 {
            let c = corner(b, k);
            writeln!(s, "v {} {} {}", c[0] * scale, c[1] * scale, c[2] * scale).unwrap();
        }
        let base = 8 * i + 1;
        for t in TRIANGLES {
            writeln!(s, "f {} {} {}", base + t[0], base + t[1], base + t[2]).unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    }

    #[test]
    fn twelve_outward_triangles() {
        let b = Aabb::from_coords([0.0, 0.0, 0.0, 1.0, 2.0, 3.0]);
        let obj = boxes_to_obj(&[b, b], 1.0);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 24);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 16);
        let centre = [0.5, 1.0, 1.5];
        let mut area = 0.0;
        for t in TRIANGLES {
            let [p, q, r] = t.map(|k| corner(&b, k));
            let n = cross(std::array::from_fn(|a| q[a] - p[a]), std::array::from_fn(|a| r[a] - p[a]));
            let out: f64 = (0..3).map(|a| n[a] * (p[a] - centre[a])).sum();
            assert!(out > 0.0, "{t:?}");
            area += (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt() / 2.0;
        }
        assert!((area - 2.0 * (2.0 + 3.0 + 6.0)).abs() < 1e-12);
    }
}
