//! Program JSON: `{scale_mm_per_unit, bbox:[6], planks:[[coord; 6]]}` where a
//! coord is `{"v": f}` or `{"p": [cuboid, dof]}`.

use serde::{Deserialize, Serialize};

use super::{CoordRef, Plank, Program};
use crate::geom::Dof;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoordJson {
    Value { v: f64 },
    Pointer { p: (usize, Dof) },
}

#[derive(Serialize, Deserialize)]
struct ProgramJson {
    scale_mm_per_unit: f64,
    bbox: [f64; 6],
    planks: Vec<[CoordJson; 6]>,
}

pub fn program_to_json(p: &Program) -> serde_json::Value {
    let doc = ProgramJson {
        scale_mm_per_unit: p.scale_mm_per_unit,
        bbox: p.bbox,
        planks: p
            .planks
            .iter()
            .map(|pl| {
                pl.coords.map(|c| match c {
                    CoordRef::Literal(v) => CoordJson::Value { v },
                    CoordRef::Attach { plank, dof } => CoordJson::Pointer { p: (plank, dof) },
                })
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("program JSON is always serializable")
}

pub fn program_from_json(v: &serde_json::Value) -> Result<Program, serde_json::Error> {
    let doc = ProgramJson::deserialize(v)?;
    Ok(Program {
        scale_mm_per_unit: doc.scale_mm_per_unit,
        bbox: doc.bbox,
        planks: doc
            .planks
            .into_iter()
            .map(|cs| Plank {
                coords: cs.map(|c| match c {
                    CoordJson::Value { v } => CoordRef::Literal(v),
                    CoordJson::Pointer { p: (plank, dof) } => CoordRef::Attach { plank, dof },
                }),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{fixtures::REFERENCE_CABINET, parse_program};

    #[test]
    fn json_shape_and_round_trip() {
        let p = parse_program(REFERENCE_CABINET).unwrap();
        let v = program_to_json(&p);
        assert_eq!(v["planks"][2][0], serde_json::json!({"p": [1, 3]}));
        assert_eq!(v["planks"][2][2], serde_json::json!({"v": -0.70}));
        assert_eq!(program_from_json(&v).unwrap(), p);
    }

    #[test]
    fn bad_dof_is_rejected() {
        let v = serde_json::json!({"scale_mm_per_unit": 1.0, "bbox": [0,0,0,1,1,1], "planks": [[{"p":[0,9]},{"v":0},{"v":0},{"v":1},{"v":1},{"v":1}]]});
        assert!(program_from_json(&v).is_err());
    }
}
