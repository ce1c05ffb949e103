//! Drawing JSON and SVG export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DrawingSet, Edge2D, View, ViewDrawing};

#[derive(Debug, Error)]
pub enum DrawingJsonError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("view `{0}` appears more than once")]
    DuplicateView(String),
}

const AXIS_NAMES: [&str; 3] = ["x", "y", "z"];

#[derive(Serialize, Deserialize)]
struct ViewJson {
    name: View,
    /// World axis names of the drawing coordinates; informational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<String>,
    edges: Vec<Edge2D>,
}

#[derive(Serialize, Deserialize)]
struct DrawingJson {
    views: Vec<ViewJson>,
    #[serde(default = "default_scale")]
    scale_mm_per_unit: f64,
}

fn default_scale() -> f64 {
    1.0
}

pub fn drawing_to_json(d: &DrawingSet) -> serde_json::Value {
    let doc = DrawingJson {
        views: d
            .views()
            .iter()
            .map(|v| {
                let ax = v.view.axes();
                ViewJson {
                    name: v.view,
                    u: Some(AXIS_NAMES[ax.u].into()),
                    v: Some(AXIS_NAMES[ax.v].into()),
                    edges: v.edges.clone(),
                }
            })
            .collect(),
        scale_mm_per_unit: d.scale_mm_per_unit,
    };
    serde_json::to_value(doc).expect("drawing JSON is always serializable")
}

/// Missing views are read as empty.
pub fn drawing_from_json(v: &serde_json::Value) -> Result<DrawingSet, DrawingJsonError> {
    let doc = DrawingJson::deserialize(v)?;
    let mut out = DrawingSet::empty();
    out.scale_mm_per_unit = doc.scale_mm_per_unit;
    let mut seen = [false; 3];
    for view in doc.views {
        if std::mem::replace(&mut seen[view.name.index()], true) {
            return Err(DrawingJsonError::DuplicateView(view.name.name().into()));
        }
        *out.view_mut(view.name) = ViewDrawing { view: view.name, edges: view.edges };
    }
    Ok(out)
}

/// Three views side by side; hidden edges dashed. One unit per normalized
/// coordinate, y flipped so drawings read upright.
pub fn drawing_to_svg(d: &DrawingSet) -> String {
    let bounds = |v: &ViewDrawing| {
        v.edges.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, e| {
            [b[0].min(e.x1), b[1].min(e.y1.min(e.y2)), b[2].max(e.x2), b[3].max(e.y1.max(e.y2))]
        })
    };
    let gap = 0.2;
    let mut offset = 0.0;
    let mut height: f64 = 0.0;
    let mut body = String::new();
    for v in d.views() {
        let b = bounds(v);
        if !b[0].is_finite() {
            continue;
        }
        let (w, h) = (b[2] - b[0], b[3] - b[1]);
        writeln!(body, r#"  <g id="{}" transform="translate({:.6} {:.6}) scale(1 -1) translate({:.6} {:.6})">"#, v.view.name(), offset, h, -b[0], -b[1]).unwrap();
        for e in &v.edges {
            let dash = if e.visible { "" } else { r#" stroke-dasharray="0.02 0.01""# };
            writeln!(body, r#"    <line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}"{dash}/>"#, e.x1, e.y1, e.x2, e.y2).unwrap();
        }
        body.push_str("  </g>\n");
        offset += w + gap;
        height = height.max(h);
    }
    let width = (offset - gap).max(0.0);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\" fill=\"none\" stroke=\"black\" stroke-width=\"0.004\">\n{body}</svg>\n",
        -gap / 2.0,
        -gap / 2.0,
        width + gap,
        height + gap
    )
}
