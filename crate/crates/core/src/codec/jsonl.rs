//! JSON-lines dataset files, one [`SequenceSample`] per line.
//!
//! ```text
//! {"v":1,"id":"000042","scale":600.0,
//!  "input":[[bin,view,edge,coord,vis],...],
//!  "output":[[kind,arg,plank,face],...]}
//! ```
//!
//! `view` is 0/1/2 for front/top/side and `vis` is 0 visible, 1 hidden.
//! `kind` is 0 SOS, 1 EOS, 2 value (`arg` = bin), 3 pointer (`arg` =
//! absolute target position); `arg` is 0 for SOS/EOS.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{InputToken, OutputToken, SequenceSample, TokenKind, Visibility, NUM_BINS};
use crate::projector::View;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: unsupported schema version {version}")]
    Version { line: usize, version: u32 },
    #[error("line {line}: {msg}")]
    Field { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct Line {
    v: u32,
    id: String,
    scale: f64,
    input: Vec<[u32; 5]>,
    output: Vec<[u32; 4]>,
}

fn to_line(s: &SequenceSample) -> Line {
    Line {
        v: SCHEMA_VERSION,
        id: s.id.clone(),
        scale: s.scale_mm_per_unit,
        input: s
            .input
            .iter()
            .map(|t| [u32::from(t.value), t.view.index() as u32, t.edge_idx, u32::from(t.coord_idx), t.vis as u32])
            .collect(),
        output: s
            .output
            .iter()
            .map(|t| {
                let (kind, arg) = match t.kind {
                    TokenKind::Sos => (0, 0),
                    TokenKind::Eos => (1, 0),
                    TokenKind::Value(b) => (2, u32::from(b)),
                    TokenKind::Pointer(p) => (3, p as u32),
                };
                [kind, arg, t.plank_idx as u32, u32::from(t.face_idx)]
            })
            .collect(),
    }
}

fn from_line(l: Line, line: usize) -> Result<SequenceSample, JsonlError> {
    let field = |msg: String| JsonlError::Field { line, msg };
    if l.v != SCHEMA_VERSION {
        return Err(JsonlError::Version { line, version: l.v });
    }
    let mut input = Vec::with_capacity(l.input.len());
    for [bin, view, edge, coord, vis] in l.input {
        if bin as usize >= NUM_BINS || coord > 3 {
            return Err(field(format!("input token [{bin},{view},{edge},{coord},{vis}] out of range")));
        }
        let view = *View::ALL.get(view as usize).ok_or_else(|| field(format!("view {view}")))?;
        let vis = match vis {
            0 => Visibility::Visible,
            1 => Visibility::Hidden,
            _ => return Err(field(format!("visibility {vis}"))),
        };
        input.push(InputToken { value: bin as u16, view, edge_idx: edge, coord_idx: coord as u8, vis });
    }
    let mut output = Vec::with_capacity(l.output.len());
    for [kind, arg, plank, face] in l.output {
        let kind = match kind {
            0 => TokenKind::Sos,
            1 => TokenKind::Eos,
            2 if (arg as usize) < NUM_BINS => TokenKind::Value(arg as u16),
            3 => TokenKind::Pointer(arg as usize),
            _ => return Err(field(format!("output token [{kind},{arg},{plank},{face}] out of range"))),
        };
        if face > 5 {
            return Err(field(format!("face {face}")));
        }
        output.push(OutputToken { kind, plank_idx: plank as usize, face_idx: face as u8 });
    }
    Ok(SequenceSample { id: l.id, scale_mm_per_unit: l.scale, input, output })
}

pub fn sample_to_json_line(s: &SequenceSample) -> String {
    serde_json::to_string(&to_line(s)).expect("sample is always serializable")
}

/// Parse one line; `line` is only used in error messages.
pub fn sample_from_json_line(text: &str, line: usize) -> Result<SequenceSample, JsonlError> {
    let l: Line = serde_json::from_str(text).map_err(|source| JsonlError::Json { line, source })?;
    from_line(l, line)
}

pub fn write_jsonl<'a>(mut w: impl Write, samples: impl IntoIterator<Item = &'a SequenceSample>) -> std::io::Result<()> {
    for s in samples {
        writeln!(w, "{}", sample_to_json_line(s))?;
    }
    Ok(())
}

/// Blank lines are skipped. Line numbers in errors are 1-based.
pub fn read_jsonl(r: impl BufRead) -> Result<Vec<SequenceSample>, JsonlError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(sample_from_json_line(&line, i + 1)?);
    }
    Ok(out)
}
