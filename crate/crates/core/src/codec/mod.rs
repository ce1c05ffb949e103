//! Token sequences for drawings (model input) and programs (model output).
//!
//! Coordinates are quantized to 9-bit bins. The output sequence is
//! `SOS, <6 tokens per cuboid>, EOS` with the bounding box first; a literal
//! coordinate becomes a value token and an attachment becomes a pointer to
//! the absolute position of the target DOF's token (SOS sits at position 0,
//! so the box's `x_min` is position 1).

mod jsonl;

use thiserror::Error;

use crate::geom::Dof;
use crate::program::{attachment_is_legal, CoordRef, Plank, Program, ProgramError, BBOX};
use crate::projector::{DrawingSet, View};

pub use jsonl::{read_jsonl, sample_from_json_line, sample_to_json_line, write_jsonl, JsonlError, SCHEMA_VERSION};

/// Number of value bins.
pub const NUM_BINS: usize = 512;
const MAX_BIN: f64 = (NUM_BINS - 1) as f64;
/// Vocabulary ids: bins `0..512`, then SOS, then EOS.
pub const SOS_ID: usize = NUM_BINS;
pub const EOS_ID: usize = NUM_BINS + 1;
pub const VOCAB_SIZE: usize = NUM_BINS + 2;

/// Width of one bin in normalized units.
pub const BIN_WIDTH: f64 = 2.0 / MAX_BIN;

/// Map `[-1, 1]` to a bin; out-of-range input is clamped with a warning.
pub fn quantize(x: f64) -> u16 {
    let (bin, clamped) = quantize_checked(x);
    if clamped {
        log::warn!("coordinate {x} outside [-1, 1]; clamped to bin {bin}");
    }
    bin
}

/// Bin and whether clamping happened.
pub fn quantize_checked(x: f64) -> (u16, bool) {
    if x.is_nan() {
        return (0, true);
    }
    let clamped = !(-1.0..=1.0).contains(&x);
    let t = ((x.clamp(-1.0, 1.0) + 1.0) / 2.0 * MAX_BIN).round();
    (t as u16, clamped)
}

/// Centre of a bin.
pub fn dequantize(bin: u16) -> f64 {
    f64::from(bin) / MAX_BIN * 2.0 - 1.0
}

/// Snap a value to the centre of its bin.
pub fn snap_to_bin(x: f64) -> f64 {
    dequantize(quantize(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Visibility {
    Visible = 0,
    Hidden = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InputToken {
    pub value: u16,
    pub view: View,
    /// Position of the edge within its view after sorting.
    pub edge_idx: u32,
    /// 0..4 for `x1, y1, x2, y2`.
    pub coord_idx: u8,
    pub vis: Visibility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Sos,
    Eos,
    Value(u16),
    /// Absolute position of an earlier DOF token.
    Pointer(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutputToken {
    pub kind: TokenKind,
    /// Cuboid index in output order (0 = box).
    pub plank_idx: usize,
    pub face_idx: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSample {
    pub id: String,
    pub scale_mm_per_unit: f64,
    pub input: Vec<InputToken>,
    pub output: Vec<OutputToken>,
}

impl SequenceSample {
    pub fn new(id: impl Into<String>, drawing: &DrawingSet, program: &Program) -> Result<Self, ProgramError> {
        Ok(Self {
            id: id.into(),
            scale_mm_per_unit: program.scale_mm_per_unit,
            input: encode_input(drawing),
            output: encode_output(program)?,
        })
    }
}

/// Position of a DOF token in the output sequence.
pub fn token_position(cuboid: usize, dof: Dof) -> usize {
    1 + 6 * cuboid + dof.index()
}

/// Cuboid and DOF addressed by a token position, `None` for position 0.
pub fn position_dof(pos: usize) -> Option<(usize, Dof)> {
    if pos == 0 {
        None
    } else {
        Some(((pos - 1) / 6, Dof::ALL[(pos - 1) % 6]))
    }
}

/// Flatten a drawing: views front, top, side; within a view edges sorted by
/// quantized `(x1, x2, y1, y2)`; four tokens per edge.
pub fn encode_input(d: &DrawingSet) -> Vec<InputToken> {
    let mut out = Vec::with_capacity(4 * d.count_edges());
    for view in View::ALL {
        let mut edges: Vec<([u16; 4], Visibility)> = d
            .view(view)
            .edges
            .iter()
            .map(|e| {
                let mut p = (quantize(e.x1), quantize(e.y1));
                let mut q = (quantize(e.x2), quantize(e.y2));
                if q < p {
                    std::mem::swap(&mut p, &mut q);
                }
                let vis = if e.visible { Visibility::Visible } else { Visibility::Hidden };
                ([p.0, p.1, q.0, q.1], vis)
            })
            .collect();
        edges.sort_by_key(|(c, vis)| (c[0], c[2], c[1], c[3], *vis as u8));
        for (i, (c, vis)) in edges.into_iter().enumerate() {
            for (k, value) in c.into_iter().enumerate() {
                out.push(InputToken { value, view, edge_idx: i as u32, coord_idx: k as u8, vis });
            }
        }
    }
    out
}

/// Encode a program in canonical plank order.
pub fn encode_output(p: &Program) -> Result<Vec<OutputToken>, ProgramError> {
    let canon = p.canonicalize()?;
    let mut out = Vec::with_capacity(6 * canon.num_cuboids() + 2);
    out.push(OutputToken { kind: TokenKind::Sos, plank_idx: 0, face_idx: 0 });
    for (face, v) in canon.bbox.iter().enumerate() {
        out.push(OutputToken { kind: TokenKind::Value(quantize(*v)), plank_idx: BBOX, face_idx: face as u8 });
    }
    for (i, plank) in canon.planks.iter().enumerate() {
        for (face, c) in plank.coords.iter().enumerate() {
            let kind = match *c {
                CoordRef::Literal(v) => TokenKind::Value(quantize(v)),
                CoordRef::Attach { plank, dof } => TokenKind::Pointer(token_position(plank, dof)),
            };
            out.push(OutputToken { kind, plank_idx: i + 1, face_idx: face as u8 });
        }
    }
    out.push(OutputToken { kind: TokenKind::Eos, plank_idx: canon.num_cuboids(), face_idx: 0 });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("token stream does not start with SOS")]
    MissingSos,
    #[error("pointer at position {at} targets position {target}, which is not an earlier DOF token")]
    MalformedPointer { at: usize, target: usize },
    #[error("SOS token at position {0} inside the stream")]
    UnexpectedSos(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecodeDiagnostic {
    /// No complete bounding box was decoded.
    BboxMissing,
    /// Fewer than six tokens after the last complete cuboid.
    IncompletePlank { tokens: usize },
    /// Decoded cuboid (output order) dropped for zero or negative volume.
    ZeroVolumeDropped { plank: usize },
    /// A reference into a dropped or same plank was replaced by its value.
    ReferenceInlined { plank: usize, dof: Dof },
    /// Stream ended without EOS.
    MissingEos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub program: Program,
    pub bbox_present: bool,
    pub diagnostics: Vec<DecodeDiagnostic>,
}

/// Inverse of [`encode_output`]. Truncates at the first EOS, drops an
/// incomplete trailing cuboid and zero-volume planks.
pub fn decode_output(tokens: &[OutputToken]) -> Result<Decoded, DecodeError> {
    match tokens.first() {
        Some(t) if t.kind == TokenKind::Sos => {}
        _ => return Err(DecodeError::MissingSos),
    }
    let mut diagnostics = Vec::new();
    let mut dofs: Vec<TokenKind> = Vec::new();
    let mut saw_eos = false;
    for (pos, t) in tokens.iter().enumerate().skip(1) {
        match t.kind {
            TokenKind::Eos => {
                saw_eos = true;
                break;
            }
            TokenKind::Sos => return Err(DecodeError::UnexpectedSos(pos)),
            TokenKind::Pointer(target) if target == 0 || target >= pos => {
                return Err(DecodeError::MalformedPointer { at: pos, target });
            }
            k => dofs.push(k),
        }
    }
    if !saw_eos {
        diagnostics.push(DecodeDiagnostic::MissingEos);
    }
    let rest = dofs.len() % 6;
    if rest != 0 {
        diagnostics.push(DecodeDiagnostic::IncompletePlank { tokens: rest });
        dofs.truncate(dofs.len() - rest);
    }
    if dofs.is_empty() {
        diagnostics.push(DecodeDiagnostic::BboxMissing);
        return Ok(Decoded { program: Program::new([0.0; 6]), bbox_present: false, diagnostics });
    }

    // Values of every DOF token, following pointer chains backwards.
    let mut values = vec![0.0; dofs.len()];
    for (i, k) in dofs.iter().enumerate() {
        values[i] = match *k {
            TokenKind::Value(b) => dequantize(b),
            TokenKind::Pointer(target) => values[target - 1],
            _ => unreachable!(),
        };
    }
    let n_cuboids = dofs.len() / 6;
    let mut bbox = [0.0; 6];
    bbox.copy_from_slice(&values[..6]);
    for (d, k) in dofs[..6].iter().enumerate() {
        if matches!(k, TokenKind::Pointer(_)) {
            diagnostics.push(DecodeDiagnostic::ReferenceInlined { plank: BBOX, dof: Dof::ALL[d] });
        }
    }

    // Drop zero-volume planks; renumber the survivors.
    let mut new_index: Vec<Option<usize>> = vec![None; n_cuboids];
    new_index[0] = Some(0);
    let mut kept = 1;
    for (c, slot) in new_index.iter_mut().enumerate().skip(1) {
        let v = &values[6 * c..6 * c + 6];
        if (0..3).all(|a| v[a] < v[a + 3]) {
            *slot = Some(kept);
            kept += 1;
        } else {
            diagnostics.push(DecodeDiagnostic::ZeroVolumeDropped { plank: c });
        }
    }

    let mut planks = Vec::with_capacity(kept - 1);
    for c in 1..n_cuboids {
        if new_index[c].is_none() {
            continue;
        }
        let coords = std::array::from_fn(|d| {
            let i = 6 * c + d;
            match dofs[i] {
                TokenKind::Pointer(target) => {
                    let (tc, tdof) = position_dof(target).expect("pointer targets were checked");
                    match new_index[tc] {
                        Some(nt) if tc != c => CoordRef::Attach { plank: nt, dof: tdof },
                        _ => {
                            diagnostics.push(DecodeDiagnostic::ReferenceInlined { plank: c, dof: Dof::ALL[d] });
                            CoordRef::Literal(values[i])
                        }
                    }
                }
                _ => CoordRef::Literal(values[i]),
            }
        });
        planks.push(Plank { coords });
    }
    Ok(Decoded { program: Program { scale_mm_per_unit: 1.0, bbox, planks }, bbox_present: true, diagnostics })
}

/// Legal next tokens given a prefix that starts with SOS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointerMask {
    /// Indexed by vocabulary id (`0..VOCAB_SIZE`).
    pub vocab: Vec<bool>,
    /// Indexed by prior output position (`0..prefix.len()`).
    pub positions: Vec<bool>,
}

impl PointerMask {
    pub fn legal_positions(&self) -> Vec<usize> {
        self.positions.iter().enumerate().filter(|(_, &ok)| ok).map(|(i, _)| i).collect()
    }
}

/// Mask for the token at position `prefix.len()`.
///
/// Value bins are always legal, EOS only at a cuboid boundary, SOS never.
/// A prior position is legal iff it is a DOF token of a different cuboid on
/// the same axis, on the same side for the box and the opposite side
/// otherwise.
pub fn legal_pointer_mask(prefix: &[OutputToken]) -> PointerMask {
    let t = prefix.len().max(1);
    let (cuboid, dof) = position_dof(t).expect("t >= 1");
    let mut vocab = vec![true; VOCAB_SIZE];
    vocab[SOS_ID] = false;
    vocab[EOS_ID] = dof == Dof::XMin;
    let positions = (0..prefix.len())
        .map(|pos| match position_dof(pos) {
            Some((tc, tdof)) if tc != cuboid => cuboid != BBOX && attachment_is_legal(dof, tc, tdof),
            _ => false,
        })
        .collect();
    PointerMask { vocab, positions }
}
