//! Synthetic cabinet corpus.
//!
//! Cabinets are built in quantization-bin space so every literal is a bin
//! centre: a shell (two sides, top, bottom, optional back) attached to the
//! bounding box, then interior regions split recursively by shelves and
//! dividers whose end faces attach to the planks bounding the region.

use std::collections::HashSet;
use std::fs;
use std::io::{self, BufWriter, Write as _};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{dequantize, write_jsonl, SequenceSample, TokenKind, NUM_BINS};
use crate::geom::Dof;
use crate::program::{print_program, CoordRef, Plank, Program, BBOX};
use crate::projector::{drawing_to_json, project_program, DrawingSet};

/// Missing fields in a JSON config take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub seed: u64,
    pub min_planks: usize,
    pub max_planks: usize,
    pub max_edges: usize,
    /// Outer dimensions in millimetres, `[lo, hi]`.
    pub width_mm: [f64; 2],
    pub depth_mm: [f64; 2],
    pub height_mm: [f64; 2],
    pub thickness_mm: [f64; 2],
    pub back_thickness_mm: [f64; 2],
    pub back_prob: f64,
    /// Smallest compartment side left by a split.
    pub min_cell_mm: f64,
    /// Recursion limit for shelves and dividers; 0 gives the bare shell.
    pub max_split_depth: usize,
    /// Probability that a split is a shelf rather than a divider.
    pub shelf_prob: f64,
    pub max_retries: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            min_planks: 4,
            max_planks: 20,
            max_edges: 300,
            width_mm: [400.0, 1200.0],
            depth_mm: [300.0, 600.0],
            height_mm: [600.0, 2200.0],
            thickness_mm: [15.0, 25.0],
            back_thickness_mm: [9.0, 18.0],
            back_prob: 0.7,
            min_cell_mm: 120.0,
            max_split_depth: 4,
            shelf_prob: 0.6,
            max_retries: 100,
        }
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("no cabinet passed the filters after {0} attempts")]
    RetryExhausted(usize),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Config(m.into()));
        if !(4 <= self.min_planks && self.min_planks <= self.max_planks && self.max_planks <= 20) {
            return bad("plank range must satisfy 4 <= min <= max <= 20");
        }
        if self.max_edges == 0 {
            return bad("max_edges must be positive");
        }
        for r in [self.width_mm, self.depth_mm, self.height_mm, self.thickness_mm, self.back_thickness_mm] {
            if !(r[0] > 0.0 && r[0] <= r[1]) {
                return bad("ranges must be positive and ordered");
            }
        }
        if !(0.0..=1.0).contains(&self.back_prob) || !(0.0..=1.0).contains(&self.shelf_prob) {
            return bad("probabilities must lie in [0, 1]");
        }
        Ok(())
    }
}

type Ref = (usize, Dof);

/// Interior box in bins with the attachment target of each face.
#[derive(Debug, Clone)]
struct Region {
    lo: [i64; 3],
    hi: [i64; 3],
    refs: [Ref; 6],
    depth: usize,
}

struct Builder {
    planks: Vec<[CoordRef; 6]>,
}

fn lit(bin: i64) -> CoordRef {
    CoordRef::Literal(dequantize(bin as u16))
}

fn at((plank, dof): Ref) -> CoordRef {
    CoordRef::Attach { plank, dof }
}

impl Builder {
    /// Adds a plank; returns its cuboid index.
    fn push(&mut self, coords: [CoordRef; 6]) -> usize {
        self.planks.push(coords);
        self.planks.len()
    }
}

fn bins(mm: f64, mm_per_bin: f64) -> i64 {
    ((mm / mm_per_bin).round() as i64).max(1)
}

/// One cabinet; the program is already in canonical order.
pub fn gen_cabinet(rng: &mut impl Rng, c: &GenConfig) -> Result<Program, GenError> {
    c.validate()?;
    for _ in 0..c.max_retries.max(1) {
        let p = gen_once(rng, c);
        let n = p.planks.len();
        if n < c.min_planks || n > c.max_planks {
            continue;
        }
        let Ok(d) = project_program(&p) else { continue };
        if d.count_edges() > c.max_edges {
            continue;
        }
        return Ok(p.canonicalize().expect("generated programs are acyclic"));
    }
    Err(GenError::RetryExhausted(c.max_retries.max(1)))
}

fn uniform(rng: &mut impl Rng, r: [f64; 2]) -> f64 {
    if r[0] < r[1] {
        rng.random_range(r[0]..=r[1])
    } else {
        r[0]
    }
}

fn gen_once(rng: &mut impl Rng, c: &GenConfig) -> Program {
    let dims_mm = [uniform(rng, c.width_mm), uniform(rng, c.depth_mm), uniform(rng, c.height_mm)];
    let longest = dims_mm.iter().cloned().fold(0.0, f64::max);
    let full = NUM_BINS as i64 - 1;
    let mm_per_bin = longest / full as f64;
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for a in 0..3 {
        let ext = ((dims_mm[a] / mm_per_bin).round() as i64).clamp(1, full);
        lo[a] = (full - ext) / 2;
        hi[a] = lo[a] + ext;
    }
    let bbox: [f64; 6] = std::array::from_fn(|i| dequantize(if i < 3 { lo[i] } else { hi[i - 3] } as u16));
    let t = bins(uniform(rng, c.thickness_mm), mm_per_bin);
    let min_cell = bins(c.min_cell_mm, mm_per_bin);
    let b = |dof: Dof| at((BBOX, dof));
    use Dof::*;

    let mut bld = Builder { planks: Vec::new() };
    let left = bld.push([b(XMin), b(YMin), b(ZMin), lit(lo[0] + t), b(YMax), b(ZMax)]);
    let right = bld.push([lit(hi[0] - t), b(YMin), b(ZMin), b(XMax), b(YMax), b(ZMax)]);
    let bottom = bld.push([at((left, XMax)), b(YMin), b(ZMin), at((right, XMin)), b(YMax), lit(lo[2] + t)]);
    let top = bld.push([at((left, XMax)), b(YMin), lit(hi[2] - t), at((right, XMin)), b(YMax), b(ZMax)]);
    let mut inner = Region {
        lo: [lo[0] + t, lo[1], lo[2] + t],
        hi: [hi[0] - t, hi[1], hi[2] - t],
        refs: [(left, XMax), (BBOX, YMin), (bottom, ZMax), (right, XMin), (BBOX, YMax), (top, ZMin)],
        depth: 0,
    };
    if rng.random_bool(c.back_prob) {
        let tb = bins(uniform(rng, c.back_thickness_mm), mm_per_bin);
        if hi[1] - tb - lo[1] >= min_cell {
            let back = bld.push([
                at((left, XMax)),
                lit(hi[1] - tb),
                at((bottom, ZMax)),
                at((right, XMin)),
                b(YMax),
                at((top, ZMin)),
            ]);
            inner.hi[1] = hi[1] - tb;
            inner.refs[4] = (back, YMin);
        }
    }

    let target = rng.random_range(c.min_planks..=c.max_planks);
    let mut open = vec![inner];
    while bld.planks.len() < target && !open.is_empty() {
        let i = rng.random_range(0..open.len());
        let r = open.swap_remove(i);
        if r.depth >= c.max_split_depth {
            continue;
        }
        let shelf_first = rng.random_bool(c.shelf_prob);
        let axes = if shelf_first { [2, 0] } else { [0, 2] };
        let Some(axis) = axes.into_iter().find(|&a| r.hi[a] - r.lo[a] >= 2 * min_cell + t) else {
            continue;
        };
        let pos = rng.random_range(r.lo[axis] + min_cell..=r.hi[axis] - min_cell - t);
        let (dmin, dmax) = (Dof::of(axis, false), Dof::of(axis, true));
        let coords: [CoordRef; 6] = std::array::from_fn(|k| {
            let dof = Dof::ALL[k];
            if dof == dmin {
                lit(pos)
            } else if dof == dmax {
                lit(pos + t)
            } else {
                at(r.refs[k])
            }
        });
        let id = bld.push(coords);
        let mut a = r.clone();
        a.hi[axis] = pos;
        a.refs[dmax.index()] = (id, dmin);
        a.depth += 1;
        let mut bb = r;
        bb.lo[axis] = pos + t;
        bb.refs[dmin.index()] = (id, dmax);
        bb.depth += 1;
        open.push(a);
        open.push(bb);
    }

    Program {
        scale_mm_per_unit: longest / 2.0,
        bbox,
        planks: bld.planks.into_iter().map(|coords| Plank { coords }).collect(),
    }
}

/// Generator for sample slot `index`, independent of every other slot.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub id: String,
    pub program: Program,
    pub drawing: DrawingSet,
    pub sequence: SequenceSample,
}

impl Sample {
    pub fn from_program(id: impl Into<String>, program: Program) -> Self {
        let id = id.into();
        let drawing = project_program(&program).expect("generated programs resolve");
        let sequence = SequenceSample::new(id.clone(), &drawing, &program).expect("generated programs encode");
        Self { id, program, drawing, sequence }
    }
}

/// Output token stream as a dedup key.
fn token_key(s: &Sample) -> Vec<(u8, usize)> {
    s.sequence
        .output
        .iter()
        .map(|t| match t.kind {
            TokenKind::Sos => (0, 0),
            TokenKind::Eos => (1, 0),
            TokenKind::Value(b) => (2, b as usize),
            TokenKind::Pointer(p) => (3, p),
        })
        .collect()
}

/// Keeps the first of every group of samples with identical token streams.
pub fn dedup_samples(samples: Vec<Sample>) -> Vec<Sample> {
    let mut seen = HashSet::new();
    samples.into_iter().filter(|s| seen.insert(token_key(s))).collect()
}

/// `n` distinct cabinets with ids `000000..`; deterministic in `c.seed`.
pub fn gen_samples(n: usize, c: &GenConfig) -> Result<Vec<Sample>, GenError> {
    c.validate()?;
    let mut out: Vec<Sample> = Vec::with_capacity(n);
    let mut seen = HashSet::new();
    let mut slot = 0u64;
    let mut stale_batches = 0;
    while out.len() < n {
        let want = n - out.len();
        let batch = (want + want / 8 + 4) as u64;
        let progs: Vec<Result<Program, GenError>> =
            (slot..slot + batch).into_par_iter().map(|i| gen_cabinet(&mut sample_rng(c.seed, i), c)).collect();
        slot += batch;
        let before = out.len();
        for p in progs {
            if out.len() == n {
                break;
            }
            let s = Sample::from_program(format!("{:06}", out.len()), p?);
            if seen.insert(token_key(&s)) {
                out.push(s);
            }
        }
        if out.len() == before {
            stale_batches += 1;
            if stale_batches > 16 {
                return Err(GenError::RetryExhausted(slot as usize));
            }
        }
    }
    Ok(out)
}

pub const SPLIT_NAMES: [&str; 3] = ["train", "val", "test"];

/// Split sizes for `n` samples; the last split takes the rounding slack.
pub fn split_sizes(n: usize, fractions: [f64; 3]) -> [usize; 3] {
    let total: f64 = fractions.iter().sum();
    let a = ((fractions[0] / total) * n as f64).round() as usize;
    let b = (((fractions[1] / total) * n as f64).round() as usize).min(n - a.min(n));
    let a = a.min(n);
    [a, b, n - a - b]
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub counts: [usize; 3],
    pub files: usize,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> GenError + '_ {
    move |source| GenError::Io { path: path.to_path_buf(), source }
}

/// Writes `root/{split}/{id}.plank`, `root/{split}/{id}.drawing.json` and
/// `root/{split}.jsonl`.
pub fn build_dataset(root: &Path, n: usize, fractions: [f64; 3], c: &GenConfig) -> Result<DatasetSummary, GenError> {
    if n == 0 || fractions.iter().any(|f| *f < 0.0) || fractions.iter().sum::<f64>() <= 0.0 {
        return Err(GenError::Config("need n >= 1 and non-negative split fractions".into()));
    }
    let samples = gen_samples(n, c)?;
    write_dataset(root, &samples, split_sizes(n, fractions))
}

pub fn write_dataset(root: &Path, samples: &[Sample], counts: [usize; 3]) -> Result<DatasetSummary, GenError> {
    let mut files = 0;
    let mut start = 0;
    for (k, name) in SPLIT_NAMES.iter().enumerate() {
        let part = &samples[start..(start + counts[k]).min(samples.len())];
        start += counts[k];
        let dir = root.join(name);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        for s in part {
            let plank = dir.join(format!("{}.plank", s.id));
            fs::write(&plank, print_program(&s.program)).map_err(io_err(&plank))?;
            let drawing = dir.join(format!("{}.drawing.json", s.id));
            let text = serde_json::to_string_pretty(&drawing_to_json(&s.drawing)).expect("drawing serializes");
            fs::write(&drawing, text + "\n").map_err(io_err(&drawing))?;
            files += 2;
        }
        let jsonl = root.join(format!("{name}.jsonl"));
        let f = fs::File::create(&jsonl).map_err(io_err(&jsonl))?;
        let mut w = BufWriter::new(f);
        write_jsonl(&mut w, part.iter().map(|s| &s.sequence)).map_err(io_err(&jsonl))?;
        w.flush().map_err(io_err(&jsonl))?;
        files += 1;
    }
    Ok(DatasetSummary { counts, files })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(values: &[f64], lo: f64, width: f64, bins: usize) -> Self {
        let mut counts = vec![0; bins];
        for &v in values {
            let i = ((v - lo) / width).floor();
            if i >= 0.0 {
                counts[(i as usize).min(bins - 1)] += 1;
            }
        }
        Self { lo, width, counts }
    }

    pub fn render(&self, label: &str) -> String {
        let max = self.counts.iter().copied().max().unwrap_or(0).max(1);
        let mut s = format!("{label}\n");
        for (i, &c) in self.counts.iter().enumerate() {
            let a = self.lo + i as f64 * self.width;
            let bar = "#".repeat((c * 40).div_ceil(max));
            s += &format!("  [{:>7.2}, {:>7.2})  {:>6}  {}\n", a, a + self.width, c, bar);
        }
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub samples: usize,
    pub planks: Histogram,
    pub edges: Histogram,
    pub hidden_fraction: Histogram,
    pub mean_planks: f64,
    pub mean_edges: f64,
    pub mean_hidden_fraction: f64,
}

pub fn corpus_stats(items: &[(Program, DrawingSet)]) -> CorpusStats {
    let planks: Vec<f64> = items.iter().map(|(p, _)| p.planks.len() as f64).collect();
    let edges: Vec<f64> = items.iter().map(|(_, d)| d.count_edges() as f64).collect();
    let hidden: Vec<f64> = items.iter().map(|(_, d)| d.hidden_fraction()).collect();
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    CorpusStats {
        samples: items.len(),
        planks: Histogram::new(&planks, 0.0, 1.0, 22),
        edges: Histogram::new(&edges, 0.0, 25.0, 13),
        hidden_fraction: Histogram::new(&hidden, 0.0, 0.1, 10),
        mean_planks: mean(&planks),
        mean_edges: mean(&edges),
        mean_hidden_fraction: mean(&hidden),
    }
}

impl CorpusStats {
    pub fn render(&self) -> String {
        format!(
            "samples: {}\nmean planks: {:.2}  mean edges: {:.1}  mean hidden fraction: {:.3}\n{}{}{}",
            self.samples,
            self.mean_planks,
            self.mean_edges,
            self.mean_hidden_fraction,
            self.planks.render("planks"),
            self.edges.render("edges"),
            self.hidden_fraction.render("hidden fraction"),
        )
    }
}
