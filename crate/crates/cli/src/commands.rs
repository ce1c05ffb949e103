use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Duration;

use plankforge::codec::{read_jsonl, sample_to_json_line, DecodeDiagnostic};
use plankforge::datagen::{build_dataset, corpus_stats, GenConfig, SPLIT_NAMES};
use plankforge::degrade::{inject_noise_with_report, strip_hidden, NoiseConfig};
use plankforge::eval::{evaluate_dirs, read_plank_boxes, write_manifest, Averaging, EntryStatus, EvalManifest, EvalOptions, FailurePolicy, ManifestEntry, MANIFEST_FILE};
use plankforge::export::boxes_to_obj;
use plankforge::program::program_from_json;
use plankforge::projector::{drawing_from_json, drawing_to_json, drawing_to_svg, project_program};
use plankforge::recon::{group_blocks, solution_from_json, solution_to_json, union_all, verify_search, Candidates, ReconSolution, ReconStatus, SearchConfig, DEFAULT_SNAP_TOL};
use plankforge::{decode_output, print_program, Aabb, DrawingSet, SequenceSample};
use rayon::prelude::*;
use serde_json::json;

use crate::io::{emit, input, internal, is_json, json_text, read_drawing, read_json, read_program, seed, stem_id, write_text, CliError};
use crate::{AveragingArg, DecodeArgs, EncodeArgs, EvalArgs, ExportArgs, FailuresArg, Format, GenArgs, NoiseArgs, ProjectArgs, ReconArgs, StatsArgs, Variant};

const DRAWING_SUFFIX: &str = ".drawing.json";
const SOLUTION_SUFFIX: &str = ".solution.json";

pub fn gen(a: GenArgs) -> Result<(), CliError> {
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_value::<GenConfig>(read_json(p)?).map_err(|e| input(p, e))?,
        None => GenConfig::default(),
    };
    cfg.seed = seed(a.seed)?;
    cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
    let fractions: [f64; 3] = a.splits.as_slice().try_into().map_err(|_| CliError::Input("--splits takes three comma-separated fractions".into()))?;
    let summary = build_dataset(&a.out, a.n, fractions, &cfg).map_err(|e| match e {
        plankforge::datagen::GenError::Io { path, source } => internal(&path, source),
        e => CliError::Input(e.to_string()),
    })?;
    emit(None, &json_text(&json!({ "root": a.out, "seed": cfg.seed, "counts": summary.counts, "files": summary.files })))
}

pub fn project(a: ProjectArgs) -> Result<(), CliError> {
    let p = read_program(&a.program)?;
    let d = project_program(&p).map_err(|e| input(&a.program, e))?;
    if let Some(svg) = &a.svg {
        write_text(svg, &drawing_to_svg(&d))?;
    }
    emit(a.out.as_ref(), &json_text(&drawing_to_json(&d)))
}

pub fn noise(a: NoiseArgs) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&a.noise_ratio) || !(0.0..=1.0).contains(&a.delete_prob) || a.max_shift_frac.is_nan() || a.max_shift_frac < 0.0 {
        return Err(CliError::Input("need 0 <= noise-ratio, delete-prob <= 1 and max-shift-frac >= 0".into()));
    }
    let d = read_drawing(&a.drawing)?;
    let cfg = NoiseConfig { ratio: a.noise_ratio, delete_prob: a.delete_prob, max_shift_frac: a.max_shift_frac, seed: seed(a.seed)? };
    let (mut out, report) = inject_noise_with_report(&d, &cfg);
    log::info!("{} of {} edges selected: {} deleted, {} shifted", report.selected, d.count_edges(), report.deleted, report.shifted);
    if a.visible_only {
        out = strip_hidden(&out);
    }
    emit(a.out.as_ref(), &json_text(&drawing_to_json(&out)))
}

pub fn encode(a: EncodeArgs) -> Result<(), CliError> {
    let p = read_program(&a.program)?;
    let d = match &a.drawing {
        Some(path) => read_drawing(path)?,
        None => project_program(&p).map_err(|e| input(&a.program, e))?,
    };
    let id = a.id.clone().or_else(|| a.program.file_stem().and_then(|s| s.to_str()).map(str::to_string)).unwrap_or_default();
    let s = SequenceSample::new(id, &d, &p).map_err(|e| input(&a.program, e))?;
    emit(a.out.as_ref(), &(sample_to_json_line(&s) + "\n"))
}

pub fn decode(a: DecodeArgs) -> Result<(), CliError> {
    let f = fs::File::open(&a.input).map_err(|e| input(&a.input, e))?;
    let samples = read_jsonl(BufReader::new(f)).map_err(|e| input(&a.input, e))?;
    let mut programs = Vec::with_capacity(samples.len());
    for s in &samples {
        let dec = decode_output(&s.output).map_err(|e| CliError::Input(format!("{}: sample {}: {e}", a.input.display(), s.id)))?;
        for d in &dec.diagnostics {
            eprintln!("warning: sample {}: {}", s.id, describe(d));
        }
        if !dec.bbox_present {
            return Err(CliError::Input(format!("{}: sample {} has no bounding box", a.input.display(), s.id)));
        }
        let mut p = dec.program;
        p.scale_mm_per_unit = s.scale_mm_per_unit;
        programs.push((s.id.clone(), p));
    }
    match (&a.out, programs.as_slice()) {
        (None, [(_, p)]) => emit(None, &print_program(p)),
        (None, _) => Err(CliError::Input(format!("{} samples need --out DIR", programs.len()))),
        (Some(dir), _) => {
            for (id, p) in &programs {
                write_text(&dir.join(format!("{id}.plank")), &print_program(p))?;
            }
            Ok(())
        }
    }
}

fn describe(d: &DecodeDiagnostic) -> String {
    match d {
        DecodeDiagnostic::BboxMissing => "no complete bounding box".into(),
        DecodeDiagnostic::IncompletePlank { tokens } => format!("dropped {tokens} trailing tokens"),
        DecodeDiagnostic::ZeroVolumeDropped { plank } => format!("dropped zero-volume plank {plank}"),
        DecodeDiagnostic::ReferenceInlined { plank, dof } => format!("plank {plank} {dof}: illegal pointer replaced by its value"),
        DecodeDiagnostic::MissingEos => "no EOS token".into(),
    }
}

fn reconstruct(d: &DrawingSet, a: &ReconArgs, sample_seed: Option<u64>) -> ReconSolution {
    let c = Candidates::new(d, DEFAULT_SNAP_TOL);
    match a.variant {
        Variant::Union => union_all(&c),
        Variant::Verify => {
            let cfg = SearchConfig { timeout: Duration::from_secs(a.timeout_secs), sample_seed, ..SearchConfig::default() };
            verify_search(&c, &cfg)
        }
    }
}

/// Solution JSON; with ground truth the blocks are grouped per plank first.
fn solution_doc(sol: &ReconSolution, gt: Option<&[Aabb]>) -> (serde_json::Value, Vec<Aabb>) {
    match gt {
        Some(gt) => {
            let grouped = group_blocks(sol, gt);
            let coords: Vec<[f64; 6]> = grouped.iter().map(Aabb::coords).collect();
            (json!({ "status": sol.status, "blocks": coords }), grouped)
        }
        None => (solution_to_json(sol), sol.boxes()),
    }
}

pub fn recon(a: ReconArgs) -> Result<(), CliError> {
    let sample_seed = a.sample_solution.map(seed).transpose()?;
    if a.input.is_dir() {
        return recon_batch(&a, sample_seed);
    }
    let d = read_drawing(&a.input)?;
    let gt = a.gt.as_deref().map(read_plank_boxes).transpose().map_err(|e| CliError::Input(e.to_string()))?;
    let sol = reconstruct(&d, &a, sample_seed);
    eprintln!("status: {:?} ({} blocks, {:.1?})", sol.status, sol.blocks.len(), sol.elapsed);
    let (doc, boxes) = solution_doc(&sol, gt.as_deref());
    if let Some(obj) = &a.obj {
        write_text(obj, &boxes_to_obj(&boxes, 1.0))?;
    }
    emit(a.out.as_ref(), &json_text(&doc))
}

fn recon_batch(a: &ReconArgs, sample_seed: Option<u64>) -> Result<(), CliError> {
    let out = a.out.as_ref().ok_or_else(|| CliError::Input("a drawing directory needs --out DIR".into()))?;
    if a.obj.is_some() {
        return Err(CliError::Input("--obj applies to a single drawing".into()));
    }
    let mut ids: Vec<String> = fs::read_dir(&a.input)
        .map_err(|e| input(&a.input, e))?
        .filter_map(|e| e.ok().and_then(|e| stem_id(&e.path(), DRAWING_SUFFIX)))
        .collect();
    ids.sort();
    if ids.is_empty() {
        return Err(CliError::Input(format!("{}: no *{DRAWING_SUFFIX} files", a.input.display())));
    }
    fs::create_dir_all(out).map_err(|e| internal(out, e))?;
    let results: Vec<Result<(String, ReconStatus), CliError>> = ids
        .par_iter()
        .map(|id| {
            let d = read_drawing(&a.input.join(format!("{id}{DRAWING_SUFFIX}")))?;
            let gt = match &a.gt {
                Some(dir) => Some(read_plank_boxes(&dir.join(format!("{id}.plank"))).map_err(|e| CliError::Input(e.to_string()))?),
                None => None,
            };
            let sol = reconstruct(&d, a, sample_seed);
            let (doc, _) = solution_doc(&sol, gt.as_deref());
            write_text(&out.join(format!("{id}{SOLUTION_SUFFIX}")), &json_text(&doc))?;
            Ok((id.clone(), sol.status))
        })
        .collect();
    let mut entries = Vec::with_capacity(results.len());
    let mut counts = std::collections::BTreeMap::<String, usize>::new();
    for r in results {
        let (id, status) = r?;
        *counts.entry(format!("{status:?}")).or_default() += 1;
        entries.push(if status.has_output() {
            ManifestEntry { pred: Some(format!("{id}{SOLUTION_SUFFIX}")), id, status: EntryStatus::Ok }
        } else {
            ManifestEntry { id, pred: None, status: EntryStatus::Failed }
        });
    }
    let manifest = out.join(MANIFEST_FILE);
    write_manifest(&manifest, &EvalManifest::new(entries)).map_err(|e| internal(&manifest, e))?;
    emit(None, &json_text(&json!({ "models": ids.len(), "status": counts })))
}

pub fn eval(a: EvalArgs) -> Result<(), CliError> {
    if !(0.0..1.0).contains(&a.iou_thresh) {
        return Err(CliError::Input("iou-thresh must lie in [0, 1)".into()));
    }
    let opts = EvalOptions {
        iou_thresh: a.iou_thresh,
        averaging: match a.averaging {
            AveragingArg::Macro => Averaging::Macro,
            AveragingArg::Micro => Averaging::Micro,
        },
        failures: match a.failures {
            FailuresArg::Zero => FailurePolicy::Zero,
            FailuresArg::Exclude => FailurePolicy::Exclude,
        },
    };
    let report = evaluate_dirs(&a.pred, &a.gt, &opts).map_err(|e| CliError::Input(e.to_string()))?;
    eprint!("{}", report.table());
    let v = serde_json::to_value(&report).expect("report serializes");
    emit(a.out.as_ref(), &json_text(&v))
}

/// Boxes and their millimetre scale from a program or solution file.
fn read_boxes(path: &Path) -> Result<(Vec<Aabb>, f64), CliError> {
    if is_json(path) {
        let v = read_json(path)?;
        if v.get("status").is_some() {
            let (_, boxes) = solution_from_json(&v).map_err(|e| input(path, e))?;
            return Ok((boxes, 1.0));
        }
        let p = program_from_json(&v).map_err(|e| input(path, e))?;
        return Ok((p.resolve().map_err(|e| input(path, e))?, p.scale_mm_per_unit));
    }
    let p = read_program(path)?;
    Ok((p.resolve().map_err(|e| input(path, e))?, p.scale_mm_per_unit))
}

pub fn export(a: ExportArgs) -> Result<(), CliError> {
    let text = match a.format {
        Format::Obj => {
            let (boxes, scale) = read_boxes(&a.input)?;
            boxes_to_obj(&boxes, if a.mm { scale } else { 1.0 })
        }
        Format::Svg => {
            let d = if is_json(&a.input) && read_json(&a.input)?.get("views").is_some() {
                drawing_from_json(&read_json(&a.input)?).map_err(|e| input(&a.input, e))?
            } else {
                let p = read_program(&a.input)?;
                project_program(&p).map_err(|e| input(&a.input, e))?
            };
            drawing_to_svg(&d)
        }
    };
    emit(a.out.as_ref(), &text)
}

fn split_dirs(root: &Path) -> Vec<PathBuf> {
    let splits: Vec<PathBuf> = SPLIT_NAMES.iter().map(|s| root.join(s)).filter(|p| p.is_dir()).collect();
    if splits.is_empty() {
        vec![root.to_path_buf()]
    } else {
        splits
    }
}

pub fn stats(a: StatsArgs) -> Result<(), CliError> {
    if !a.dataset.is_dir() {
        return Err(CliError::Input(format!("{}: not a directory", a.dataset.display())));
    }
    let mut files: Vec<PathBuf> = Vec::new();
    for dir in split_dirs(&a.dataset) {
        for e in fs::read_dir(&dir).map_err(|e| input(&dir, e))? {
            let p = e.map_err(|e| input(&dir, e))?.path();
            if p.extension().is_some_and(|x| x == "plank") {
                files.push(p);
            }
        }
    }
    files.sort();
    let items: Vec<_> = files
        .par_iter()
        .map(|f| {
            let p = read_program(f)?;
            let drawing = f.with_file_name(format!("{}{DRAWING_SUFFIX}", f.file_stem().and_then(|s| s.to_str()).unwrap_or_default()));
            let d = if drawing.exists() {
                read_drawing(&drawing)?
            } else {
                project_program(&p).map_err(|e| input(f, e))?
            };
            Ok((p, d))
        })
        .collect::<Result<_, CliError>>()?;
    let s = corpus_stats(&items);
    if a.json {
        emit(None, &json_text(&serde_json::to_value(&s).expect("stats serialize")))
    } else {
        emit(None, &s.render())
    }
}
