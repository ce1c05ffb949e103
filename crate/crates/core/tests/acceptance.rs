//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs as a plain binary (`harness = false`).

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{brute_force_match, drawn_length, edge_diff, jitter_box, reference_cabinet, random_box, raw_union_length, views_consistent, voxel_iou};
use plankforge::codec::{dequantize, quantize, snap_to_bin, BIN_WIDTH};
use plankforge::datagen::{gen_cabinet, gen_samples, sample_rng, GenConfig, Sample};
use plankforge::degrade::{inject_noise, NoiseConfig};
use plankforge::eval::{aggregate, iou, match_planks, score_model, Averaging, FailurePolicy, ModelScore};
use plankforge::program::CoordRef;
use plankforge::projector::{project, project_program, View};
use plankforge::recon::{group_blocks, union_all, verify_search, Candidates, ReconStatus, SearchConfig, DEFAULT_SNAP_TOL};
use plankforge::{decode_output, encode_input, encode_output, DrawingSet, Program};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CORPUS_SEED: u64 = 2024;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn corpus(n: usize) -> Vec<Sample> {
    gen_samples(n, &GenConfig { seed: CORPUS_SEED, ..GenConfig::default() }).expect("corpus")
}

fn macro_f1(models: Vec<ModelScore>) -> f64 {
    aggregate(models, Averaging::Macro, FailurePolicy::Zero).mean.f1
}

fn round_trip(samples: &[Sample]) -> Outcome {
    let start = Instant::now();
    let cfg = SearchConfig::with_timeout(Duration::from_secs(60));
    let results: Vec<(ModelScore, bool, ReconStatus)> = samples
        .par_iter()
        .map(|s| {
            let gt = s.program.resolve().unwrap();
            let sol = verify_search(&Candidates::new(&s.drawing, DEFAULT_SNAP_TOL), &cfg);
            let exact = sol.status != ReconStatus::Verified || edge_diff(&project(&sol.boxes()), &s.drawing) == 0;
            let score = if sol.status.has_output() {
                score_model(&group_blocks(&sol, &gt), &gt, 0.5)
            } else {
                ModelScore::failed(s.id.clone(), gt.len())
            };
            (score, exact, sol.status)
        })
        .collect();
    let elapsed = start.elapsed();
    let verified = results.iter().filter(|r| r.2 == ReconStatus::Verified).count();
    let inexact = results.iter().filter(|r| !r.1).count();
    let f1 = macro_f1(results.into_iter().map(|r| r.0).collect());
    Outcome {
        name: "round-trip soundness",
        pass: f1 >= 0.95 && inexact == 0 && elapsed <= Duration::from_secs(600),
        detail: format!(
            "{} cabinets, {verified} verified, mean F1 {f1:.4} (>= 0.95), {inexact} inexact re-projections (0), {:.1?} (<= 10 min)",
            samples.len(),
            elapsed
        ),
    }
}

fn noise_direction(samples: &[Sample]) -> Outcome {
    let cfg = SearchConfig::with_timeout(Duration::from_secs(60));
    let verified_noisy = samples
        .par_iter()
        .enumerate()
        .filter(|(i, s)| {
            let noisy = inject_noise(&s.drawing, &NoiseConfig::deletion_only(0.10, *i as u64));
            verify_search(&Candidates::new(&noisy, DEFAULT_SNAP_TOL), &cfg).status == ReconStatus::Verified
        })
        .count();
    let union_f1 = |noise: Option<f64>| {
        let models = samples
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let gt = s.program.resolve().unwrap();
                let d: DrawingSet = match noise {
                    Some(r) => inject_noise(&s.drawing, &NoiseConfig::new(r, i as u64)),
                    None => s.drawing.clone(),
                };
                let sol = union_all(&Candidates::new(&d, DEFAULT_SNAP_TOL));
                score_model(&group_blocks(&sol, &gt), &gt, 0.5)
            })
            .collect();
        macro_f1(models)
    };
    let (clean, noisy) = (union_f1(None), union_f1(Some(0.30)));
    let rate = verified_noisy as f64 / samples.len() as f64;
    let drop = clean - noisy;
    Outcome {
        name: "noise direction",
        pass: rate <= 0.05 && drop >= 0.40,
        detail: format!(
            "verified at 10% deletion {:.1}% (<= 5%); union F1 clean {clean:.4} vs 30% noise {noisy:.4}, drop {:.1} points (>= 40)",
            100.0 * rate,
            100.0 * drop
        ),
    }
}

fn codec_exactness() -> Outcome {
    let cfg = GenConfig::default();
    let n = 10_000u64;
    let ok = (0..n)
        .into_par_iter()
        .filter(|&i| {
            let p = gen_cabinet(&mut sample_rng(CORPUS_SEED, i), &cfg).unwrap();
            let dec = decode_output(&encode_output(&p).unwrap()).unwrap();
            dec.diagnostics.is_empty() && dec.program.approx_eq(&p.canonicalize().unwrap(), 0.0)
        })
        .count();
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut worst = 0.0f64;
    for _ in 0..1_000_000 {
        let x: f64 = rng.random_range(-1.0..=1.0);
        worst = worst.max((dequantize(quantize(x)) - x).abs());
    }
    Outcome {
        name: "codec exactness",
        pass: ok as u64 == n && worst <= 1.0 / 511.0,
        detail: format!("{ok}/{n} programs decode to themselves; max quantization error {worst:.3e} (<= {:.3e})", 1.0 / 511.0),
    }
}

fn iou_oracle() -> Outcome {
    let worst = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ i);
            let a = random_box(&mut rng);
            let b = if i % 2 == 0 { jitter_box(&a, &mut rng, 0.4) } else { random_box(&mut rng) };
            (iou(&a, &b) - voxel_iou(&a, &b, 100, &mut rng)).abs()
        })
        .reduce(|| 0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut agree = 0;
    for _ in 0..500 {
        let ng = rng.random_range(0..=6);
        let np = rng.random_range(0..=6);
        let gt: Vec<_> = (0..ng).map(|_| random_box(&mut rng)).collect();
        let pred: Vec<_> = (0..np)
            .map(|i| if i < ng && rng.random_bool(0.7) { jitter_box(&gt[i], &mut rng, 0.15) } else { random_box(&mut rng) })
            .collect();
        let mut got: Vec<(usize, usize)> = match_planks(&pred, &gt, 0.5).iter().map(|m| (m.pred, m.gt)).collect();
        got.sort_unstable();
        agree += (got == brute_force_match(&pred, &gt, 0.5)) as usize;
    }
    Outcome {
        name: "IoU oracle",
        pass: worst <= 2e-3 && agree == 500,
        detail: format!("max |analytic - voxel| {worst:.2e} on 1000 pairs (<= 2e-3); matching agrees with brute force {agree}/500"),
    }
}

fn projection_invariants() -> Outcome {
    let cfg = GenConfig::default();
    let ok = (0..1000u64)
        .into_par_iter()
        .filter(|&i| {
            let boxes = gen_cabinet(&mut sample_rng(CORPUS_SEED + 1, i), &cfg).unwrap().resolve().unwrap();
            let d = project(&boxes);
            views_consistent(&d) && View::ALL.iter().all(|&v| (drawn_length(&d, v) - raw_union_length(&boxes, v)).abs() < 1e-9)
        })
        .count();
    Outcome {
        name: "projection invariants",
        pass: ok == 1000,
        detail: format!("{ok}/1000 samples keep breakpoint equality and total length"),
    }
}

fn reference_fixture() -> Outcome {
    let p = reference_cabinet();
    let mut issues = Vec::new();
    let d = project_program(&p).unwrap();
    if encode_input(&d).len() != 4 * d.count_edges() {
        issues.push("input length".to_string());
    }
    let dec = decode_output(&encode_output(&p).unwrap()).unwrap();
    let order = p.canonical_order().unwrap();
    if order != [0, 1, 2, 3, 6, 4, 7, 5] {
        issues.push(format!("canonical order {order:?}"));
    }
    // undo the canonical order so the result lines up with the reference
    let mut inverse = vec![0; order.len()];
    for (pos, &old) in order.iter().enumerate() {
        inverse[old] = pos;
    }
    let back = dec.program.reordered(&inverse);
    let want = Program {
        scale_mm_per_unit: 1.0,
        bbox: p.bbox.map(snap_to_bin),
        planks: p
            .planks
            .iter()
            .map(|pl| plankforge::Plank {
                coords: pl.coords.map(|c| match c {
                    CoordRef::Literal(v) => CoordRef::Literal(snap_to_bin(v)),
                    r => r,
                }),
            })
            .collect(),
    };
    if !dec.diagnostics.is_empty() {
        issues.push(format!("diagnostics {:?}", dec.diagnostics));
    }
    if back != want {
        issues.push("decoded program differs".into());
    }
    if (0..6).any(|k| (back.bbox[k] - p.bbox[k]).abs() > BIN_WIDTH / 2.0) {
        issues.push(format!("bbox {:?}", back.bbox));
    }
    Outcome {
        name: "reference cabinet",
        pass: issues.is_empty(),
        detail: if issues.is_empty() {
            format!("7 planks, {} edges, bbox {:?} reproduced at quantized precision", d.count_edges(), back.bbox.map(|v| (v * 1e3).round() / 1e3))
        } else {
            issues.join("; ")
        },
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let samples = corpus(200);
    let outcomes = [
        round_trip(&samples),
        noise_direction(&samples[..100]),
        codec_exactness(),
        iou_oracle(),
        projection_invariants(),
        reference_fixture(),
    ];
    for o in &outcomes {
        println!("{} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("acceptance: {}/{} passed in {:.1?}", outcomes.len() - failed, outcomes.len(), start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
