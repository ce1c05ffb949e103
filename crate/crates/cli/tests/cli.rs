use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use plankforge::codec::BIN_WIDTH;
use plankforge::{parse_program, Aabb};

const REFERENCE_CABINET: &str = include_str!("../../core/tests/fixtures/reference_cabinet.plank");
const CUBOID: &str = "bbox = Cuboid(-0.5, -0.25, -0.75, 0.5, 0.25, 0.75)\nplank1 = Cuboid(bbox_1, bbox_2, bbox_3, bbox_4, bbox_5, bbox_6)\n";

fn plankforge(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plankforge"))
        .args(args)
        .current_dir(dir)
        .env_remove("PLANKFORGE_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = plankforge(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for e in fs::read_dir(root).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(tree(&p).into_iter().map(|(n, b)| (format!("{}/{n}", p.file_name().unwrap().to_string_lossy()), b)));
        } else {
            out.push((p.file_name().unwrap().to_string_lossy().into(), fs::read(&p).unwrap()));
        }
    }
    out.sort();
    out
}

#[test]
fn gen_is_deterministic_and_env_seed_wins() {
    let t = tempfile::tempdir().unwrap();
    ok(&["gen", "--n", "10", "--seed", "7", "--out", "a"], t.path());
    ok(&["gen", "--n", "10", "--seed", "7", "--out", "b"], t.path());
    assert_eq!(tree(&t.path().join("a")), tree(&t.path().join("b")));

    let out = Command::new(env!("CARGO_BIN_EXE_plankforge"))
        .args(["gen", "--n", "10", "--seed", "1", "--out", "c"])
        .current_dir(t.path())
        .env("PLANKFORGE_SEED", "7")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed: 7"));
    assert_eq!(tree(&t.path().join("a")), tree(&t.path().join("c")));
    assert!(t.path().join("a/train.jsonl").exists());
}

#[test]
fn single_cuboid_reconstructs_verified() {
    let t = tempfile::tempdir().unwrap();
    fs::write(t.path().join("c.plank"), CUBOID).unwrap();
    ok(&["project", "c.plank", "--out", "c.drawing.json", "--svg", "c.svg"], t.path());
    let sol: serde_json::Value =
        serde_json::from_str(&ok(&["recon", "c.drawing.json", "--variant", "verify", "--timeout-secs", "5", "--obj", "c.obj"], t.path()))
            .unwrap();
    assert_eq!(sol["status"], "Verified");
    assert_eq!(sol["blocks"].as_array().unwrap().len(), 1);
    assert!(fs::read_to_string(t.path().join("c.svg")).unwrap().contains("<svg"));
    assert_eq!(fs::read_to_string(t.path().join("c.obj")).unwrap().lines().filter(|l| l.starts_with("f ")).count(), 12);

    let union: serde_json::Value = serde_json::from_str(&ok(&["recon", "c.drawing.json", "--variant", "union"], t.path())).unwrap();
    assert_eq!(union["status"], "UnionFallback");
}

#[test]
fn reference_project_encode_decode_round_trip() {
    let t = tempfile::tempdir().unwrap();
    fs::write(t.path().join("reference.plank"), REFERENCE_CABINET).unwrap();
    ok(&["project", "reference.plank", "--out", "reference.drawing.json"], t.path());
    ok(&["encode", "reference.plank", "--drawing", "reference.drawing.json", "--out", "reference.jsonl"], t.path());
    let text = ok(&["decode", "reference.jsonl"], t.path());
    let back = parse_program(&text).unwrap();
    let want = parse_program(REFERENCE_CABINET).unwrap();
    assert_eq!(back.planks.len(), want.planks.len());
    assert_eq!(back.attachment_count(), want.attachment_count());
    let sort = |mut v: Vec<Aabb>| {
        v.sort_by(|a, b| a.coords().partial_cmp(&b.coords()).unwrap());
        v
    };
    for (a, b) in sort(back.resolve().unwrap()).iter().zip(sort(want.resolve().unwrap()).iter()) {
        for k in 0..6 {
            assert!((a.coords()[k] - b.coords()[k]).abs() <= BIN_WIDTH / 2.0);
        }
    }
}

#[test]
fn batch_recon_then_eval() {
    let t = tempfile::tempdir().unwrap();
    ok(&["gen", "--n", "6", "--seed", "3", "--out", "ds", "--splits", "0,0,1"], t.path());
    let summary: serde_json::Value =
        serde_json::from_str(&ok(&["--jobs", "2", "recon", "ds/test", "--gt", "ds/test", "--out", "pred"], t.path())).unwrap();
    assert_eq!(summary["models"], 6);
    assert!(t.path().join("pred/manifest.json").exists());
    let out = plankforge(&["eval", "--pred", "pred", "--gt", "ds/test", "--averaging", "micro"], t.path());
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["n_models"], 6);
    assert!(report["mean"]["f1"].as_f64().unwrap() > 0.5);
    assert!(!out.stderr.is_empty(), "table goes to stderr");

    let stats = ok(&["stats", "ds"], t.path());
    assert!(stats.contains("samples: 6"));
    let stats: serde_json::Value = serde_json::from_str(&ok(&["stats", "ds", "--json"], t.path())).unwrap();
    assert_eq!(stats["samples"], 6);
}

#[test]
fn noise_and_export() {
    let t = tempfile::tempdir().unwrap();
    fs::write(t.path().join("reference.plank"), REFERENCE_CABINET).unwrap();
    ok(&["project", "reference.plank", "--out", "d.json"], t.path());
    let clean: serde_json::Value = serde_json::from_str(&fs::read_to_string(t.path().join("d.json")).unwrap()).unwrap();
    let noisy: serde_json::Value =
        serde_json::from_str(&ok(&["noise", "d.json", "--noise-ratio", "0.5", "--delete-prob", "1", "--seed", "4", "--visible-only"], t.path()))
            .unwrap();
    let count = |v: &serde_json::Value, hidden: bool| -> usize {
        v["views"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|view| view["edges"].as_array().unwrap().iter())
            .filter(|e| !hidden || e["visible"] == false)
            .count()
    };
    assert!(count(&noisy, false) < count(&clean, false));
    assert_eq!(count(&noisy, true), 0);

    let obj = ok(&["export", "reference.plank", "--format", "obj"], t.path());
    assert_eq!(obj.lines().filter(|l| l.starts_with("o ")).count(), 7);
    let svg = ok(&["export", "d.json", "--format", "svg"], t.path());
    assert!(svg.contains("stroke-dasharray"));
}

#[test]
fn exit_codes() {
    let t = tempfile::tempdir().unwrap();
    assert_eq!(plankforge(&["gen", "--bogus"], t.path()).status.code(), Some(1));
    assert_eq!(plankforge(&["frobnicate"], t.path()).status.code(), Some(1));
    assert_eq!(plankforge(&["project", "missing.plank"], t.path()).status.code(), Some(1));
    fs::write(t.path().join("bad.plank"), "bbox = Cuboid(1, 2)\n").unwrap();
    assert_eq!(plankforge(&["project", "bad.plank"], t.path()).status.code(), Some(1));
    fs::write(t.path().join("bad.jsonl"), "{\"v\":2}\n").unwrap();
    assert_eq!(plankforge(&["decode", "bad.jsonl"], t.path()).status.code(), Some(1));
    assert_eq!(plankforge(&["noise", "x.json", "--noise-ratio", "2"], t.path()).status.code(), Some(1));
    assert_eq!(plankforge(&["--help"], t.path()).status.code(), Some(0));
}
