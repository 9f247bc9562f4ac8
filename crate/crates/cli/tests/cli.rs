use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use curvegait::mesh::io::{save_mesh, MeshFormat};
use curvegait::mesh::shapes;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_curvegait"));
    c.env_remove("CURVEGAIT_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path, gait: &str) -> PathBuf {
    let out = dir.join(gait);
    let o = run(&["synth", "--gait", gait, "--cycles", "2", "--fpc", "8", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out.join("sequence.json")
}

#[test]
fn synth_writes_frames_and_manifests() {
    let tmp = TempDir::new().unwrap();
    let seq = synth(tmp.path(), "locked-left-knee");
    let dir = seq.parent().unwrap();
    let m = json(&seq);
    assert_eq!(m["gait_type"], "locked-left-knee");
    assert_eq!(m["files"].as_array().unwrap().len(), 16);
    assert_eq!(m["labels"][4], "contact-left");
    assert_eq!(m["body_height"], 1.73);
    let run = json(&dir.join("run.json"));
    let listed: Vec<&str> = run["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(listed.len(), 17);
    for f in &listed {
        assert!(dir.join(f).is_file(), "{f}");
    }
    let leftovers = fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp"))
        .count();
    assert_eq!(leftovers, 0);
}

#[test]
fn usage_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("x");
    for args in [
        vec!["synth", "--fpc", "7", "--out", p(&out)],
        vec!["synth", "--fpc", "6", "--out", p(&out)],
        vec!["synth", "--gait", "skipping", "--out", p(&out)],
        vec!["synth", "--cycles", "0", "--out", p(&out)],
        vec!["analyze", "seq.json", "bogus", "--out", p(&out)],
        vec!["curv"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&run(&args)), 2, "{args:?}");
    }
    assert!(!out.exists());
}

#[test]
fn knees_classify_and_repeat_byte_for_byte() {
    let tmp = TempDir::new().unwrap();
    let seq = synth(tmp.path(), "normal");
    let outs: Vec<PathBuf> = (0..2).map(|i| tmp.path().join(format!("knees{i}"))).collect();
    for out in &outs {
        let o = run(&["analyze", p(&seq), "knees", "--out", p(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let c = json(&outs[0].join("classification.json"));
    assert_eq!(c["class"], "SymmetricNormal");
    assert_eq!(c["gait_type"], "normal");
    for f in ["knees.csv", "knees.json", "classification.json", "run.json"] {
        assert_eq!(
            fs::read(outs[0].join(f)).unwrap(),
            fs::read(outs[1].join(f)).unwrap(),
            "{f}"
        );
    }
    let csv = fs::read_to_string(outs[0].join("knees.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("frame,posture,side,K,H,K_abs,K_rms"));
    assert_eq!(csv.lines().count(), 1 + 32);
}

#[test]
fn locked_average_shows_quiet_left_knee() {
    let tmp = TempDir::new().unwrap();
    let seq = synth(tmp.path(), "locked-left-knee");
    let out = tmp.path().join("avg");
    let o = run(&["analyze", p(&seq), "average", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let a = json(&out.join("average.json"));
    assert!(a["knee_abs_mean"]["ratio"].as_f64().unwrap() < 0.5);
    assert!(out.join("average.ply").is_file());
}

#[test]
fn symmetry_writes_report_and_residual_meshes() {
    let tmp = TempDir::new().unwrap();
    let seq = synth(tmp.path(), "half-step");
    let out = tmp.path().join("sym");
    let o = run(&["analyze", p(&seq), "symmetry", "--format", "obj", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out.join("symmetry.json"));
    assert_eq!(r["pairs"].as_array().unwrap().len(), 8);
    assert!(out.join("residual_0002_0006.obj").is_file());
}

#[test]
fn mixed_topology_names_the_frame() {
    let tmp = TempDir::new().unwrap();
    let seq = synth(tmp.path(), "normal");
    let sphere = save_mesh(&shapes::icosphere::<f64>(1.0, 2), None, MeshFormat::Ply).unwrap();
    fs::write(seq.parent().unwrap().join("frame_0003.ply"), sphere).unwrap();
    let o = run(&["analyze", p(&seq), "knees", "--out", p(&tmp.path().join("k"))]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("frame_0003.ply"));
}

#[test]
fn curv_reports_gauss_bonnet_and_flatness() {
    let tmp = TempDir::new().unwrap();
    let sphere = tmp.path().join("sphere.obj");
    fs::write(
        &sphere,
        save_mesh(&shapes::icosphere::<f64>(1.0, 3), None, MeshFormat::Obj).unwrap(),
    )
    .unwrap();
    let out = tmp.path().join("c");
    assert_eq!(code(&run(&["curv", p(&sphere), "--out", p(&out)])), 0);
    let s = json(&out.join("sphere.gaussian.json"));
    assert!((s["gauss_bonnet_total"].as_f64().unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-6);
    assert!(s["min"].as_f64().unwrap() > 0.0);
    assert!(out.join("sphere.gaussian.ply").is_file());

    let plane = tmp.path().join("plane.ply");
    fs::write(
        &plane,
        save_mesh(&shapes::plane_grid::<f64>(10, 10, 0.1), None, MeshFormat::Ply).unwrap(),
    )
    .unwrap();
    assert_eq!(
        code(&run(&["curv", p(&plane), "--type", "gaussian", "--out", p(&out)])),
        0
    );
    let s = json(&out.join("plane.gaussian.json"));
    assert!(s["mean"].as_f64().unwrap().abs() < 1e-9);
    assert!(s["gauss_bonnet_total"].is_null());
}

#[test]
fn runtime_errors_exit_one() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    assert_eq!(code(&run(&["curv", "missing.ply", "--out", p(&out)])), 1);
    let bad = tmp.path().join("bad.obj");
    fs::write(&bad, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\nf 1 2 3\nf 1 2 3\n").unwrap();
    let o = run(&["validate", p(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("non_manifold_edges"));
    assert_eq!(code(&run(&["curv", p(&bad), "--out", p(&out)])), 1);
    let o = bin()
        .env("CURVEGAIT_THREADS", "lots")
        .args(["validate", p(&bad)])
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("CURVEGAIT_THREADS"));
}

#[test]
fn thread_cap_does_not_change_output() {
    let tmp = TempDir::new().unwrap();
    let sphere = tmp.path().join("s.ply");
    fs::write(
        &sphere,
        save_mesh(&shapes::icosphere::<f64>(1.0, 2), None, MeshFormat::Ply).unwrap(),
    )
    .unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(code(&run(&["curv", p(&sphere), "--type", "rms", "--out", p(&a)])), 0);
    let o = bin()
        .env("CURVEGAIT_THREADS", "1")
        .args(["curv", p(&sphere), "--type", "rms", "--out", p(&b)])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    for f in ["s.rms.json", "s.rms.ply"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let o = run(&["validate", p(&sphere), "--out", p(&a)]);
    assert_eq!(code(&o), 0);
    assert!(a.join("validation.json").is_file());
}
