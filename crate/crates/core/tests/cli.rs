use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn ortholog(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ortholog"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn workdir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(data("demo_scene.json"), dir.path().join("scene.json")).unwrap();
    dir
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_orthosecting_pair() {
    let dir = workdir();
    let out = ortholog(dir.path(), &["--scene", "scene.json", "verify", "--pair", "A,B"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["command"], "verify");
    for v in r["verdicts"].as_array().unwrap() {
        let (value, bound) = (v["value"].as_f64().unwrap(), v["bound"].as_f64().unwrap());
        let pass = match v["kind"].as_str().unwrap() {
            "at_most" => value <= bound,
            _ => value >= bound,
        };
        assert_eq!(pass, v["pass"].as_bool().unwrap());
    }
}

#[test]
fn regular_tetrahedron_with_itself_is_not_orthosecting() {
    let dir = workdir();
    let out = ortholog(dir.path(), &["--scene", "scene.json", "verify", "--pair", "R,R"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("failed:"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = workdir();
    for args in [
        &["--scene", "scene.json", "solve", "--tet", "A"][..],
        &["--scene", "scene.json", "verify", "--pair", "A,Q"],
        &["--scene", "missing.json", "verify", "--pair", "A,B"],
        &["--scene", "scene.json", "export", "--format", "svg"],
        &["--scene", "scene.json", "trace-family", "--tet", "A", "--start", "B", "--step", "-1"],
    ] {
        let out = ortholog(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn malformed_scene_reports_the_field() {
    let dir = workdir();
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"tetrahedra": {"A": [[0,0,0],[1,0,0],[0,1,0]]}}"#,
    )
    .unwrap();
    let out = ortholog(dir.path(), &["--scene", "bad.json", "verify", "--pair", "A,A"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("tetrahedra.A"), "{err}");
}

#[test]
fn bad_tolerance_override_is_rejected() {
    let dir = workdir();
    let out = Command::new(env!("CARGO_BIN_EXE_ortholog"))
        .current_dir(dir.path())
        .env("ORTHOLOG_EPS", "not-a-number")
        .args(["--scene", "scene.json", "verify", "--pair", "A,B"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_saves_partners_that_verify() {
    let dir = workdir();
    let out = ortholog(
        dir.path(),
        &["--scene", "scene.json", "solve", "--tet", "A", "--seed", "11", "--restarts", "8", "--save-scene", "solved.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let n = r["results"]["solutions"].as_array().unwrap().len();
    assert!(n >= 1);
    let out = ortholog(dir.path(), &["--scene", "solved.json", "verify", "--pair", "A,A_sol1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn timing_is_opt_in() {
    let dir = workdir();
    let plain = report(&ortholog(dir.path(), &["--scene", "scene.json", "verify", "--pair", "A,B"]));
    assert!(plain.get("wall_time_seconds").is_none());
    let timed = report(&ortholog(dir.path(), &["--scene", "scene.json", "--timing", "verify", "--pair", "A,B"]));
    assert!(timed["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn conjugate_round_trip_through_scene() {
    let dir = workdir();
    let out = ortholog(
        dir.path(),
        &["--scene", "scene.json", "conjugate", "--pair", "A,B", "--name", "C", "--save-scene", "c.json"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = ortholog(dir.path(), &["--scene", "c.json", "conjugate", "--pair", "A,C", "--name", "D", "--save-scene", "d.json"]);
    assert_eq!(out.status.code(), Some(0));
    let scene: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("d.json")).unwrap()).unwrap();
    let b = &scene["tetrahedra"]["B"];
    let d = &scene["tetrahedra"]["D"];
    for i in 0..4 {
        for k in 0..3 {
            let (x, y) = (b[i][k].as_f64().unwrap(), d[i][k].as_f64().unwrap());
            assert!((x - y).abs() < 1e-7, "{x} vs {y}");
        }
    }
}

#[test]
fn svg_export_matches_golden_file() {
    let dir = workdir();
    let out = ortholog(
        dir.path(),
        &["--scene", "scene.json", "export", "--format", "svg", "--face", "A:4", "--pair", "A,B", "--curve-grid", "64", "--out", "f.svg"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let got = std::fs::read_to_string(dir.path().join("f.svg")).unwrap();
    let want = std::fs::read_to_string(data("demo_face4.svg")).unwrap();
    assert_eq!(got, want);
}

#[test]
fn obj_export_labels_intersection_points() {
    let dir = workdir();
    let out = ortholog(
        dir.path(),
        &["--scene", "scene.json", "export", "--format", "obj", "--pair", "A,B", "--sphere-resolution", "6", "--out", "f.obj"],
    );
    assert_eq!(out.status.code(), Some(0));
    let obj = std::fs::read_to_string(dir.path().join("f.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("p ")).count(), 6);
    for label in ["o V12", "o V34", "o carrier", "o A", "o B"] {
        assert!(obj.lines().any(|l| l == label), "{label}");
    }
}

#[test]
fn curve_vertices_stay_within_bound() {
    let dir = workdir();
    let out = ortholog(dir.path(), &["--scene", "scene.json", "curve", "--tet", "A", "--face", "4", "--grid", "32"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let trace = &r["results"]["trace"];
    assert!(trace["max_residual"].as_f64().unwrap() <= trace["residual_bound"].as_f64().unwrap());
    assert!(trace["vertex_count"].as_u64().unwrap() > 0);
}
