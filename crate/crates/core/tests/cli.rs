use std::process::{Command, Output};

use peabody4d::numerics::ModelConstants;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_peabody4d"));
    c.env_remove("PEABODY4D_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn width() -> f64 {
    ModelConstants::body().width
}

#[test]
fn verify_is_deterministic_for_a_seed() {
    let args = ["verify", "--suite", "focal", "--samples", "600", "--seed", "7", "--json"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let report: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report["seed"], 7);
    assert_eq!(report["pass"], true);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["wall_time_s"].is_null()));
}

#[test]
fn verify_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = run(&["verify", "--suite", "skeleton", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["suite"], "skeleton");
    assert!(stdout(&o).contains("all checks passed"));
}

#[test]
fn perturbed_radii_fail_the_diameter_check() {
    let o = run(&["verify", "--suite", "body", "--samples", "12000", "--perturb", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("failed check: diameter"), "{err}");
}

#[test]
fn sample_csv_lies_on_the_boundary() {
    let o = run(&["sample", "-n", "300", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,z,w,face,slack"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 300);
    for r in &rows {
        assert_eq!(r.len(), 6);
        assert!(!r[4].is_empty() && r[4].chars().all(|c| ('1'..='5').contains(&c)));
        assert!(r[5].parse::<f64>().unwrap().abs() <= 1e-9);
    }
}

#[test]
fn seed_from_environment_matches_flag() {
    let flag = run(&["sample", "-n", "50", "--seed", "11"]);
    let env = bin().args(["sample", "-n", "50"]).env("PEABODY4D_SEED", "11").output().unwrap();
    let other = run(&["sample", "-n", "50", "--seed", "12"]);
    assert_eq!(stdout(&flag), stdout(&env));
    assert_ne!(stdout(&flag), stdout(&other));
}

#[test]
fn config_file_supplies_defaults_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, "seed = 11\nsamples = 50\n").unwrap();
    let from_file = run(&["--config", good.to_str().unwrap(), "sample"]);
    assert_eq!(stdout(&from_file), stdout(&run(&["sample", "-n", "50", "--seed", "11"])));
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "colour = \"red\"\n").unwrap();
    assert_eq!(run(&["--config", bad.to_str().unwrap(), "constants"]).status.code(), Some(2));
}

fn read_off(text: &str) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("OFF"));
    let counts: Vec<usize> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
    let verts = (0..counts[0])
        .map(|_| {
            let v: Vec<f64> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    let faces = (0..counts[1])
        .map(|_| {
            let v: Vec<usize> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
            assert_eq!(v[0], 3);
            [v[1], v[2], v[3]]
        })
        .collect();
    (verts, faces)
}

#[test]
fn central_slice_has_the_body_width() {
    let o = run(&["slice", "--hyperplane", "0,0,1,0,0", "--resolution", "16", "--grid", "16x24"]);
    assert_eq!(o.status.code(), Some(0));
    let (verts, faces) = read_off(&stdout(&o));
    assert_eq!(verts.len() as i64 - 3 * faces.len() as i64 / 2 + faces.len() as i64, 2);
    let w = width();
    let mut widest = 0.0f64;
    for k in 0..200 {
        let (a, b) = (std::f64::consts::TAU * k as f64 / 200.0, (k as f64 * 0.618).fract() * std::f64::consts::PI);
        let u = [b.sin() * a.cos(), b.sin() * a.sin(), b.cos()];
        let proj = |v: &[f64; 3]| v[0] * u[0] + v[1] * u[1] + v[2] * u[2];
        let hi = verts.iter().map(proj).fold(f64::NEG_INFINITY, f64::max);
        let lo = verts.iter().map(proj).fold(f64::INFINITY, f64::min);
        assert!(hi - lo <= w + 1e-3);
        widest = widest.max(hi - lo);
    }
    assert!(widest >= w - 1e-3, "widest {widest}");
}

#[test]
fn slice_formats() {
    let ply = run(&["slice", "--hyperplane", "0,0,0,1,0", "--resolution", "8", "--grid", "8x12", "--format", "ply"]);
    assert!(stdout(&ply).starts_with("ply\nformat ascii 1.0\n"));
    let csv = run(&["slice", "--hyperplane", "0,0,0,1,0", "--resolution", "8", "--grid", "8x12", "--format", "csv"]);
    assert!(stdout(&csv).starts_with("x,y,z,w,face,slack\n"));
}

#[test]
fn slice_outside_the_body_is_a_usage_error() {
    let o = run(&["slice", "--hyperplane", "1,0,0,0,1.5", "--grid", "8x12"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn constants_json_has_exact_forms() {
    let o = run(&["constants", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let text = v.to_string();
    assert!(text.contains("sqrt(7 - 2 sqrt(10))/3"), "{text}");
    assert_eq!(run(&["constants", "--a2", "0.5"]).status.code(), Some(2));
}
