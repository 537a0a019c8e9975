use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_minkbilliard");

fn workdir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

/// Unit-side equilateral triangle with its centroid at the origin.
const TRIANGLE: &str =
    r#"{"kind":"polytope","vertices":[[-0.5,-0.28867513459481287],[0.5,-0.28867513459481287],[0,0.5773502691896257]]}"#;
const SQUARE: &str = r#"{"kind":"polytope","vertices":[[-1,-1],[1,-1],[1,1],[-1,1]]}"#;
const DIAMOND: &str = r#"{"kind":"polytope","vertices":[[1,0],[0,1],[-1,0],[0,-1]]}"#;
const BALL: &str = r#"{"kind":"ball","radius":1,"dim":2}"#;
const CUBE3: &str = r#"{"op":"sumInf","l":{"op":"sumInf","l":{"op":"leaf"},"r":{"op":"leaf"}},"r":{"op":"leaf"}}"#;

struct Bodies {
    dir: PathBuf,
    triangle: PathBuf,
    square: PathBuf,
    diamond: PathBuf,
    ball: PathBuf,
}

fn bodies(name: &str) -> Bodies {
    let dir = workdir(name);
    Bodies {
        triangle: write(&dir, "tri.json", TRIANGLE),
        square: write(&dir, "sq.json", SQUARE),
        diamond: write(&dir, "diamond.json", DIAMOND),
        ball: write(&dir, "ball.json", BALL),
        dir,
    }
}

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("MINKBILLIARD_MODE");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn xi_of_triangle_and_square() {
    let b = bodies("xi");
    let out = run(&["xi", "--body", s(&b.triangle), "--norm", s(&b.ball)], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["xi"].as_f64().unwrap() - 1.5).abs() < 1e-6, "{r}");
    assert!(r["polyline"].is_array());
    assert!((r["alpha"].as_f64().unwrap() - 1.0).abs() < 1e-6);

    let out = run(&["xi", "--body", s(&b.square), "--norm", s(&b.ball)], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["xi"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert_eq!(r["m"], 2);
}

#[test]
fn malformed_body_is_a_parse_error() {
    let b = bodies("malformed");
    let bad = write(&b.dir, "bad.json", r#"{"kind":"polytope","vertices":[[0,0],"#);
    let out = run(&["xi", "--body", s(&bad), "--norm", s(&b.ball)], &[]);
    assert_eq!(out.status.code(), Some(2));
    let missing = b.dir.join("missing.json");
    let out = run(&["xi", "--body", s(&missing), "--norm", s(&b.ball)], &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["xi", "--body", s(&b.square)], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn starved_optimizer_is_flagged() {
    let b = bodies("starved");
    let out = run(&["xi", "--body", s(&b.triangle), "--norm", s(&b.ball), "--max-evals", "1"], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["flagged"], true);
}

#[test]
fn simulate_square_in_diamond() {
    let b = bodies("simulate");
    let args = ["simulate", "--body", s(&b.square), "--norm", s(&b.diamond), "--q", "1,-0.2", "--p", "0.5,0.5"];
    let out = run(&args, &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["mode"], "rational");
    let t = &r["trajectory"];
    assert_eq!(t["closed"], true);
    assert_eq!(t["period"], 4);
    assert!((t["length_t"].as_f64().unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn mode_flag_beats_environment() {
    let b = bodies("mode");
    let base = ["simulate", "--body", s(&b.square), "--norm", s(&b.diamond), "--q", "1,-0.2", "--p", "0.5,0.5"];
    let mode = |extra: &[&str], env: &[(&str, &str)]| {
        let args: Vec<&str> = extra.iter().chain(base.iter()).copied().collect();
        let out = run(&args, env);
        assert_eq!(out.status.code(), Some(0));
        report(&out)["mode"].as_str().unwrap().to_string()
    };
    assert_eq!(mode(&["--mode", "float"], &[]), "float");
    assert_eq!(mode(&[], &[("MINKBILLIARD_MODE", "float")]), "float");
    assert_eq!(mode(&["--mode", "rational"], &[("MINKBILLIARD_MODE", "float")]), "rational");

    let args: Vec<&str> = ["--mode", "bogus"].iter().chain(base.iter()).copied().collect();
    assert_eq!(run(&args, &[]).status.code(), Some(2));
    assert_eq!(run(&base, &[("MINKBILLIARD_MODE", "bogus")]).status.code(), Some(2));
}

#[test]
fn inadmissible_start_is_a_numerical_flag() {
    let b = bodies("inadmissible");
    let out = run(
        &["simulate", "--body", s(&b.square), "--norm", s(&b.diamond), "--q", "1,1", "--p", "0.5,0.5"],
        &[],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(report(&out)["error"].is_string());
}

#[test]
fn hanner_cube() {
    let dir = workdir("hanner");
    let tree = write(&dir, "cube3.json", CUBE3);
    let out = run(&["hanner", "--tree", s(&tree), "--samples", "100", "--seed", "7"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["all_pass"], true);
    assert_eq!(r["accepted"], 100);
    assert_eq!(r["length4"], 100);
    assert_eq!(r["period_2n"], 100);
    assert_eq!(r["dim"], 3);
}

#[test]
fn verify_euclidean_rogers_shepard() {
    let out = run(&["verify", "rogers-shepard-euclid", "--seed", "1", "--samples", "50"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let cases = r["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 50);
    assert!(cases.iter().all(|c| c["pass"] == true));
    assert_eq!(cases[0]["equality"], true);
}

#[test]
fn unknown_battery_is_a_usage_error() {
    assert_eq!(run(&["verify", "no-such-battery"], &[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], &[]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let b = bodies("identical");
    let xi = ["xi", "--body", s(&b.triangle), "--norm", s(&b.ball), "--seed", "11"];
    assert_eq!(run(&xi, &[]).stdout, run(&xi, &[]).stdout);
    let sim = ["simulate", "--body", s(&b.square), "--norm", s(&b.diamond), "--seed", "5"];
    let first = run(&sim, &[]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, run(&sim, &[]).stdout);
    let verify = ["verify", "symmetry", "--seed", "3", "--samples", "4"];
    assert_eq!(run(&verify, &[]).stdout, run(&verify, &[]).stdout);
}

#[test]
fn plot_writes_svg() {
    let b = bodies("plot");
    let traj = b.dir.join("out.json");
    let svg = b.dir.join("t.svg");
    let _ = fs::remove_file(&svg);
    let out = run(
        &["simulate", "--body", s(&b.square), "--norm", s(&b.diamond), "--q", "1,-0.2", "--p", "0.5,0.5", "-o", s(&traj)],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["plot", "--trajectory", s(&traj), "--o", s(&svg)], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml version=\"1.0\""));
    assert!(text.contains("<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\""));
    assert!(text.contains(r#"version="1.1""#));
    assert_eq!(text.matches("<circle").count(), 8);
    assert!(text.trim_end().ends_with("</svg>"));
}
