use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CUBIC: &str = r#"{"tau1":0.5,"tau2":0.5,"lambda":0,"sigma1":0,"sigma2":0,"mu":1,"gamma":1,"kappa":1}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermo2d")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn medium(dir: &TempDir, name: &str, m: &thermo2d::Moduli) -> PathBuf {
    write(dir, name, &serde_json::to_string(m).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let ok = write(&dir, "cubic.json", CUBIC);
    let o = run(&["check", s(&ok)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("(A4)"));

    let gamma = 0.5f64.sqrt().to_string();
    let bad = write(&dir, "bad.json", &CUBIC.replace("\"gamma\":1", &format!("\"gamma\":{gamma}")));
    let o = run(&["check", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("(A4)"));

    let missing = write(&dir, "missing.json", &CUBIC.replace(",\"mu\":1", ""));
    assert_eq!(code(&run(&["check", s(&missing)])), 1);
    assert_eq!(code(&run(&["check", "/nonexistent/medium.json"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn check_json_reports_each_assumption() {
    let dir = TempDir::new().unwrap();
    let ok = write(&dir, "cubic.json", CUBIC);
    let v: Value = serde_json::from_str(&stdout(&run(&["check", s(&ok), "--json"]))).unwrap();
    assert_eq!(v["a1a2_ok"], true);
    assert_eq!(v["a3_ok"], true);
    assert_eq!(v["a4_ok"], true);
    assert_eq!(v["class"], "Cubic");
}

#[test]
fn analyze_reports_class_rates() {
    let dir = TempDir::new().unwrap();
    for (name, dirs, rate) in [("rhombic-eight", 8, "t^-1/2"), ("rhombic-quarter", 4, "t^-1/4"), ("exceptional", 6, "t^-1/3")] {
        let m = thermo2d::fixtures::fixture(name).unwrap().medium;
        let path = medium(&dir, &format!("{name}.json"), &m);
        let o = run(&["analyze", s(&path), "--json"]);
        assert_eq!(code(&o), 0);
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["catalog"]["directions"].as_array().unwrap().len(), dirs, "{name}");
        assert_eq!(v["decay"]["rate"], rate, "{name}");
    }
}

#[test]
fn analyze_output_round_trips() {
    let dir = TempDir::new().unwrap();
    let path = medium(&dir, "exceptional.json", &thermo2d::fixtures::fixture("exceptional").unwrap().medium);
    let out = dir.path().join("bundle.json");
    assert_eq!(code(&run(&["analyze", s(&path), "--out", s(&out)])), 0);
    let text = fs::read_to_string(&out).unwrap();
    let bundle: thermo2d::AnalysisBundle = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&bundle).unwrap(), text);
    assert_eq!(bundle.decay.unwrap().overall, thermo2d::Exponent::new(1, 3));
}

#[test]
fn analyze_refuses_inadmissible_media() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "deg.json", &CUBIC.replace("\"tau1\":0.5,\"tau2\":0.5", "\"tau1\":1,\"tau2\":1"));
    let o = run(&["analyze", s(&path)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("(A3)"));
}

#[test]
fn all_figures_table() {
    let o = run(&["analyze", "--all-figures"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().any(|l| l.starts_with("rhombic-quarter") && l.ends_with("t^-1/4")));
    assert!(text.lines().any(|l| l.starts_with("exceptional") && l.ends_with("t^-1/3")));
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn plot_writes_csv_and_svg() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "cubic.json", CUBIC);
    let stem = dir.path().join("cubic");
    assert_eq!(code(&run(&["plot", s(&path), "--out", s(&stem), "--grid", "360"])), 0);
    let (header, rows) = parse_csv(&fs::read_to_string(stem.with_extension("csv")).unwrap());
    assert_eq!(header, ["phi", "s1x", "s1y", "s2x", "s2y", "c1x", "c1y", "c2x", "c2y"]);
    assert_eq!(rows.len(), 360);
    let svg = fs::read_to_string(stem.with_extension("svg")).unwrap();
    assert!(svg.trim_start().starts_with("<?xml") || svg.trim_start().starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polyline").count() + svg.matches("<polygon").count() + svg.matches("<path").count(), 4);
}

#[test]
fn isotropic_plot_shows_circles() {
    let dir = TempDir::new().unwrap();
    let path = medium(&dir, "iso.json", &thermo2d::Moduli::isotropic(1.0, 1.0));
    let stem = dir.path().join("iso");
    assert_eq!(code(&run(&["plot", s(&path), "--out", s(&stem), "--grid", "90"])), 0);
    let (_, rows) = parse_csv(&fs::read_to_string(stem.with_extension("csv")).unwrap());
    let radius = |r: &[f64], i: usize| r[i].hypot(r[i + 1]);
    for r in &rows {
        assert!((radius(r, 1) - 1.0).abs() < 1e-12);
        assert!((radius(r, 3) - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let (c1, c2) = (radius(r, 5), radius(r, 7));
        let mut pair = [c1, c2];
        pair.sort_by(f64::total_cmp);
        assert!((pair[0] - 2.0).abs() < 1e-12 && ((pair[1] - 3.0).abs() < 1e-12 || (pair[1] - 1.0).abs() < 1e-12)
            || (pair[1] - 2.0).abs() < 1e-12 && (pair[0] - 1.0).abs() < 1e-12, "{pair:?}");
    }
}

#[test]
fn plot_degrees_flag_converts_angles() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "cubic.json", CUBIC);
    let stem = dir.path().join("deg");
    assert_eq!(code(&run(&["plot", s(&path), "--out", s(&stem), "--grid", "4", "--degrees"])), 0);
    let (_, rows) = parse_csv(&fs::read_to_string(stem.with_extension("csv")).unwrap());
    let phis: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(phis, [0.0, 90.0, 180.0, 270.0]);
}

#[test]
fn plot_to_unwritable_path_fails() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "cubic.json", CUBIC);
    assert_eq!(code(&run(&["plot", s(&path), "--out", "/nonexistent/dir/x"])), 1);
}

#[test]
fn simulate_writes_summary_with_prediction() {
    let dir = TempDir::new().unwrap();
    let path = medium(&dir, "iso.json", &thermo2d::Moduli::isotropic(1.0, 1.0));
    let cfg = write(&dir, "cfg.json", r#"{"n": 64, "period": 100.53096491487338, "t_final": 16, "samples": 16}"#);
    let stem = dir.path().join("run");
    let o = run(&["simulate", s(&path), s(&cfg), "--out", s(&stem)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("predicted exponent: 1/2"));
    let v: Value = serde_json::from_str(&fs::read_to_string(stem.with_extension("json")).unwrap()).unwrap();
    assert_eq!(v["predicted"], "1/2");
    assert!(v["exponent"].is_f64());
    let (header, rows) = parse_csv(&fs::read_to_string(stem.with_extension("csv")).unwrap());
    assert_eq!(header, ["t", "supnorm", "energy"]);
    assert_eq!(rows.len(), 17);

    let bad = write(&dir, "bad.json", r#"{"n": 63}"#);
    assert_eq!(code(&run(&["simulate", s(&path), s(&bad)])), 1);
    let fast = write(&dir, "fast.json", r#"{"n": 64, "period": 100.53096491487338, "dt": 10.0}"#);
    assert_eq!(code(&run(&["simulate", s(&path), s(&fast)])), 1);
}
