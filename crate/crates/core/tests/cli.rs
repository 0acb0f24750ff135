use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvature-census")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_json_lists_sorted_candidates() {
    let o = run(&["--json", "--deg", "solve", "0", "0", "0", "3", "0", "60"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c = v["candidates"].as_array().unwrap();
    assert_eq!(c.len(), 8);
    let lengths: Vec<f64> = c.iter().map(|p| p["length"].as_f64().unwrap()).collect();
    assert!(lengths.windows(2).all(|w| w[0] <= w[1]));
    assert!((lengths[0] - 3.243829).abs() < 1e-6);
    assert_eq!(c[0]["path"]["type"], "RSL");
}

#[test]
fn census_reports_interval() {
    let o = run(&["--deg", "census", "2.5", "-2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("B2"), "{s}");
    assert!(s.contains("[-48.3601, 30.3099)"), "{s}");
}

#[test]
fn errors_are_structured() {
    let o = run(&["census", "0", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "CenterSingular");

    let o = run(&["region", "0", "0", "0", "4", "-8", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "NoRegion");

    assert_eq!(run(&["solve", "1", "2"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("paths.svg");
    let csv = dir.path().join("theta.csv");
    let strip = dir.path().join("strip.svg");
    let region = dir.path().join("region.svg");
    let svg_s = svg.to_str().unwrap();
    assert!(run(&["solve", "0", "0", "0", "3", "0", "1", "--svg", svg_s]).status.success());
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
    assert!(run(&["heatmap", "--res", "21", "--csv", csv.to_str().unwrap()]).status.success());
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1 + 21 * 21);
    assert!(run(&["fiber", "2.82", "0", "--frames", "5", "--svg", strip.to_str().unwrap()]).status.success());
    assert!(std::fs::read_to_string(&strip).unwrap().contains("<path"));
    let o = run(&["region", "0", "0", "0", "2.8284", "0", "0", "--svg", region.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::metadata(&region).unwrap().len() > 0);
}

#[test]
fn heatmap_is_deterministic_across_workers() {
    let a = run(&["--workers", "1", "heatmap", "--res", "31", "17"]);
    let b = run(&["--workers", "4", "heatmap", "--res", "31", "17"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("census.cfg");
    std::fs::write(&cfg, "# styles\nstyle.minimizer.stroke = #123456\n").unwrap();
    let svg = dir.path().join("p.svg");
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "solve",
        "0",
        "0",
        "0",
        "3",
        "0",
        "1",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&svg).unwrap().contains("#123456"));

    std::fs::write(&cfg, "nonsense = 1\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "census", "2", "0"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn verify_small_grid_passes() {
    let o = run(&["verify", "--grid", "20"]);
    assert!(o.status.success(), "{}", stdout(&o));
}
