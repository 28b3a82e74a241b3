use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dcov(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcov"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn dcov")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "dcov failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn lake_dir() -> TempDir {
    let dir = TempDir::new().unwrap();
    ok(&dcov(
        &["fixture", "--name", "lake", "--out", "."],
        dir.path(),
    ));
    dir
}

fn plan_lake(dir: &Path, robots: &str, algorithm: &str, out: &str) -> Output {
    dcov(
        &[
            "plan",
            "--map",
            "lake.pgm",
            "--meta",
            "lake.json",
            "--robots",
            robots,
            "--radius",
            "5",
            "--footprint",
            "4.5",
            "--algorithm",
            algorithm,
            "--seed",
            "7",
            "--out",
            out,
            "--svg",
        ],
        dir,
    )
}

#[test]
fn plan_lake_two_robots() {
    let dir = lake_dir();
    ok(&plan_lake(dir.path(), "2", "dcrc", "out"));
    let mission = read_json(&dir.path().join("out/mission.json"));
    assert_eq!(mission["schema_version"], 1);
    assert_eq!(mission["parameters"]["algorithm"], "dcrc");
    assert_eq!(mission["robots"].as_array().unwrap().len(), 2);
    let report = read_json(&dir.path().join("out/report.json"));
    assert_eq!(report["utilization"], 1.0);
    assert!(report["coverage_fraction"].as_f64().unwrap() >= 0.99);
    let svg = std::fs::read_to_string(dir.path().join("out/plan.svg")).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.contains("version=\"1.1\""));
}

#[test]
fn plan_is_deterministic() {
    let dir = lake_dir();
    ok(&plan_lake(dir.path(), "3", "dcac", "a"));
    ok(&plan_lake(dir.path(), "3", "dcac", "b"));
    let a = std::fs::read(dir.path().join("a/mission.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/mission.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn zero_robots_is_a_usage_error() {
    let dir = lake_dir();
    let out = plan_lake(dir.path(), "0", "dcrc", "out");
    assert!(!out.status.success());
    assert!(!dir.path().join("out/mission.json").exists());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("at least one robot"), "{stderr}");
}

#[test]
fn missing_map_gives_single_line_diagnostic() {
    let dir = lake_dir();
    let out = dcov(
        &[
            "plan",
            "--map",
            "missing.pgm",
            "--meta",
            "lake.json",
            "--robots",
            "2",
            "--radius",
            "5",
            "--footprint",
            "4.5",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.trim_end().lines().count(), 1, "{stderr}");
    assert!(stderr.starts_with("dcov: "));
}

#[test]
fn bad_footprint_is_rejected() {
    let dir = lake_dir();
    let out = dcov(
        &[
            "plan",
            "--map",
            "lake.pgm",
            "--meta",
            "lake.json",
            "--robots",
            "2",
            "--radius",
            "5",
            "--footprint",
            "0",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
}

#[test]
fn stats_round_trip() {
    let dir = lake_dir();
    for algorithm in ["dcrc", "dcac"] {
        ok(&plan_lake(dir.path(), "4", algorithm, algorithm));
        let mission_path = format!("{algorithm}/mission.json");
        let out = dcov(&["stats", "--mission", &mission_path], dir.path());
        ok(&out);
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        let stored = report["tour_costs"].as_array().unwrap();
        let recomputed = report["recomputed_costs"].as_array().unwrap();
        assert_eq!(stored.len(), 4);
        for (a, b) in stored.iter().zip(recomputed) {
            assert!((a.as_f64().unwrap() - b.as_f64().unwrap()).abs() < 1e-6);
        }
        let mission = read_json(&dir.path().join(&mission_path));
        let sum: f64 = mission["robots"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["cost"].as_f64().unwrap())
            .sum();
        assert!((sum - report["total_cost"].as_f64().unwrap()).abs() < 1e-6);
        let plan_report = read_json(&dir.path().join(format!("{algorithm}/report.json")));
        assert!(
            (plan_report["max_cost"].as_f64().unwrap() - report["max_cost"].as_f64().unwrap())
                .abs()
                < 1e-6
        );
    }
}

#[test]
fn decompose_writes_cells_and_passes() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("room.txt"),
        "..........\n..........\n...####...\n...####...\n..........\n..........\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("room.json"),
        r#"{"resolution_m": 1.0, "depot": [0.0, -2.0]}"#,
    )
    .unwrap();
    ok(&dcov(
        &[
            "decompose",
            "--map",
            "room.txt",
            "--meta",
            "room.json",
            "--footprint",
            "2",
            "--passes",
            "--svg",
            "--out",
            "d",
        ],
        dir.path(),
    ));
    let cells = read_json(&dir.path().join("d/cells.json"));
    let cells = cells["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 4);
    assert_eq!(cells[0]["x_range"], serde_json::json!([0.0, 3.0]));
    assert_eq!(cells[0]["columns"][0]["floor"], 0.0);
    assert_eq!(cells[0]["columns"][0]["ceiling"], 6.0);
    assert_eq!(cells[0]["neighbors"], serde_json::json!([1, 2]));
    let passes = read_json(&dir.path().join("d/passes.json"));
    assert!(!passes["passes"].as_array().unwrap().is_empty());
    assert!(!passes["edges"].as_array().unwrap().is_empty());
    assert!(dir.path().join("d/decompose.svg").exists());
}

#[test]
fn passes_without_footprint_fails() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("m.txt"), "....\n....\n").unwrap();
    std::fs::write(
        dir.path().join("m.json"),
        r#"{"resolution_m": 1.0, "depot": [0, 0]}"#,
    )
    .unwrap();
    let out = dcov(
        &[
            "decompose",
            "--map",
            "m.txt",
            "--meta",
            "m.json",
            "--passes",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_fixture_fails() {
    let dir = TempDir::new().unwrap();
    let out = dcov(&["fixture", "--name", "moon"], dir.path());
    assert!(!out.status.success());
}
