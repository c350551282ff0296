use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SS_SMALL: &str = r#"{"family":"DeSitterSchwarzschild","n":3,"m":0.1,"c":0.0}"#;
const SS_HYPERBOLIC: &str = r#"{"family":"DeSitterSchwarzschild","n":4,"m":0.5,"c":-1.0}"#;
const RN: &str = r#"{"family":"ReissnerNordstrom","n":4,"m":1.0,"q":0.25}"#;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpgeom"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn info_reports_horizon() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--spec", SS_SMALL, "--command", "info"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&dir.path().join("manifold.json"));
    assert!((v["domain"]["s0"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert!(dir.path().join("curvature.csv").exists());
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["command"], "info");
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn invalid_charge_names_constraint() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"family":"ReissnerNordstrom","n":3,"m":1.0,"q":0.6}"#;
    let out = run(dir.path(), &["--spec", spec, "--command", "info"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m > 2q"));
}

#[test]
fn hyperbolic_curvature_rows() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"family":"SpaceForm","n":4,"c":-1.0}"#;
    let out = run(dir.path(), &["--spec", spec, "--command", "info", "--points", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("curvature.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,ric_radial,scal,k_tan,k_rad"));
    for line in lines {
        let ric: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((ric + 3.0).abs() < 1e-12, "{line}");
    }
}

#[test]
fn slice_in_first_region_is_equality() {
    let dir = TempDir::new().unwrap();
    let mesh = r#"{"type":"Slice","s":0.8}"#;
    let out = run(dir.path(), &["--spec", SS_HYPERBOLIC, "--command", "verify", "--mesh", mesh, "--case", "ss_i"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json(&dir.path().join("reports.json"));
    assert_eq!(reports.as_array().unwrap().len(), 1);
    assert_eq!(reports[0]["verdict"], "Equality");
}

#[test]
fn forced_minimal_slice_violates_minkowski() {
    let dir = TempDir::new().unwrap();
    let mesh = r#"{"type":"Slice","s":1.5}"#;
    let out = run(dir.path(), &["--spec", SS_HYPERBOLIC, "--command", "verify", "--mesh", mesh, "--force-minimal"]);
    assert_eq!(out.status.code(), Some(1));
    let reports = json(&dir.path().join("reports.json"));
    let mink = reports.as_array().unwrap().iter().find(|r| r["name"] == "hsiung_minkowski").unwrap();
    assert_eq!(mink["verdict"], "Violated");
}

#[test]
fn rn_cone_above_s2_holds() {
    let dir = TempDir::new().unwrap();
    let mesh = r#"{"type":"RadialCone","k":2,"cap_angle":1.0,"r_lo":2.0,"r_hi":6.0}"#;
    let out = run(dir.path(), &["--spec", RN, "--command", "verify", "--mesh", mesh, "--case", "rn_ii"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json(&dir.path().join("reports.json"));
    assert_eq!(reports[0]["verdict"], "Holds");
}

#[test]
fn fixed_seed_runs_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["--spec", SS_HYPERBOLIC, "--command", "verify", "--seed", "5", "--count", "8", "--resolution", "256"];
    assert_eq!(run(a.path(), &args).status.code(), Some(0));
    assert_eq!(run(b.path(), &args).status.code(), Some(0));
    for name in ["reports.json", "manifest.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn low_resolution_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--spec", SS_SMALL, "--command", "info", "--resolution", "32"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("resolution must be >= 64"));
}

#[test]
fn slice_sweep_is_equality_throughout() {
    let dir = TempDir::new().unwrap();
    let out = run(
        dir.path(),
        &["--spec", SS_HYPERBOLIC, "--command", "sweep", "--sweep", "s=0.7:3:12", "--resolution", "256"],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("s,fundamental.lhs,fundamental.rhs,fundamental.slack,fundamental.verdict")
    );
    assert_eq!(lines.filter(|l| l.ends_with("Equality")).count(), 12);
}

#[test]
fn inverted_sweep_range_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--spec", SS_HYPERBOLIC, "--command", "sweep", "--sweep", "s=3:1:5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lo < hi"));
}

#[test]
fn c1_turns_positive_below_threshold() {
    let dir = TempDir::new().unwrap();
    // horizon 0.605..., quotient threshold 1
    let out = run(dir.path(), &["--spec", SS_HYPERBOLIC, "--command", "sweep", "--sweep", "d=0.61:0.99:39"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let signs: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    let onset = signs.iter().position(|s| *s == "Positive").expect("C1 turns positive");
    assert!(onset > 0 && signs[onset..].iter().all(|s| *s == "Positive"));
}

#[test]
fn c2_crosses_k() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--spec", RN, "--command", "sweep", "--sweep", "d=1.0:20:40"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let gaps: Vec<f64> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(gaps.windows(2).any(|w| w[0] >= 0.0 && w[1] < 0.0), "{gaps:?}");
}

#[test]
fn flat_plane_monotonicity() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"family":"SpaceForm","n":3,"c":0.0}"#;
    let mesh = r#"{"type":"RadialCone","k":2,"cap_angle":1.5707963267948966,"r_lo":0.0,"r_hi":5.0}"#;
    let out = run(
        dir.path(),
        &["--spec", spec, "--command", "monotonicity", "--mesh", mesh, "--resolution", "512", "--growth", "polynomial"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("monotonicity.json"));
    assert!(v["v2_violations"].as_array().unwrap().is_empty());
    assert_eq!(v["growth"]["matches"], true);
    let csv = fs::read_to_string(dir.path().join("trace_v2.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let v: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-10);
    }
}

#[test]
fn asymptotics_needs_horizon_family() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"family":"ArctanCylinder","n":3,"K":1.0}"#;
    let out = run(dir.path(), &["--spec", spec, "--command", "asymptotics"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, format!(r#"{{"spec":{SS_SMALL},"command":"info","seed":9,"points":8}}"#)).unwrap();
    let out = run(&dir.path().join("o"), &["--config", cfg.to_str().unwrap(), "--points", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let manifest = json(&dir.path().join("o/manifest.json"));
    assert_eq!(manifest["config"]["seed"], 9);
    assert_eq!(manifest["config"]["points"], 4);
}

#[test]
fn regions_match_golden_file() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--spec", SS_HYPERBOLIC, "--command", "regions", "--resolution", "512"]);
    assert_eq!(out.status.code(), Some(0));
    let got = json(&dir.path().join("regions.json"));
    let golden: Value = serde_json::from_str(include_str!("golden/regions_ss_hyperbolic.json")).unwrap();
    assert_close(&got, &golden, "$");
}

/// Structural equality with a 1e-9 relative tolerance on numbers.
fn assert_close(a: &Value, b: &Value, path: &str) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!((x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0), "{path}: {x} vs {y}");
        }
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len(), "{path}");
            for (i, (p, q)) in x.iter().zip(y).enumerate() {
                assert_close(p, q, &format!("{path}[{i}]"));
            }
        }
        (Value::Object(x), Value::Object(y)) => {
            assert_eq!(x.keys().collect::<Vec<_>>(), y.keys().collect::<Vec<_>>(), "{path}");
            for (k, p) in x {
                assert_close(p, &y[k], &format!("{path}.{k}"));
            }
        }
        _ => assert_eq!(a, b, "{path}"),
    }
}
