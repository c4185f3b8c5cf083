use std::fs;
use std::process::{Command, Output};

fn stit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_then_render() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("y.json");
    let svg = dir.path().join("y.svg");
    stdout(&stit(&["simulate", "--dim", "2", "--t", "4", "--seed", "3", "--out", json.to_str().unwrap()]));
    let state: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert!(state.is_object());
    stdout(&stit(&["render", "--in", json.to_str().unwrap(), "--format", "svg", "--out", svg.to_str().unwrap()]));
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    // Same seed, same tessellation.
    let again = stdout(&stit(&["simulate", "--dim", "2", "--t", "4", "--seed", "3"]));
    assert_eq!(serde_json::from_str::<serde_json::Value>(&again).unwrap(), state);
}

#[test]
fn obj_needs_three_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("y.json");
    stdout(&stit(&["simulate", "--dim", "3", "--measure", "axis-aligned", "--window", "ball:1", "--t", "2", "--out", json.to_str().unwrap()]));
    let obj = stdout(&stit(&["render", "--in", json.to_str().unwrap(), "--format", "obj"]));
    assert!(obj.contains("o facets"));
    assert!(!stit(&["render", "--in", json.to_str().unwrap(), "--format", "svg"]).status.success());
}

#[test]
fn exact_quantities() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&stit(&["exact", "--quantity", "tau", "--s", "1", "--r", "10"]))).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "experiment = \"variance_exact\"\ndimension = 2\n[measure]\nkind = \"isotropic\"\n[integrator]\npoints = 4096\n").unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&stit(&["exact", "--quantity", "vw", "--config", cfg.to_str().unwrap()]))).unwrap();
    assert!((v["value"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);
    let v: serde_json::Value = serde_json::from_str(&stdout(&stit(&["exact", "--quantity", "variance", "--config", cfg.to_str().unwrap()]))).unwrap();
    assert!(v["result"]["value"].as_f64().unwrap() > 0.0);
    assert!(!stit(&["exact", "--quantity", "xi", "--config", cfg.to_str().unwrap()]).status.success());
}

#[test]
fn experiment_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "experiment = \"mean_surface\"\ndimension = 2\nreplications = 300\nseed = 5\n[measure]\nkind = \"isotropic\"\n").unwrap();
    let out = dir.path().join("out");
    let o = stit(&["experiment", "mean_surface", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--workers", "2"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("mean_surface"), "{text}");
    assert!(out.join("result.json").exists());
    assert!(!stit(&["experiment", "scaling", "--config", cfg.to_str().unwrap()]).status.success());
    assert!(!stit(&["experiment", "nonsense"]).status.success());
}
