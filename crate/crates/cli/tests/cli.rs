use std::fs;
use std::path::Path;
use std::process::Command;

fn run(args: &[&str], out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_paranls"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn preset_json(name: &str) -> serde_json::Value {
    serde_json::to_value(paranls::lab::preset(name).unwrap()).unwrap()
}

fn write_config(dir: &Path, v: &serde_json::Value) -> String {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path.display().to_string()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn k_below_minimum_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = preset_json("admissible_1d");
    v["K"] = 4.into();
    let cfg = write_config(dir.path(), &v);
    let (code, _) = run(&["verify", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(code, 2);
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = preset_json("admissible_1d");
    v["s_1"] = 3.into();
    let cfg = write_config(dir.path(), &v);
    let (code, _) = run(&["simulate", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(code, 2);
}

#[test]
fn unknown_registry_id_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["verify", "--only", "NOPE"], &dir.path().join("out"));
    assert_eq!(code, 2);
}

#[test]
fn only_emits_one_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, stdout) = run(&["verify", "--only", "EQNORM"], &out);
    assert_eq!(code, 0, "{stdout}");
    let mut r = csv::Reader::from_path(out.join("reports.csv")).unwrap();
    let rows: Vec<_> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "EQNORM");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn default_verify_passes_every_id() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, stdout) = run(&["verify", "--threads", "2"], &out);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(column(&out.join("reports.csv"), "max_normalized").len(), 18);
}

#[test]
fn zero_horizon_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = preset_json("plane_wave");
    v["solver"]["t_end"] = 0.0.into();
    let cfg = write_config(dir.path(), &v);
    let out = dir.path().join("out");
    let (code, _) = run(&["simulate", "--config", &cfg], &out);
    assert_eq!(code, 0);
    assert_eq!(column(&out.join("trajectory.csv"), "t"), vec![0.0]);
}

#[test]
fn plane_wave_mass_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, _) = run(&["simulate", "--preset", "plane_wave"], &out);
    assert_eq!(code, 0);
    let mass = column(&out.join("trajectory.csv"), "mass");
    assert!(mass.len() > 10);
    assert!(mass.iter().all(|m| (m - mass[0]).abs() <= 1e-10 * mass[0]));
}

#[test]
fn admissible_simulation_certificates_hold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, _) = run(&["simulate", "--preset", "admissible_1d"], &out);
    assert_eq!(code, 0);
    assert!(column(&out.join("certificates.csv"), "margin").iter().all(|&m| m >= 0.0));
}

#[test]
fn seed_makes_runs_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run(&["simulate", "--seed", "7"], &a);
    run(&["simulate", "--seed", "7"], &b);
    let read = |p: &Path| fs::read(p.join("trajectory.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn lifespan_rejects_presets() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["lifespan", "--preset", "plane_wave"], &dir.path().join("out"));
    assert_eq!(code, 2);
}

#[test]
fn small_lifespan_grid_runs() {
    let dir = tempfile::tempdir().unwrap();
    let grid = serde_json::json!({
        "d": 1, "K": 32, "pad_factor": 4, "p": 1, "sign": 1, "s0": 1.0,
        "eps": [0.1], "s1": [3.0], "j_min": 8.0, "j_max": 16.0,
        "target_fraction": 0.5, "horizon_factor": 2.0, "dt": 1e-3,
        "observe_every": 10, "seed": 0, "M": 2.0, "estimator_samples": 2
    });
    let cfg = write_config(dir.path(), &grid);
    let out = dir.path().join("out");
    let (code, stdout) = run(&["lifespan", "--config", &cfg], &out);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(column(&out.join("lifespan.csv"), "t_good"), vec![0.006103515625]);
}
