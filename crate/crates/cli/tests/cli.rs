use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn adlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adlab")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const SHEAR: &str = r#"
schema_version = 1
n = 16
T = 0.5
nu_list = [0.04, 0.02, 0.01]
snapshot_times = [0.25]

[data]
kind = "shear"
k = 1
"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn sweep_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "shear.toml", SHEAR);
    let out = dir.path().join("run");
    let res = adlab(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", "1"]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let summary = fs::read_to_string(out.join("sweep_summary.csv")).unwrap();
    assert!(summary.starts_with("nu,T,delta,zeta_total,zeta_delta,energy0,energyT,"));
    assert_eq!(summary.lines().count(), 4);
    assert!(out.join("sweep_meta.json").exists());

    let csv = out.join("sweep_summary.csv");
    let res = adlab(&["fit", "--input", csv.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let fit: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(fit["nu_values"].as_array().unwrap().len(), 3);
}

#[test]
fn fit_recovers_exact_line() {
    let dir = tempfile::tempdir().unwrap();
    let mut text =
        String::from("nu,T,delta,zeta_total,zeta_delta,energy0,energyT,balance_residual,max_enstrophy,wallclock_s\n");
    for nu in [1e-2f64, 1e-3, 1e-4, 1e-5] {
        let x = nu.ln().abs().powf(-0.25);
        text.push_str(&format!("{nu},1,0.1,{},{},1,1,0,1,0\n", 3.0 * x, 3.0 * x));
    }
    let csv = write(dir.path(), "s.csv", &text);
    let res = adlab(&["fit", "--input", &csv, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&res), 0);
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert!((fit["slope"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!((fit["r_squared"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn too_few_records_is_a_contract_failure() {
    let dir = tempfile::tempdir().unwrap();
    let text = "nu,T,delta,zeta_total,zeta_delta,energy0,energyT,balance_residual,max_enstrophy,wallclock_s\n\
                0.01,1,0.1,1,1,1,1,0,1,0\n0.005,1,0.1,1,1,1,1,0,1,0\n";
    let csv = write(dir.path(), "s.csv", text);
    assert_eq!(code(&adlab(&["fit", "--input", &csv])), 2);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", &SHEAR.replace("k = 1", "k = 1\nwobble = 2"));
    let out = dir.path().join("o");
    assert_eq!(code(&adlab(&["sweep", "--config", &bad, "--out", out.to_str().unwrap()])), 1);
    let missing = dir.path().join("nope.toml");
    assert_eq!(code(&adlab(&["solve", "--config", missing.to_str().unwrap(), "--out", "x"])), 1);
    assert_eq!(code(&adlab(&["frobnicate"])), 1);
}

#[test]
fn solve_writes_diagnostics_and_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "shear.toml", SHEAR);
    let out = dir.path().join("solve");
    let res = adlab(&["solve", "--config", &cfg, "--nu", "0.02", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let names: Vec<String> =
        fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert!(names.iter().any(|n| n.starts_with("diagnostics_nu")), "{names:?}");
    assert!(names.iter().any(|n| n.starts_with("snapshot_nu")), "{names:?}");
}

#[test]
fn seed_override_changes_random_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "r.toml",
        &SHEAR.replace("kind = \"shear\"\nk = 1", "kind = \"random_smooth\"\nseed = 1\nmax_mode = 3"),
    );
    let mut energies = Vec::new();
    for seed in ["1", "1", "2"] {
        let out = dir.path().join(format!("s{seed}"));
        let res = adlab(&["solve", "--config", &cfg, "--seed", seed, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
        let csv = fs::read_to_string(out.join("sweep_summary.csv")).unwrap();
        energies.push(csv.lines().nth(1).unwrap().split(',').nth(5).unwrap().to_string());
    }
    assert_eq!(energies[0], energies[1]);
    assert_ne!(energies[0], energies[2]);
}

#[test]
fn verify_emits_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let res = adlab(&["verify", "--n", "64", "--samples", "2", "--seed", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let lines = fs::read_to_string(out.join("verify_reports.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert!(first["ratio"].as_f64().unwrap() >= 0.0);
    assert!(out.join("family_constants.json").exists());
}

#[test]
fn radial_writes_zeta_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "radial.toml", "nu_list = [0.5]\nT = 1.0\n");
    let out = dir.path().join("radial");
    let res = adlab(&["radial", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let table = fs::read_to_string(out.join("zeta.csv")).unwrap();
    assert!(table.starts_with("nu,zeta,method"));
    assert!(table.contains("rescaled") && table.contains("limit"));
}

#[test]
fn shipped_sweep_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["sheet_sweep.toml", "forced_blobs.toml"] {
        let cfg = adlab_core::sweep::SweepConfig::from_path(&root.join(name)).unwrap();
        cfg.validate().unwrap();
    }
}
