use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use blockade::model::SystemConfig;
use blockade::sweep::{Axis, Column, Observable, Param, Series, SweepSpec};

fn blockade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV printed by the binary.
fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|line| line.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

const LOSSLESS: [&str; 12] = [
    "--set", "kappa=0", "--set", "gamma_sg=0", "--set", "gamma_eg=0", "--set", "gamma_es=0", "--set",
    "gamma_fg=0", "--set", "gamma_fs=0",
];

#[test]
fn empty_cavity_g2_is_one() {
    let out = blockade(&["g2", "--set", "g_eg=0", "--set", "g_fs=0", "--set", "omega_rabi=0"]);
    let text = stdout(&out);
    assert!(text.starts_with("g2\n"));
    let g2 = rows(&text)[0][0];
    assert!((g2 - 1.0).abs() < 1e-6, "{g2}");
}

#[test]
fn second_manifold_roots() {
    let mut args = vec!["dressed", "--manifold", "2"];
    args.extend(LOSSLESS);
    let text = stdout(&blockade(&args));
    let energies: Vec<f64> = rows(&text).iter().map(|r| r[0]).collect();
    let (a, b) = ((2.0 + 2f64.sqrt()).sqrt(), (2.0 - 2f64.sqrt()).sqrt());
    for (got, want) in energies.iter().zip([-a, -b, b, a]) {
        assert!((got - want).abs() < 1e-9, "{energies:?}");
    }
}

#[test]
fn steady_prints_photons_and_g2() {
    let text = stdout(&blockade(&["steady", "--format", "json"]));
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(value["n_photon"].as_f64().unwrap() > 0.0);
    let g2 = value["g2"].as_f64().unwrap();
    assert!((g2 - 0.6).abs() < 0.1, "{g2}");
}

#[test]
fn transmission_prints_both_photons() {
    let text = stdout(&blockade(&["transmission"]));
    assert!(text.starts_with("t1,t2\n"));
    assert_eq!(rows(&text)[0].len(), 2);
}

#[test]
fn convergence_reports_truncation() {
    let text = stdout(&blockade(&["convergence", "--tol", "1e-6"]));
    let n = rows(&text)[0][0];
    assert!((4.0..=16.0).contains(&n), "{text}");
}

#[test]
fn config_errors_exit_one_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = dir.path().join("bad.json");
    fs::write(&bad_json, "{ kappa: ").unwrap();
    let unknown_key = dir.path().join("unknown.json");
    fs::write(&unknown_key, r#"{"kapa": 3}"#).unwrap();
    for args in [
        vec!["g2", "--set", "bogus=1"],
        vec!["g2", "--set", "kappa"],
        vec!["g2", "--config", bad_json.to_str().unwrap()],
        vec!["g2", "--config", unknown_key.to_str().unwrap()],
        vec!["figure", "fig9"],
        vec!["dressed", "--manifold", "3"],
    ] {
        let out = blockade(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.lines().next().unwrap().contains("error"), "{args:?}: {stderr}");
    }
}

#[test]
fn solver_failure_exits_two() {
    let out = blockade(&["g2", "--set", "kappa=0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = blockade(&["g2", "--set", "eps=0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn overrides_beat_file_beat_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    fs::write(&config, r#"{"kappa": 1.5, "delta_c": 0.3}"#).unwrap();
    let path = config.to_str().unwrap();
    let file = stdout(&blockade(&["steady", "--config", path]));
    let direct = stdout(&blockade(&["steady", "--set", "kappa=1.5", "--set", "delta_c=0.3"]));
    assert_eq!(file, direct);
    let layered = stdout(&blockade(&["steady", "--config", path, "--set", "kappa=9"]));
    let direct = stdout(&blockade(&["steady", "--set", "kappa=9", "--set", "delta_c=0.3"]));
    assert_eq!(layered, direct);
    let default = stdout(&blockade(&["steady"]));
    assert_ne!(default, file);
}

#[test]
fn output_file_receives_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/g2.csv");
    let out = blockade(&["g2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("g2\n"));
}

fn read(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn figure_writes_csv_into_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = format!("{}/results/", dir.path().display());
    let out = blockade(&["figure", "int1", "--out", &out_dir]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("results/int1.csv");
    let text = String::from_utf8(read(&csv)).unwrap();
    assert!(text.starts_with("kappa_over_g,delta_c_over_g,t1_fourlevel,t2_fourlevel,t1_twolevel,t2_twolevel\n"));
    assert_eq!(text.lines().count(), 1 + 61 * 61);
    assert!(dir.path().join("results/int1.meta.json").exists());

    let again = dir.path().join("again");
    let out = blockade(&["figure", "int1", "--out", again.to_str().unwrap(), "--no-parallel"]);
    assert!(out.status.success());
    assert_eq!(read(&csv), read(&again.join("int1.csv")));
}

#[test]
fn sweep_spec_file_round_trips() {
    let mut base = SystemConfig::resonant(1.0);
    base.n_fock = 5;
    let spec = SweepSpec {
        id: "custom".into(),
        axes: vec![Axis::new(Param::KappaOverG, vec![1.0, 2.0])],
        series: vec![Series {
            label: "resonant".into(),
            base,
            columns: vec![Column::new(Observable::G2, "g2")],
            minimize: None,
        }],
        notes: vec![],
    };
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("spec.json");
    fs::write(&spec_path, spec.to_json_string()).unwrap();

    let text = stdout(&blockade(&["sweep", "--spec", spec_path.to_str().unwrap()]));
    assert!(text.starts_with("kappa_over_g,g2\n"));
    assert_eq!(rows(&text).len(), 2);

    let json_path = dir.path().join("out/custom.json");
    let out = blockade(&[
        "sweep",
        "--spec",
        spec_path.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let back = blockade::sweep::read_json(&json_path).unwrap();
    assert_eq!(back.columns, vec!["kappa_over_g", "g2"]);
    assert!(dir.path().join("out/custom.meta.json").exists());
}
