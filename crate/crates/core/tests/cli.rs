use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use drivosc::dynamics::DriveIntegrals;
use drivosc::verify::{verify_with, Level, VerifyOptions};
use sha2::{Digest, Sha256};

fn drivosc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drivosc")).args(args).output().unwrap()
}

fn run_config(dir: &Path, config: &str) -> Output {
    let path = dir.join("scenario.json");
    fs::write(&path, config).unwrap();
    let out = dir.join("out");
    drivosc(&["run", path.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn rows(path: &Path) -> Vec<(f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let (x, w) = l.split_once(',').unwrap();
            (x.parse().unwrap(), w.parse().unwrap())
        })
        .collect()
}

fn argmax(rows: &[(f64, f64)]) -> (f64, f64) {
    rows.iter().cloned().fold((0.0, f64::NEG_INFINITY), |b, r| if r.1 > b.1 { r } else { b })
}

#[test]
fn ground_state_slice_peak() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        r#"{"force": {"kind": "zero"}, "state": {"kind": "fock", "n": 0}, "times": [0],
            "representations": ["symplectic"], "frames": {"symplectic": [[1, 0]]}}"#,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let files: Vec<_> = fs::read_dir(dir.path().join("out")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files.len(), 2, "{files:?}");
    let (x, w) = argmax(&rows(&dir.path().join("out/symplectic_t0_mu1_nu0.csv")));
    assert_eq!(x, 0.0);
    assert!((w - 0.564190).abs() < 1e-6);
}

#[test]
fn quarter_period_moves_position_into_momentum() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!(
        r#"{{"force": {{"kind": "zero"}}, "state": {{"kind": "coherent", "x0": 1, "p0": 0}},
            "times": [{}], "representations": ["optical"], "frames": {{"optical": [0]}}}}"#,
        std::f64::consts::FRAC_PI_2
    );
    let out = run_config(dir.path(), &config);
    assert!(out.status.success());
    let name = format!("optical_t{}_theta0.csv", std::f64::consts::FRAC_PI_2);
    let data = rows(&dir.path().join("out").join(name));
    let h = data[1].0 - data[0].0;
    let mean: f64 = data.iter().map(|(x, w)| x * w * h).sum();
    assert!(mean.abs() < 1e-10, "{mean}");
    assert!(argmax(&data).0.abs() < 1e-12);
}

#[test]
fn missing_state_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        r#"{"force": {"kind": "zero"}, "times": [0], "representations": ["wigner"]}"#,
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("state"));
}

#[test]
fn numerical_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // fock(30) does not fit the default wavefunction grid
    let out = run_config(
        dir.path(),
        r#"{"force": {"kind": "zero"}, "state": {"kind": "fock", "n": 30}, "times": [1],
            "representations": ["wavefunction"]}"#,
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

const FULL: &str = r#"{
    "force": {"kind": "constant", "f0": 0.7},
    "state": {"kind": "fock", "n": 1},
    "times": [0, 1, 3.141592653589793],
    "representations": ["wavefunction", "wigner", "symplectic", "optical"],
    "frames": {"symplectic": [[1, 0], [0.3, -1.2]], "optical": [0.5]},
    "grids": {"wigner": {"q": {"min": -6, "max": 6, "n_points": 64}, "p": {"min": -6, "max": 6, "n_points": 64}}}
}"#;

#[test]
fn runs_are_deterministic_and_manifested() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_config(a.path(), FULL).status.success());
    assert!(run_config(b.path(), FULL).status.success());
    let manifest = fs::read_to_string(a.path().join("out/manifest.sha256")).unwrap();
    let listed: Vec<(&str, &str)> = manifest.lines().map(|l| l.split_once("  ").unwrap()).collect();
    // 3 times × (wavefunction + wigner + 2 symplectic + 1 optical)
    assert_eq!(listed.len(), 15);
    let on_disk = fs::read_dir(a.path().join("out")).unwrap().count();
    assert_eq!(on_disk, listed.len() + 1);
    for (hash, name) in listed {
        let bytes = fs::read(a.path().join("out").join(name)).unwrap();
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hash, digest, "{name}");
        assert_eq!(bytes, fs::read(b.path().join("out").join(name)).unwrap(), "{name}");
        assert!(!bytes.contains(&b'\r'));
    }
}

#[test]
fn version_flag() {
    let out = drivosc(&["--version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn fast_verify_passes() {
    let out = drivosc(&["verify", "--fast"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 failed"));
}

fn flipped_map(d: &DriveIntegrals, x: f64, mu: f64, nu: f64) -> (f64, f64, f64) {
    let (s, c) = d.t.sin_cos();
    (x + mu * d.x_rest - nu * d.p_rest, mu * c - nu * s, nu * c + mu * s)
}

#[test]
fn verify_catches_a_sign_flip_in_the_tomogram_map() {
    let report = verify_with(VerifyOptions {
        level: Level::Fast,
        tomogram_map: flipped_map,
    });
    assert!(!report.passed());
    let failed: Vec<_> = report.failures().map(|c| c.name).collect();
    assert!(failed.iter().any(|n| n.contains("tomographic residual")), "{failed:?}");
}
