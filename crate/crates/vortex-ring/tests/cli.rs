//! End-to-end checks of the `vring` binary: subcommands, exit codes and the
//! file outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn vring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vring"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vring-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_csv_column(path: &Path, column: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header
        .iter()
        .position(|h| *h == column)
        .unwrap_or_else(|| panic!("no column {column} in {header:?}"));
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn dispersion_matches_closed_forms() {
    let out = tmp_dir("disp");
    let status = vring(&[
        "dispersion",
        "--n-min",
        "1",
        "--n-max",
        "5",
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(status.status.success());
    let omegas = read_csv_column(&out.join("dispersion.csv"), "omega");
    let expect = [
        0.0,
        2.0 * 3.0f64.sqrt(),
        3.0 * 8.0f64.sqrt(),
        4.0 * 15.0f64.sqrt(),
        5.0 * 24.0f64.sqrt(),
    ];
    assert_eq!(omegas.len(), 5);
    for (got, want) in omegas.iter().zip(expect) {
        assert!((got - want).abs() <= 1e-12 * want.max(1.0), "{got} vs {want}");
    }
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn dispersion_empty_range_and_odd_symmetry() {
    let out = tmp_dir("disp-empty");
    // n_min > n_max: empty table, still success
    let status = vring(&[
        "dispersion",
        "--n-min",
        "5",
        "--n-max",
        "1",
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(status.status.success());
    let text = std::fs::read_to_string(out.join("dispersion.csv")).unwrap();
    assert_eq!(text, "n,omega\n");

    let status = vring(&[
        "dispersion",
        "--n-min",
        "-3",
        "--n-max",
        "3",
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(status.status.success());
    let omegas = read_csv_column(&out.join("dispersion.csv"), "omega");
    let ns = read_csv_column(&out.join("dispersion.csv"), "n");
    for (n, w) in ns.iter().zip(&omegas) {
        let partner = ns.iter().position(|m| *m == -n).unwrap();
        assert_eq!(omegas[partner], -w, "omega must be odd in n");
    }
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn validate_accepts_shipped_configs() {
    for name in [
        "base_ring.toml",
        "perturbed_ring.toml",
        "disk_spectrum.toml",
        "mask_spectrum.toml",
    ] {
        let path = config_dir().join(name);
        let out = vring(&["validate", "--config", path.to_str().unwrap(), "--quiet"]);
        assert!(out.status.success(), "{name} failed validation");
    }
}

#[test]
fn validate_lists_every_bad_field() {
    let dir = tmp_dir("badcfg");
    let path = dir.join("bad.toml");
    std::fs::write(
        &path,
        r#"
[constants]
rho0 = 1.0
v0 = 1.0
r0 = 1.0
l = 10.0
mu0 = 1.0
hbar = 1e-3

[filament]
r = -2.0

[simulate]
mode = "warp"
tau = -1.0
"#,
    )
    .unwrap();
    let out = vring(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    for field in ["filament.r", "simulate.mode", "simulate.tau"] {
        assert!(stderr.contains(field), "missing {field} in:\n{stderr}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tmp_dir("unknown");
    let path = dir.join("unknown.toml");
    std::fs::write(
        &path,
        "[constants]\nrho0 = 1.0\nv0 = 1.0\nr0 = 1.0\nl = 1.0\nmu0 = 1.0\nhbar = 1.0\nwarp = 9\n",
    )
    .unwrap();
    let out = vring(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warp"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_base_ring_conserves_length() {
    let out = tmp_dir("sim-base");
    let config = config_dir().join("base_ring.toml");
    let status = vring(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(status.status.success());
    let lengths = read_csv_column(&out.join("diagnostics.csv"), "length");
    let l0 = lengths[0];
    for l in &lengths {
        assert!((l / l0 - 1.0).abs() < 1e-6, "length drift {}", (l / l0 - 1.0).abs());
    }
    // the MANIFEST records the config hash and the outputs
    let manifest = std::fs::read_to_string(out.join("MANIFEST")).unwrap();
    assert!(manifest.contains("config: base_ring.toml sha256="));
    assert!(manifest.contains("output: diagnostics.csv sha256="));
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn simulate_linearized_matches_exact_propagator() {
    let out = tmp_dir("sim-lin");
    let config = config_dir().join("perturbed_ring.toml");
    let status = vring(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(status.status.success());
    let manifest = std::fs::read_to_string(out.join("MANIFEST")).unwrap();
    let line = manifest
        .lines()
        .find(|l| l.contains("exact propagator"))
        .expect("deviation note in MANIFEST");
    let dev: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(dev < 1e-6, "PDE vs propagator deviation {dev}");
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn eigen_disk_analytic_and_grid_agree() {
    let out = tmp_dir("eigen-disk");
    let config = config_dir().join("disk_spectrum.toml");
    let status = vring(&[
        "eigen",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(status.status.success());
    let lambda_sq = read_csv_column(&out.join("eigen.csv"), "lambda_sq");
    assert!((lambda_sq[0] - 5.783185962946783).abs() < 1e-9);

    // grid route lands on the same value within its error estimate
    let out2 = tmp_dir("eigen-disk-grid");
    let status = vring(&[
        "eigen",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
        "--force-grid",
        "--grid-h",
        "0.03125",
        "--quiet",
    ]);
    assert!(status.status.success());
    let grid_sq = read_csv_column(&out2.join("eigen.csv"), "lambda_sq");
    assert!(
        (grid_sq[0] - lambda_sq[0]).abs() / lambda_sq[0] < 5e-3,
        "grid {} vs analytic {}",
        grid_sq[0],
        lambda_sq[0]
    );
    std::fs::remove_dir_all(&out).ok();
    std::fs::remove_dir_all(&out2).ok();
}

#[test]
fn eigen_square_closed_form() {
    let dir = tmp_dir("eigen-square");
    let config = dir.join("square.toml");
    std::fs::write(
        &config,
        r#"
[constants]
rho0 = 1.0
v0 = 1.0
r0 = 1.0
l = 10.0
mu0 = 1.0
hbar = 1e-3
epsilon = 0.1

[domain]
shape = "rectangle"
a = 1.0
b = 1.0

[sweep]
n_max = 8
eigenvalues = 3
"#,
    )
    .unwrap();
    let out = dir.join("out");
    let status = vring(&[
        "eigen",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(status.status.success());
    let lambda_sq = read_csv_column(&out.join("eigen.csv"), "lambda_sq");
    let exact = 2.0 * std::f64::consts::PI.powi(2);
    assert!((lambda_sq[0] - exact).abs() < 1e-10);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn disconnected_mask_exits_with_validation_code() {
    let dir = tmp_dir("mask-split");
    std::fs::write(dir.join("split.mask"), "110011\n110011\n110011\n110011\n").unwrap();
    let config = dir.join("split.toml");
    std::fs::write(
        &config,
        r#"
[constants]
rho0 = 1.0
v0 = 1.0
r0 = 1.0
l = 10.0
mu0 = 1.0
hbar = 1e-3

[domain]
shape = "mask"
file = "split.mask"
h = 0.05

[sweep]
n_max = 4
eigenvalues = 2
"#,
    )
    .unwrap();
    let out = vring(&["eigen", "--config", config.to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not connected"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn spectrum_eps_zero_sits_on_integers() {
    let dir = tmp_dir("spec-eps0");
    let base = std::fs::read_to_string(config_dir().join("disk_spectrum.toml")).unwrap();
    let config = dir.join("eps0.toml");
    std::fs::write(&config, base.replace("epsilon = 0.1", "epsilon = 0.0")).unwrap();
    let out = dir.join("out");
    let status = vring(&[
        "spectrum",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(status.status.success());
    let gammas = read_csv_column(&out.join("levels.csv"), "gamma_exact");
    assert!(!gammas.is_empty());
    // mu_v = mu0 (R/R0)^2 = 0.16, hbar = 1e-3
    let mu_v = 0.16;
    for g in &gammas {
        let x = mu_v * g / 1e-3;
        assert!((x - x.round()).abs() < 1e-12, "level index {x}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn spectrum_empty_table_is_success_with_note() {
    let dir = tmp_dir("spec-empty");
    let base = std::fs::read_to_string(config_dir().join("disk_spectrum.toml")).unwrap();
    // n_max = 1 with L = 10 leaves lambda_1 = 2.4 above the cutoff pi/10
    let config = dir.join("empty.toml");
    std::fs::write(&config, base.replace("n_max = 24", "n_max = 1")).unwrap();
    let out = dir.join("out");
    let status = vring(&[
        "spectrum",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(status.status.success(), "empty sweep must still exit 0");
    let levels = std::fs::read_to_string(out.join("levels.csv")).unwrap();
    assert_eq!(levels.lines().count(), 1, "header only");
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("selection rules"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn mask_spectrum_runs_end_to_end() {
    let out = tmp_dir("spec-mask");
    let config = config_dir().join("mask_spectrum.toml");
    let status = vring(&[
        "spectrum",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(
        status.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&status.stderr)
    );
    let gammas = read_csv_column(&out.join("levels.csv"), "gamma_exact");
    assert!(!gammas.is_empty(), "mask sweep should produce levels");
    let errs = read_csv_column(&out.join("levels.csv"), "lambda");
    assert!(errs.iter().all(|l| *l > 0.0));
    std::fs::remove_dir_all(&out).ok();
}
