use std::path::Path;
use std::process::{Command, Output};

use slipflow_cli::config::{RunConfig, DEFAULT_CONFIG};

fn slipflow(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slipflow"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// One regime, three pore scales, coarse grid.
const SMALL: &str = r#"
[geometry]
shape = { kind = "disc", radius = 0.25 }
cells_per_period = 32
rows_below = 4
height_above = 2.5

[parameters]
eta = [0.5]
pairs = [[0.9, 1.0]]
epsilon = [0.25, 0.125, 0.0625]
force = [1.0]

[solver]
tol = 1e-10
damping = 1.0
max_iter = 100
growth_limit = 5
convection = true
poiseuille = "grid_consistent"
correction = "consistent"

[analysis]
rate_force = 1.0
slip_epsilon = 0.125
slip_eta = 0.5
saffman_epsilon = 0.125
closed_loop_forces = [0.25, 0.5, 1.0]
radii = [0.2, 0.3]
asymmetric_shape = { kind = "superellipse", half_width = 0.3, half_height = 0.15, exponent = 2.0, rotation = 0.5 }

[output]
cache = "cache"
dir = "out"
"#;

#[test]
fn checked_in_default_matches_embedded() {
    let on_disk = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/config/default.toml")).unwrap();
    assert_eq!(on_disk, DEFAULT_CONFIG);
    let a = RunConfig::from_toml(&on_disk).unwrap();
    assert_eq!(a.hash(), RunConfig::load(None).unwrap().hash());
}

#[test]
fn unknown_key_exits_with_2_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = DEFAULT_CONFIG.replace("damping = 1.0", "damping = 1.0\ndampening = 0.5");
    std::fs::write(dir.path().join("bad.toml"), bad).unwrap();
    let o = slipflow(dir.path(), &["--config", "bad.toml", "cell"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let e = stderr(&o);
    assert!(e.contains("dampening") && e.contains("line"), "{e}");
}

#[test]
fn malformed_toml_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[geometry\nshape = 1").unwrap();
    let o = slipflow(dir.path(), &["--config", "bad.toml", "sweep"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn unknown_shape_field_is_rejected() {
    let text = DEFAULT_CONFIG.replace("radius = 0.25 }", "radius = 0.25, radios = 1.0 }");
    assert!(RunConfig::from_toml(&text).is_err());
}

#[test]
fn invalid_values_are_config_errors() {
    let text = DEFAULT_CONFIG.replace("damping = 1.0", "damping = 1.5");
    assert!(RunConfig::from_toml(&text).unwrap_err().to_string().contains("damping"));
    let text = DEFAULT_CONFIG.replace("eta = [0.3, 0.5, 0.9]", "eta = []");
    assert!(RunConfig::from_toml(&text).is_err());
}

#[test]
fn report_on_empty_directory_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = slipflow(dir.path(), &["--out", "nothing", "report"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn skip_dns_on_empty_cache_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    let o = slipflow(dir.path(), &["--config", "small.toml", "--skip-dns", "dns", "--eta", "0.5", "--epsilon", "0.25"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn point_outside_hypotheses_is_recorded_not_run() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    let args = ["--config", "small.toml", "dns", "--delta", "0.9", "--gamma", "1.0", "--epsilon", "0.25"];
    let o = slipflow(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["status"], "hypothesis_fail");
    assert!(r["message"].as_str().unwrap().contains("H3"));
    assert!(!dir.path().join("cache").exists());
}

#[test]
fn small_sweep_is_reproducible_from_cache() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("small.toml"), SMALL).unwrap();
    let first = slipflow(d, &["--config", "small.toml", "--jobs", "2", "sweep"]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));

    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.join("out/summary.json")).unwrap()).unwrap();
    let points = summary["points"].as_array().unwrap();
    assert!(points.iter().any(|p| p["status"] == "hypothesis_fail"));
    assert!(points.iter().filter(|p| p["status"] == "ok").count() >= 6);
    assert_eq!(summary["criteria"].as_array().unwrap().len(), 9);

    let errors = std::fs::read_to_string(d.join("out/errors.csv")).unwrap();
    let header = errors.lines().next().unwrap();
    assert!(header.starts_with(
        "order,epsilon,eta,F,norm_grad,norm_omega2,norm_sigma,norm_omega1,norm_total,theoretical_rate,observed_rate"
    ));
    assert_eq!(errors.lines().count(), 1 + 3 * 3);
    let slip = std::fs::read_to_string(d.join("out/slip.csv")).unwrap();
    assert_eq!(slip.lines().next().unwrap(), "epsilon,eta,F,v1_eff,shear_eff,a_lin_pred,a_quad_pred");

    let warm = slipflow(d, &["--config", "small.toml", "--skip-dns", "--out", "warm", "sweep"]);
    assert_eq!(warm.status.code(), Some(0), "{}", stderr(&warm));
    for f in ["errors.csv", "apriori.csv", "slip.csv", "slip_asymmetric.csv", "summary.json", "constants.json"] {
        assert_eq!(
            std::fs::read(d.join("out").join(f)).unwrap(),
            std::fs::read(d.join("warm").join(f)).unwrap(),
            "{f} differs"
        );
    }

    let r1 = slipflow(d, &["--config", "small.toml", "report"]);
    assert_eq!(r1.status.code(), Some(0), "{}", stderr(&r1));
    let text1 = std::fs::read(d.join("out/report.txt")).unwrap();
    let r2 = slipflow(d, &["--config", "small.toml", "report"]);
    assert_eq!(r2.status.code(), Some(0));
    assert_eq!(text1, std::fs::read(d.join("out/report.txt")).unwrap());
    let text = String::from_utf8(text1).unwrap();
    assert!(text.contains("convergence rates") && text.contains("criteria"));
    for f in ["rates.dat", "slip.dat", "saffman.dat"] {
        assert!(d.join("out").join(f).exists());
    }
}

#[test]
fn cell_writes_constants_with_negative_c1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    let o = slipflow(dir.path(), &["--config", "small.toml", "--refine-check", "cell"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let c: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("out/constants.json")).unwrap()).unwrap();
    assert!(c["constants"]["c1"].as_f64().unwrap() < 0.0);
    assert!(c["dual_identity"]["relative"].as_f64().unwrap() < 1e-6);
    let r = &c["refine"];
    assert_eq!(r["cells_per_period"], serde_json::json!([32, 64]));
    let (coarse, fine) = (r["coarse"][0].as_f64().unwrap(), r["fine"][0].as_f64().unwrap());
    assert!((coarse - fine).abs() < 0.05 * fine.abs());
}
