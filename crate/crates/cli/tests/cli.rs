use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hsl-lab"));
    c.env_remove("HSL_LAB_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not a report ({e}); stderr: {}", String::from_utf8_lossy(&out.stderr)))
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Schema-level view of a report: key set plus one line per check, without
/// the floating-point payload.
fn skeleton(r: &Value) -> String {
    let mut lines = vec![format!("schema {}", r["schema"].as_str().unwrap())];
    let mut keys: Vec<&String> = r.as_object().unwrap().keys().collect();
    keys.sort();
    lines.push(format!("keys {}", keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",")));
    for c in r["checks"].as_array().unwrap() {
        let mut ck: Vec<&String> = c.as_object().unwrap().keys().collect();
        ck.sort();
        let keys = ck.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
        lines.push(format!(
            "{} {} pass={} [{}]",
            c["name"].as_str().unwrap(),
            c["kind"].as_str().unwrap(),
            c["pass"],
            keys
        ));
    }
    lines.join("\n") + "\n"
}

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(actual, expected, "report skeleton drifted from {}", path.display());
}

#[test]
fn clifford_torus_passes_everything() {
    let out = run(&["check", "clifford_torus", "--grid", "32"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["properties"]["special_lagrangian"], false);
    assert_eq!(check(&r, "hsl/laplacian_beta")["order"], "exact");
    golden("check_clifford_torus.txt", &skeleton(&r));
}

#[test]
fn complex_line_fails_only_lagrangian() {
    let out = run(&["check", "complex_line", "--grid", "32"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    let lag = check(&r, "lagrangian");
    assert_eq!(lag["pass"], false);
    assert!((lag["residual"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    for c in r["checks"].as_array().unwrap() {
        if c["name"].as_str().unwrap().starts_with("flatness/") {
            assert_eq!(c["pass"], true, "{c}");
        }
    }
}

#[test]
fn nonharmonic_rotor_is_not_flat_off_the_degenerate_lambda() {
    // at λ = i the family collapses onto λ² = −1, where this rotor happens to
    // be flat, so the negative control uses other spectral parameters
    let out = run(&["check", "nonharmonic_rotor", "--grid", "32", "--lambdas", "2,cis:0.6283185307179586"]);
    assert_eq!(code(&out), 2);
    let r = report(&out);
    assert_eq!(r["lambda_samples"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_code_counts_failures() {
    let out = run(&["check", "torus_of_revolution", "--grid", "32"]);
    let r = report(&out);
    let failed = r["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).count();
    assert!(failed > 0);
    assert_eq!(code(&out), failed as i32);
}

#[test]
fn unknown_subject_is_an_error() {
    let out = run(&["check", "no_such_surface"]);
    assert_eq!(code(&out), 255);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("clifford_torus"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_lambda_rejected() {
    assert_ne!(code(&run(&["check", "clifford_torus", "--lambdas", "0"])), 0);
    assert_ne!(code(&run(&["check", "clifford_torus", "--lambdas", "cis:x"])), 0);
}

#[test]
fn convergence_needs_two_grids() {
    let out = run(&["convergence", "clifford_torus", "--grids", "32"]);
    assert_eq!(code(&out), 255);
    let out = run(&["convergence", "clifford_torus", "--grids", "16,32,64"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["grids"].as_array().unwrap().len(), 3);
    let o = check(&r, "mean_curvature_identity")["order"].as_f64().unwrap();
    assert!((o - 2.0).abs() < 0.3, "{o}");
}

#[test]
fn tolerance_from_environment() {
    let out = bin().args(["check", "complex_line", "--grid", "16"]).env("HSL_LAB_TOL", "2").output().unwrap();
    let r = report(&out);
    assert_eq!(check(&r, "lagrangian")["tolerance"], 2.0);
    assert_eq!(code(&out), 0);
    // the flag wins over the environment
    let out = bin()
        .args(["check", "complex_line", "--grid", "16", "--tol", "1e-9"])
        .env("HSL_LAB_TOL", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn grid_file_input_matches_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torus.json");
    let imm = hsl_lab::catalog::builtin("clifford_torus").unwrap().immersion(64).unwrap();
    hsl_lab::catalog::save_grid(&path, &imm, serde_json::json!({})).unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["grid"]["nx"], 64);
    assert_eq!(r["grids"][0]["nx"], 32);
    let o = check(&r, "mean_curvature_identity")["order"].as_f64().unwrap();
    assert!((o - 2.0).abs() < 0.3, "{o}");
}

#[test]
fn out_and_plot_data_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("c.csv");
    let out = run(&[
        "check",
        "clifford_torus",
        "--grid",
        "16",
        "--out",
        json.to_str().unwrap(),
        "--plot-data",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r["subject"], "clifford_torus");
    let csv = std::fs::read_to_string(&csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("check,lambda_re,lambda_im,h,residual"));
    // four λ samples, two levels, two lifts
    assert_eq!(lines.count(), 16);
}

fn super_bytes(args: &[&str], dir: &Path, tag: &str) -> Vec<u8> {
    let p = dir.join(tag);
    let mut full = vec!["super"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", p.to_str().unwrap()]);
    let out = run(&full);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(p).unwrap()
}

#[test]
fn super_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["0", "41"] {
        let a = super_bytes(&["--seed", seed], dir.path(), "a");
        let b = super_bytes(&["--seed", seed], dir.path(), "b");
        assert_eq!(a, b);
    }
    let a = super_bytes(&["--seed", "0"], dir.path(), "a");
    let c = super_bytes(&["--seed", "1"], dir.path(), "c");
    assert_ne!(a, c, "seed has no effect");
    let r: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(r["seed"], 0);
    golden("super_polynomial.txt", &skeleton(&r));
}

#[test]
fn super_grid_mode() {
    let out = run(&["super", "--mode", "grid", "--grids", "32,64"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let o = check(&r, "super/grid/equation/superharmonic")["order"].as_f64().unwrap();
    assert!(o >= 1.7, "{o}");
    golden("super_grid.txt", &skeleton(&r));
}

#[test]
fn check_reports_are_deterministic() {
    let a = run(&["check", "round_sphere", "--grid", "16"]).stdout;
    let b = run(&["check", "round_sphere", "--grid", "16"]).stdout;
    assert_eq!(a, b);
}
