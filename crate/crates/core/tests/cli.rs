use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn halfbind(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfbind"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn validate_inverse_square_and_inverse_linear() {
    let dir = tempfile::tempdir().unwrap();
    let ok = halfbind(&["validate"]);
    assert_eq!(ok.status.code(), Some(0));

    let cfg = write(
        dir.path(),
        "lin.toml",
        "[potential]\nkind = \"registry\"\nname = \"inverse_linear\"\nparams = [1.0]\n",
    );
    let out = halfbind(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["report"]["decays_faster_than_1_over_q"], false);

    let bad = write(dir.path(), "bad.toml", "[potential\nkind = ");
    let out = halfbind(&["validate", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn counterterm_methods_differ_by_constant() {
    let value = |method: &str| {
        let out = halfbind(&["counterterm", "--q", "2", "--t", "1", "--method", method]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        doc["value"].as_f64().unwrap()
    };
    let analytic = value("analytic");
    assert!((analytic - 2.2624671484563433).abs() < 1e-12);
    let offset = value("numeric") - analytic;
    assert!((offset + std::f64::consts::SQRT_2 * std::f64::consts::FRAC_PI_2).abs() < 1e-8);

    let out = halfbind(&["counterterm", "--q", "1", "--t", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("8t²"));
}

#[test]
fn scan_writes_csv_summary_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("scan.csv");
    let out = halfbind(&["scan", "--out", out_path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("t_f,I,S_tf,Gamma,var_residual,logZ\n"));
    assert_eq!(csv.lines().count(), 5);

    let summary: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("scan.csv.summary.json")).unwrap(),
    )
    .unwrap();
    assert!((summary["i_slope_fit"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(summary["counterterm_method"], "analytic_inverse_square");

    // the sidecar alone reproduces the run
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("scan.csv.config.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["command"], "scan");
    let config: halfbind::cli::RunConfig =
        serde_json::from_value(sidecar["config"].clone()).unwrap();
    let toml_path = write(dir.path(), "again.toml", &toml::to_string(&config).unwrap());
    let again = dir.path().join("again.csv");
    let out = halfbind(&[
        "scan",
        "--config",
        &toml_path,
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&again).unwrap(), csv.as_bytes());
}

#[test]
fn scan_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "two.toml", "[scan]\ncount = 2\n");
    assert_eq!(halfbind(&["scan", "--config", &cfg]).status.code(), Some(2));
    // the caustic q⁴ < 8t² is reached for slow escapes
    let slow = write(
        dir.path(),
        "slow.toml",
        "[boundary]\nq_i = 1.0\nt_f = 1.0\n\n[boundary.target]\nkind = \"asymptotic_velocity\"\nv = 0.001\n\n[scan]\nstart = 0.1\nstop = 0.8\n",
    );
    let out = halfbind(&["scan", "--config", &slow]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_f ="));
}

#[test]
fn asymptotic_scan_records_method() {
    let out = halfbind(&["scan", "--method", "asymptotic", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["summary"]["counterterm_method"], "asymptotic_leading");
    assert!(doc["summary"]["gamma_limit"].as_f64().unwrap().is_finite());
}

#[test]
fn trajectory_formats() {
    let out = halfbind(&["trajectory"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("t,q,p\n"));
    assert!(csv.lines().count() > 256);

    let out = halfbind(&["trajectory", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["final_state"]["p"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-8);
}

#[test]
fn dilaton_grids() {
    let dir = tempfile::tempdir().unwrap();
    let out = halfbind(&["dilaton"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    let last = csv.lines().last().unwrap();
    let s: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((s - 2.0).abs() < 1e-9);

    let flat = write(
        dir.path(),
        "flat.toml",
        "[dilaton]\nmodel = \"ab\"\nparams = [0.0, 0.0, 0.0]\ndomain = [0.0, 4.0]\n",
    );
    let out = halfbind(&["dilaton", "--config", &flat]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap() == 0.0));

    let wrong = write(
        dir.path(),
        "wrong.toml",
        "[dilaton]\nmodel = \"ab\"\nparams = [0.0, 0.0, -1.0]\ndomain = [0.0, 4.0]\n",
    );
    let out = halfbind(&["dilaton", "--config", &wrong]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("X ="));
}
