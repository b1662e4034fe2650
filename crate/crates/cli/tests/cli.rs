use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qprobe(args: &[&str], config: Option<&str>, dir: &Path) -> (Output, PathBuf) {
    let out = dir.join("out");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qprobe"));
    cmd.args(args).arg("--out").arg(&out);
    if let Some(body) = config {
        let path = dir.join("config.json");
        std::fs::write(&path, body).unwrap();
        cmd.arg("--config").arg(path);
    }
    (cmd.output().unwrap(), out)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn spectrum(path: &Path) -> Vec<(i64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("freq,magnitude"));
    lines
        .map(|l| {
            let (f, m) = l.split_once(',').unwrap();
            (f.parse().unwrap(), m.parse().unwrap())
        })
        .collect()
}

#[test]
fn generate_reproduces_the_twisting_peak() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = qprobe(&["generate"], None, dir.path());
    assert!(output.status.success());
    let csv = std::fs::read_to_string(out.join("generate.csv")).unwrap();
    assert!(csv.starts_with("chi_t,q_exact,q_oat,azimuth_star\n"));
    assert!(!csv.contains('\r'));
    let meta = read_json(&out.join("generate.csv.meta.json"));
    let summary = &meta["summary"];
    assert!((summary["max_q_oat"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert!((summary["chi_t_at_max_q_oat"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    assert_eq!(summary["q_exact_crosses_zero"], Value::Bool(true));
    assert!(meta["conventions"]["probe_tau"].is_string());
}

#[test]
fn stronger_coupling_reports_its_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let run = |g: f64| {
        let body = format!(r#"{{"g": {g}, "time_grid": {{"start": 0, "stop": 3.141592653589793, "points": 101}}}}"#);
        let sub = dir.path().join(format!("g{g}"));
        std::fs::create_dir_all(&sub).unwrap();
        let (output, out) = qprobe(&["generate"], Some(&body), &sub);
        assert!(output.status.success());
        read_json(&out.join("generate.csv.meta.json"))["summary"]["max_deviation"]
            .as_f64()
            .unwrap()
    };
    let (weak, strong) = (run(0.05), run(0.1));
    assert!(weak.is_finite() && strong.is_finite() && weak > 0.0 && strong > 0.0);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for (command, body) in [
        ("generate", r#"{"times": []}"#),
        ("generate", r#"{"mu": 8, "unknown": 1}"#),
        ("readout", r#"{"n": 4, "state": {"file": "missing.json"}}"#),
        ("readout", r#"{"n": 4, "theta_points": 3}"#),
        ("certify", r#"{"n": 4}"#),
        ("oracle-check", r#"{"mu": 13}"#),
    ] {
        let (output, _) = qprobe(&[command], Some(body), dir.path());
        assert_eq!(output.status.code(), Some(2), "{command} {body}");
        assert!(!output.stderr.is_empty());
    }
    let (output, _) = qprobe(&["generate", "--config", "/nonexistent/config.json"], None, dir.path());
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn readout_spectra_separate_ghz_from_css() {
    let dir = tempfile::tempdir().unwrap();
    let ghz_dir = dir.path().join("ghz");
    std::fs::create_dir_all(&ghz_dir).unwrap();
    let (output, out) = qprobe(&["readout"], Some(r#"{"n": 64, "state": "ghz", "theta_points": 260}"#), &ghz_dir);
    assert!(output.status.success());
    let mut lines: Vec<(i64, f64)> = spectrum(&out.join("spectrum.csv")).into_iter().filter(|l| l.0 != 0).collect();
    lines.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut top = [lines[0].0, lines[1].0];
    top.sort();
    assert_eq!(top, [-64, 64]);
    let meta = read_json(&out.join("readout.csv.meta.json"));
    assert!(meta["summary"]["max_deviation_from_direct"].as_f64().unwrap() < 1e-10);
    let samples = std::fs::read_to_string(out.join("probe_samples.csv")).unwrap();
    assert!(samples.starts_with("theta,tau,re_a,im_a,P\n"));

    let css_dir = dir.path().join("css");
    std::fs::create_dir_all(&css_dir).unwrap();
    let (output, out) = qprobe(&["readout"], Some(r#"{"n": 64, "state": "css", "theta_points": 260}"#), &css_dir);
    assert!(output.status.success());
    let weight = spectrum(&out.join("spectrum.csv"))
        .into_iter()
        .filter(|l| l.0.abs() == 64)
        .map(|l| l.1)
        .fold(0.0, f64::max);
    assert!(weight < 1e-12, "{weight}");
}

#[test]
fn certify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = qprobe(&["certify"], Some(r#"{"n": 8, "state": "ghz"}"#), dir.path());
    assert!(output.status.success());
    let report = read_json(&out.join("certify.json"));
    assert!((report["bell_Q"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert_eq!(report["depth_bound"], 8);
    assert_eq!(report["hierarchy_ok"], Value::Bool(true));
    assert_eq!(report["xi2"], Value::Null);

    let (output, out) = qprobe(&["certify"], Some(r#"{"n": 16, "state": "css"}"#), dir.path());
    assert!(output.status.success());
    let report = read_json(&out.join("certify.json"));
    assert!((report["xi2"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((report["fisher"].as_f64().unwrap() - 16.0).abs() < 1e-5);
}

#[test]
fn certify_reads_an_emitted_grid() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = qprobe(&["readout"], Some(r#"{"n": 6, "state": {"oat": 0.4}}"#), dir.path());
    assert!(output.status.success());
    let grid = out.join("readout.csv");
    let body = format!(r#"{{"grid": "{}"}}"#, grid.display());
    let (output, out) = qprobe(&["certify"], Some(&body), dir.path());
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let report = read_json(&out.join("certify.json"));
    assert_eq!(report["n"], 6);
    assert_eq!(report["qfi_oracle"], Value::Null);
    assert!(report["fisher"].as_f64().unwrap() > 0.0);
}

#[test]
fn state_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    std::fs::write(
        dir.path().join("state.json"),
        format!(r#"{{"amplitudes": [[{h}, 0], [0, 0], [0, 0], [{h}, 0]]}}"#),
    )
    .unwrap();
    let (output, out) = qprobe(&["certify"], Some(r#"{"n": 3, "state": {"file": "state.json"}}"#), dir.path());
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let report = read_json(&out.join("certify.json"));
    assert!((report["bell_E"].as_f64().unwrap() - 0.25).abs() < 1e-9);

    std::fs::write(dir.path().join("mixed.json"), r#"{"density": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#).unwrap();
    let (output, _) = qprobe(&["readout"], Some(r#"{"n": 1, "state": {"file": "mixed.json"}}"#), dir.path());
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
}

#[test]
fn oracle_check_passes_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = qprobe(&["oracle-check", "--seed", "5"], None, dir.path());
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let report = read_json(&out.join("oracle_check.json"));
    assert_eq!(report["all_passed"], Value::Bool(true));
    assert_eq!(report["seed"], 5);
    for check in report["checks"].as_array().unwrap() {
        assert!(check["deviation"].as_f64().unwrap() < 1e-10, "{check}");
    }
}
