//! The four commands. Each validates its config, computes, then writes files in a fixed order.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use qprobe_core::certify::{certify, coherence_series, qfi_tau, CertificationReport};
use qprobe_core::generation::sweep;
use qprobe_core::oracle::{run_oracle_suite, OracleReport};
use qprobe_core::readout::{
    default_theta_points, direct_grid, simulate_probe_run, theta_spectrum, write_samples_csv, Provenance,
};
use qprobe_core::{CentralSpinParams, GenerationSweepResult, HalfInteger, ReadoutGrid};

use crate::config::{CertifyConfig, GenerateConfig, OracleConfig, ReadoutConfig};
use crate::error::CliError;
use crate::output::{csv_bytes, json_bytes, metadata, write_with_sidecar};

/// Files written by a command, in write order.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
}

/// Whether `values` changes sign (touching zero counts).
fn crosses_zero(values: &[f64]) -> bool {
    values.iter().any(|&v| v <= 0.0) && values.iter().any(|&v| v > 0.0)
}

fn argmax(points: &[(f64, f64)]) -> (f64, f64) {
    points
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |best, p| if p.1 > best.1 { p } else { best })
}

/// Summary statistics reported for a generation sweep.
pub fn generation_summary(result: &GenerationSweepResult) -> Value {
    let exact: Vec<(f64, f64)> = result.points.iter().map(|p| (p.chi_t, p.q_exact)).collect();
    let oat: Vec<(f64, f64)> = result.points.iter().map(|p| (p.chi_t, p.q_oat)).collect();
    let (t_exact, q_exact) = argmax(&exact);
    let (t_oat, q_oat) = argmax(&oat);
    json!({
        "mu": result.mu,
        "chi": result.params.chi(),
        "dispersive_ratio": result.params.dispersive_ratio(),
        "max_q_exact": q_exact,
        "chi_t_at_max_q_exact": t_exact,
        "max_q_oat": q_oat,
        "chi_t_at_max_q_oat": t_oat,
        "q_exact_crosses_zero": crosses_zero(&result.q_exact()),
        "short_window_deviation": result.max_deviation(0.0, 0.2),
        "max_deviation": result.max_deviation(f64::NEG_INFINITY, f64::INFINITY),
    })
}

pub fn cmd_generate(config: &GenerateConfig, out: &Path, seed: u64) -> Result<Outcome, CliError> {
    config.validate()?;
    let params = CentralSpinParams::new(config.omega_probe, config.omega_sys, config.g)?;
    let result = sweep(params, config.mu - 1, &config.times(), config.azimuth_grid)?;
    let rows = result
        .points
        .iter()
        .map(|p| vec![p.chi_t, p.q_exact, p.q_oat, p.azimuth_exact]);
    let csv = csv_bytes(&["chi_t", "q_exact", "q_oat", "azimuth_star"], rows)?;
    let meta = metadata("generate", "generate.csv", config, seed, generation_summary(&result))?;
    Ok(Outcome {
        files: write_with_sidecar(out, "generate.csv", &csv, meta)?,
    })
}

/// Row index whose label is `label`, or the row closest to `n = 0`.
fn spectrum_row(n: usize, label: Option<f64>) -> Result<usize, CliError> {
    match label {
        None => Ok(n.div_ceil(2)),
        Some(l) => {
            let h = HalfInteger::from_f64(l).map_err(|e| CliError::Config(e.to_string()))?;
            let k = h.twice() + n as i64;
            Ok((k / 2) as usize)
        }
    }
}

/// The two largest non-DC spectral lines.
fn dominant_peaks(spectrum: &[(i64, f64)]) -> Vec<Value> {
    let mut lines: Vec<(i64, f64)> = spectrum.iter().copied().filter(|(f, _)| *f != 0).collect();
    lines.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    lines
        .iter()
        .take(2)
        .map(|(f, m)| json!({"freq": f, "magnitude": m}))
        .collect()
}

pub fn cmd_readout(config: &ReadoutConfig, base: &Path, out: &Path, seed: u64) -> Result<Outcome, CliError> {
    config.validate()?;
    let n = config.n;
    let state = config.state.resolve(n, base)?;
    let n_theta = config.theta_points.unwrap_or_else(|| default_theta_points(n));
    let run = simulate_probe_run(&state.rho, n_theta, config.coupling_j)?;
    let direct = direct_grid(&state.rho, n_theta)?;
    let round_trip = run.grid.max_abs_difference(&direct)?;
    let row = spectrum_row(n, config.spectrum_n)?;
    let spectrum = theta_spectrum(&run.grid, row);

    let mut grid_csv = Vec::new();
    run.grid.write_csv(&mut grid_csv)?;
    let mut samples_csv = Vec::new();
    write_samples_csv(&run, &mut samples_csv)?;
    let spectrum_csv = csv_bytes(
        &["freq", "magnitude"],
        spectrum.iter().map(|(f, m)| vec![*f as f64, *m]),
    )?;

    let summary = json!({
        "n": n,
        "n_theta": n_theta,
        "coupling_j": config.coupling_j,
        "provenance": run.grid.provenance(),
        "reconstruction_residual": run.residual,
        "max_deviation_from_direct": round_trip,
        "extreme_coherence_squared": state.rho.bell_correlator(),
        "spectrum_n": run.grid.label(row).value(),
        "spectrum_peaks": dominant_peaks(&spectrum),
    });
    let mut files = Vec::new();
    for (name, bytes) in [
        ("readout.csv", &grid_csv),
        ("probe_samples.csv", &samples_csv),
        ("spectrum.csv", &spectrum_csv),
    ] {
        let meta = metadata("readout", name, config, seed, summary.clone())?;
        files.extend(write_with_sidecar(out, name, bytes, meta)?);
    }
    Ok(Outcome { files })
}

/// Builds the report for a certify config without writing anything.
pub fn certification(config: &CertifyConfig, base: &Path) -> Result<CertificationReport, CliError> {
    config.validate()?;
    let (grid, oracle) = match (&config.state, &config.grid) {
        (Some(spec), None) => {
            let state = spec.resolve(config.n, base)?;
            let n_theta = config.theta_points.unwrap_or_else(|| default_theta_points(config.n));
            let run = simulate_probe_run(&state.rho, n_theta, config.coupling_j)?;
            (run.grid, state.pure)
        }
        (None, Some(path)) => {
            let path = base.join(path);
            let file = std::fs::File::open(&path)
                .map_err(|e| CliError::Config(format!("cannot read grid {}: {e}", path.display())))?;
            let grid = ReadoutGrid::read_csv(file, Provenance::ReconstructedFromProbe)
                .map_err(|e| CliError::Config(format!("grid {}: {e}", path.display())))?;
            (grid, None)
        }
        _ => unreachable!("validated above"),
    };
    let a = coherence_series(&grid, qfi_tau(grid.n()));
    Ok(certify(&grid, &a, oracle.as_ref())?)
}

pub fn cmd_certify(config: &CertifyConfig, base: &Path, out: &Path, seed: u64) -> Result<Outcome, CliError> {
    let report = certification(config, base)?;
    let body = json_bytes(serde_json::to_value(&report)?)?;
    let summary = json!({
        "hierarchy_ok": report.hierarchy_ok,
        "oracle_available": report.qfi_oracle.is_some(),
    });
    let meta = metadata("certify", "certify.json", config, seed, summary)?;
    let files = write_with_sidecar(out, "certify.json", &body, meta)?;
    if report.qfi_oracle.is_some() && !report.hierarchy_ok {
        return Err(CliError::CheckFailed(format!(
            "hierarchy violated with slack {:e}",
            report.hierarchy_slack
        )));
    }
    Ok(Outcome { files })
}

pub fn cmd_oracle_check(config: &OracleConfig, out: &Path, seed: u64) -> Result<Outcome, CliError> {
    config.validate()?;
    let report: OracleReport = run_oracle_suite(&config.suite(), seed)?;
    let body = json_bytes(serde_json::to_value(&report)?)?;
    let worst = report
        .checks
        .iter()
        .map(|c| c.deviation)
        .fold(0.0, f64::max);
    let summary = json!({"all_passed": report.all_passed, "max_deviation": worst});
    let meta = metadata("oracle-check", "oracle_check.json", config, seed, summary)?;
    let files = write_with_sidecar(out, "oracle_check.json", &body, meta)?;
    if !report.all_passed {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        return Err(CliError::CheckFailed(failed.join("; ")));
    }
    Ok(Outcome { files })
}
