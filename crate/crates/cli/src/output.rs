//! Output files and their metadata sidecars.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use qprobe_core::format::{fmt_sig, round_json};

use crate::error::CliError;

/// Conventions shared by every command, copied into each sidecar.
pub fn conventions() -> Value {
    json!({
        "detuning": "Delta = omega_probe - omega_sys",
        "twisting_strength": "chi = g^2 / Delta",
        "time_axis": "|chi| t; exact dynamics run for t = chi_t / |chi|",
        "bell_correlator": "E = |<prod sigma_+>|^2 about equatorial axes, azimuth maximized on a grid then refined by golden-section search",
        "q_value": "Q = log2(E) + mu",
        "dicke_order": "descending m",
        "probability_rows": "ascending n = (n_up - n_down) / 2",
        "theta_grid": "theta_j = 2 pi j / n_theta",
        "probe_coupling": "H = sum_i J_i sigma_z^i sigma_z^probe with sigma_z = +-1",
        "probe_tau": "tau = 2 J (N + 1) t / pi",
        "local_operations": "exp(-i pi/2 J_x) exp(-i theta J_z)",
        "qfi_tau": "(N + 1) / 2",
        "qfi_bound": "Re(a' e^{-i phi})^2 / (1 - |a|^2) + Im(a' e^{-i phi})^2, phi = arg a",
        "derivative": "spectral differentiation on the periodic theta grid",
        "working_point": "argmin xi^2 (ties broken by larger Fisher information), else argmax Fisher information",
        "number_format": "12 significant digits",
    })
}

/// Sidecar document for one output file.
pub fn metadata<C: Serialize>(
    command: &str,
    file: &str,
    config: &C,
    seed: u64,
    summary: Value,
) -> Result<Value, CliError> {
    Ok(json!({
        "file": file,
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": serde_json::to_value(config)?,
        "conventions": conventions(),
        "summary": summary,
    }))
}

/// Pretty JSON with numbers rounded and a trailing newline.
pub fn json_bytes(mut value: Value) -> Result<Vec<u8>, CliError> {
    round_json(&mut value);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text.into_bytes())
}

/// Writes `name` and `name.meta.json` into `dir`.
pub fn write_with_sidecar(dir: &Path, name: &str, contents: &[u8], meta: Value) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    let meta_path = dir.join(format!("{name}.meta.json"));
    std::fs::write(&meta_path, json_bytes(meta)?)?;
    Ok(vec![path, meta_path])
}

/// CSV with LF endings, every number through [`fmt_sig`].
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<Vec<u8>, CliError> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Numerical(format!("csv: {e}"));
    out.write_record(header).map_err(csv_err)?;
    for row in rows {
        out.write_record(row.iter().map(|v| fmt_sig(*v))).map_err(csv_err)?;
    }
    out.into_inner()
        .map_err(|e| CliError::Numerical(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_lf_terminated_and_rounded() {
        let bytes = csv_bytes(&["a", "b"], vec![vec![0.1 + 0.2, 1.0]]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "a,b\n0.3,1\n");
    }

    #[test]
    fn json_is_rounded_with_trailing_newline() {
        let bytes = json_bytes(json!({"x": f64::INFINITY, "y": 1.0 / 3.0})).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("\"x\": null"));
        assert!(text.contains("0.333333333333"));
        assert!(text.ends_with('\n'));
    }
}
