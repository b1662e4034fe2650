//! JSON run configurations, one document per command.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use qprobe_core::readout::{min_theta_points, SymmetricDensityMatrix};
use qprobe_core::spin::coherent_state;
use qprobe_core::{CollectiveBasis, ComplexMatrix, ComplexVector, HalfInteger, StateVector};

use crate::error::CliError;

/// Which symmetric state to prepare.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateSpec {
    /// All qubits along `+x`.
    Css,
    Ghz,
    /// One-axis twisting `exp(-i chi_t J_z^2)` applied to the `+x` coherent state.
    Oat(f64),
    /// A JSON state file, resolved relative to the config file.
    File(PathBuf),
}

/// Contents of a state file: exactly one of the two keys.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    /// Dicke amplitudes `[re, im]`, descending `m`.
    amplitudes: Option<Vec<[f64; 2]>>,
    /// Dicke-basis density matrix rows of `[re, im]`.
    density: Option<Vec<Vec<[f64; 2]>>>,
}

/// A prepared state: always a density matrix, plus the pure vector when there is one.
#[derive(Clone, Debug)]
pub struct ResolvedState {
    pub rho: SymmetricDensityMatrix,
    pub pure: Option<StateVector>,
}

impl StateSpec {
    pub fn resolve(&self, n: usize, base: &Path) -> Result<ResolvedState, CliError> {
        let basis = CollectiveBasis::qubits(n);
        let pure = match self {
            Self::Css => coherent_state(HalfInteger::qubits(n), FRAC_PI_2, 0.0)?,
            Self::Ghz => StateVector::ghz(basis),
            Self::Oat(chi_t) => {
                if !chi_t.is_finite() {
                    return Err(CliError::Config(format!("oat time {chi_t} is not finite")));
                }
                coherent_state(HalfInteger::qubits(n), FRAC_PI_2, 0.0)?
                    .apply_diagonal_phase(*chi_t, |m| m * m)
            }
            Self::File(path) => return load_state_file(&base.join(path), n),
        };
        Ok(ResolvedState {
            rho: SymmetricDensityMatrix::from_pure(&pure)?,
            pure: Some(pure),
        })
    }
}

fn load_state_file(path: &Path, n: usize) -> Result<ResolvedState, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read state file {}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("state file {}: {e}", path.display())))?;
    let c = |v: &[f64; 2]| Complex64::new(v[0], v[1]);
    match (file.amplitudes, file.density) {
        (Some(amps), None) => {
            if amps.len() != n + 1 {
                return Err(CliError::Config(format!(
                    "state file has {} amplitudes, N={n} needs {}",
                    amps.len(),
                    n + 1
                )));
            }
            let vector = ComplexVector::from_iterator(n + 1, amps.iter().map(c));
            let pure = StateVector::new(CollectiveBasis::qubits(n), vector)
                .map_err(|e| CliError::Config(format!("state file: {e}")))?;
            Ok(ResolvedState {
                rho: SymmetricDensityMatrix::from_pure(&pure)?,
                pure: Some(pure),
            })
        }
        (None, Some(rows)) => {
            if rows.len() != n + 1 || rows.iter().any(|r| r.len() != n + 1) {
                return Err(CliError::Config(format!("state file density must be {0}x{0}", n + 1)));
            }
            let m = ComplexMatrix::from_fn(n + 1, n + 1, |i, j| c(&rows[i][j]));
            let rho = SymmetricDensityMatrix::new(n, m)
                .map_err(|e| CliError::Config(format!("state file: {e}")))?;
            Ok(ResolvedState { rho, pure: None })
        }
        _ => Err(CliError::Config(
            "state file needs exactly one of `amplitudes` or `density`".into(),
        )),
    }
}

/// Uniform `|chi| t` grid including both end points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|k| self.start + (self.stop - self.start) * (k as f64 / (n - 1) as f64))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateConfig {
    /// Total qubits including the probe.
    pub mu: usize,
    pub omega_probe: f64,
    pub omega_sys: f64,
    pub g: f64,
    pub time_grid: TimeGrid,
    /// Explicit `|chi| t` values; replaces `time_grid` when present.
    pub times: Option<Vec<f64>>,
    pub azimuth_grid: usize,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self {
            mu: 8,
            omega_probe: 11.0,
            omega_sys: 1.0,
            g: 0.05,
            time_grid: TimeGrid {
                start: 0.0,
                stop: PI,
                points: 201,
            },
            times: None,
            azimuth_grid: 128,
            out: None,
            seed: None,
        }
    }
}

impl GenerateConfig {
    pub fn times(&self) -> Vec<f64> {
        self.times.clone().unwrap_or_else(|| self.time_grid.values())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.mu < 2 {
            return Err(CliError::Config(format!("mu must be at least 2, got {}", self.mu)));
        }
        let times = self.times();
        if times.is_empty() {
            return Err(CliError::Config("time grid is empty".into()));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(CliError::Config("times must be finite and non-negative".into()));
        }
        if self.azimuth_grid < 8 {
            return Err(CliError::Config(format!(
                "azimuth_grid must be at least 8, got {}",
                self.azimuth_grid
            )));
        }
        if ![self.omega_probe, self.omega_sys, self.g].iter().all(|v| v.is_finite()) {
            return Err(CliError::Config("frequencies and coupling must be finite".into()));
        }
        if self.omega_probe == self.omega_sys {
            return Err(CliError::Config("omega_probe must differ from omega_sys".into()));
        }
        Ok(())
    }
}

fn validate_theta_points(n: usize, points: Option<usize>) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Config("n must be at least 1".into()));
    }
    if let Some(p) = points {
        if p < min_theta_points(n) {
            return Err(CliError::Config(format!(
                "theta_points={p} is below the minimum {} for N={n}",
                min_theta_points(n)
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutConfig {
    pub n: usize,
    pub state: StateSpec,
    /// Defaults to `4 (N + 1)`.
    pub theta_points: Option<usize>,
    /// Uniform probe coupling `J`.
    pub coupling_j: f64,
    /// Label `n` whose theta spectrum is written; defaults to the row closest to 0.
    pub spectrum_n: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        Self {
            n: 8,
            state: StateSpec::Css,
            theta_points: None,
            coupling_j: 1.0,
            spectrum_n: None,
            out: None,
            seed: None,
        }
    }
}

impl ReadoutConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        validate_theta_points(self.n, self.theta_points)?;
        if !(self.coupling_j.is_finite() && self.coupling_j != 0.0) {
            return Err(CliError::Config(format!("coupling_j={} is not usable", self.coupling_j)));
        }
        if let Some(label) = self.spectrum_n {
            let twice = label * 2.0;
            let valid = twice.fract() == 0.0
                && twice.abs() <= self.n as f64
                && (twice as i64 - self.n as i64) % 2 == 0;
            if !valid {
                return Err(CliError::Config(format!("spectrum_n={label} is not a label for N={}", self.n)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyConfig {
    pub n: usize,
    /// Prepare a state and read it out through the probe.
    pub state: Option<StateSpec>,
    /// Or load a grid written by `readout`.
    pub grid: Option<PathBuf>,
    pub theta_points: Option<usize>,
    pub coupling_j: f64,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            n: 8,
            state: None,
            grid: None,
            theta_points: None,
            coupling_j: 1.0,
            out: None,
            seed: None,
        }
    }
}

impl CertifyConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        match (&self.state, &self.grid) {
            (Some(_), None) => validate_theta_points(self.n, self.theta_points)?,
            (None, Some(_)) => {}
            _ => {
                return Err(CliError::Config(
                    "certify needs exactly one of `state` or `grid`".into(),
                ))
            }
        }
        if !(self.coupling_j.is_finite() && self.coupling_j != 0.0) {
            return Err(CliError::Config(format!("coupling_j={} is not usable", self.coupling_j)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    /// Qubits in the generation check, probe included.
    pub mu: usize,
    /// System qubits in the read-out and probe checks.
    pub n: usize,
    pub samples: usize,
    pub omega_probe: f64,
    pub omega_sys: f64,
    pub g: f64,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            mu: 8,
            n: 8,
            samples: 5,
            omega_probe: 11.0,
            omega_sys: 1.0,
            g: 0.05,
            out: None,
            seed: None,
        }
    }
}

impl OracleConfig {
    pub fn suite(&self) -> qprobe_core::oracle::SuiteConfig {
        qprobe_core::oracle::SuiteConfig {
            mu: self.mu,
            n: self.n,
            samples: self.samples,
            params: qprobe_core::CentralSpinParams {
                omega_probe: self.omega_probe,
                omega_sys: self.omega_sys,
                g: self.g,
            },
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.suite().validate().map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Reads a config document, or the defaults when no path is given.
///
/// Returns the config and the directory relative paths inside it resolve against.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<(T, PathBuf), CliError> {
    match path {
        None => Ok((T::default(), PathBuf::from("."))),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?;
            let config = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("config {}: {e}", p.display())))?;
            let base = p.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
            Ok((config, base))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<GenerateConfig>(r#"{"mu": 8, "gg": 1}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
        assert!(serde_json::from_str::<ReadoutConfig>(r#"{"state": {"squeezed": 1}}"#).is_err());
    }

    #[test]
    fn state_selectors_parse() {
        let c: ReadoutConfig = serde_json::from_str(r#"{"n": 4, "state": {"oat": 0.3}}"#).unwrap();
        assert_eq!(c.state, StateSpec::Oat(0.3));
        let c: ReadoutConfig = serde_json::from_str(r#"{"state": "ghz"}"#).unwrap();
        assert_eq!(c.state, StateSpec::Ghz);
        assert_eq!(c.n, 8);
    }

    #[test]
    fn time_grid_includes_end_points() {
        let grid = TimeGrid { start: 0.0, stop: PI, points: 201 };
        let v = grid.values();
        assert_eq!(v.len(), 201);
        assert_eq!(v[100], FRAC_PI_2);
        assert_eq!(v[200], PI);
    }

    #[test]
    fn validation() {
        let empty = GenerateConfig {
            times: Some(vec![]),
            ..Default::default()
        };
        assert!(matches!(empty.validate(), Err(CliError::Config(_))));
        let coarse = ReadoutConfig {
            theta_points: Some(5),
            ..Default::default()
        };
        assert!(coarse.validate().is_err());
        let bad_label = ReadoutConfig {
            n: 3,
            spectrum_n: Some(0.0),
            ..Default::default()
        };
        assert!(bad_label.validate().is_err());
        assert!(CertifyConfig::default().validate().is_err());
        let big = OracleConfig {
            mu: 13,
            ..Default::default()
        };
        assert!(big.validate().is_err());
    }

    #[test]
    fn missing_state_file_is_a_config_error() {
        let spec = StateSpec::File("does/not/exist.json".into());
        assert!(matches!(spec.resolve(4, Path::new(".")), Err(CliError::Config(_))));
    }
}
