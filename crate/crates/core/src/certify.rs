//! Entanglement and metrology witnesses computed from read-out data.
//!
//! Everything here consumes a [`ReadoutGrid`] (or the probe coherence derived from it), so the
//! same code serves grids produced directly and grids reconstructed from the probe.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::round_json;
use crate::fourier::{offset_dft_forward, periodic_derivative, periodic_derivative_real, Differentiation};
use crate::generation::q_value;
use crate::readout::{min_theta_points, ReadoutGrid};
use crate::spin::{MixingMatrix, StateVector};

/// Bins with `p_n` below this are left out of the Fisher sum.
pub const FISHER_CUTOFF: f64 = 1e-12;
/// Slopes below `FLAT_SLOPE * max(N, 1)` make the squeezing parameter infinite.
pub const FLAT_SLOPE: f64 = 1e-9;
/// Slack allowed in each hierarchy inequality.
pub const HIERARCHY_TOLERANCE: f64 = 1e-8;
/// Threshold on `1 - |a|^2` and on the radial numerator for the degenerate limit.
pub const DEGENERATE_TOLERANCE: f64 = 1e-12;
/// Rows whose extreme-coherence coefficient is smaller than this are skipped.
pub const EXTRACTION_THRESHOLD: f64 = 1e-8;
/// Relative spread of `xi^2` values treated as tied when picking the working angle.
pub const TIE_TOLERANCE: f64 = 1e-9;
/// Relative tolerance on the producibility thresholds.
pub const DEPTH_TOLERANCE: f64 = 1e-9;

/// `sum_n p_n(theta_j) n^alpha`.
pub fn moments(grid: &ReadoutGrid, j: usize, alpha: u32) -> f64 {
    (0..=grid.n())
        .map(|k| grid.value(k, j) * grid.label(k).value().powi(alpha as i32))
        .sum()
}

/// Per-angle moments, slopes, squeezing and Fisher information for a whole grid.
#[derive(Clone, Debug)]
pub struct ThetaProfile {
    n: usize,
    thetas: Vec<f64>,
    mean: Vec<f64>,
    variance: Vec<f64>,
    slope: Vec<f64>,
    xi2: Vec<f64>,
    fisher: Vec<f64>,
    excluded: Vec<usize>,
}

impl ThetaProfile {
    pub fn new(grid: &ReadoutGrid) -> Self {
        Self::with_scheme(grid, Differentiation::default())
    }

    pub fn with_scheme(grid: &ReadoutGrid, scheme: Differentiation) -> Self {
        let n = grid.n();
        let n_theta = grid.n_theta();
        let labels = grid.labels();
        let mean: Vec<f64> = (0..n_theta).map(|j| moments(grid, j, 1)).collect();
        let variance: Vec<f64> = (0..n_theta)
            .map(|j| {
                labels
                    .iter()
                    .enumerate()
                    .map(|(k, &l)| grid.value(k, j) * (l - mean[j]).powi(2))
                    .sum()
            })
            .collect();
        let slope = periodic_derivative_real(&mean, scheme);
        let floor = FLAT_SLOPE * (n.max(1) as f64);
        let xi2 = variance
            .iter()
            .zip(&slope)
            .map(|(&v, &s)| {
                if s.abs() < floor {
                    f64::INFINITY
                } else {
                    n as f64 * v / (s * s)
                }
            })
            .collect();

        let row_slopes: Vec<Vec<f64>> = (0..=n)
            .map(|k| periodic_derivative_real(grid.row(k), scheme))
            .collect();
        let mut fisher = vec![0.0; n_theta];
        let mut excluded = vec![0; n_theta];
        for (k, dp) in row_slopes.iter().enumerate() {
            for j in 0..n_theta {
                let p = grid.value(k, j);
                if p < FISHER_CUTOFF {
                    excluded[j] += 1;
                } else {
                    fisher[j] += dp[j] * dp[j] / p;
                }
            }
        }
        Self {
            n,
            thetas: grid.thetas().to_vec(),
            mean,
            variance,
            slope,
            xi2,
            fisher,
            excluded,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn variance(&self) -> &[f64] {
        &self.variance
    }

    pub fn slope(&self) -> &[f64] {
        &self.slope
    }

    pub fn xi2(&self) -> &[f64] {
        &self.xi2
    }

    pub fn fisher(&self) -> &[f64] {
        &self.fisher
    }

    /// Number of bins dropped from the Fisher sum at each angle.
    pub fn excluded_bins(&self) -> &[usize] {
        &self.excluded
    }

    /// Index minimizing `xi^2`, or maximizing the Fisher information when `xi^2` is
    /// infinite everywhere.
    pub fn working_point(&self) -> (usize, WorkingPoint) {
        let best_xi = self
            .xi2
            .iter()
            .enumerate()
            .filter(|(_, x)| x.is_finite())
            .min_by(|a, b| a.1.total_cmp(b.1));
        match best_xi {
            Some((_, &min)) => {
                // near-ties are common on symmetric grids; prefer the angle with more Fisher information
                let j = (0..self.xi2.len())
                    .filter(|&j| self.xi2[j] <= min * (1.0 + TIE_TOLERANCE))
                    .max_by(|&a, &b| self.fisher[a].total_cmp(&self.fisher[b]).then(b.cmp(&a)))
                    .expect("minimum is a candidate");
                (j, WorkingPoint::MinSqueezing)
            }
            None => {
                let j = self
                    .fisher
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
                    .map_or(0, |(j, _)| j);
                (j, WorkingPoint::MaxFisher)
            }
        }
    }
}

/// How the reported angle was chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorkingPoint {
    MinSqueezing,
    MaxFisher,
}

/// `xi^2 = N Var(J_z) / |d<J_z>/dtheta|^2` at `theta_j`.
pub fn spin_squeezing(grid: &ReadoutGrid, j: usize) -> f64 {
    ThetaProfile::new(grid).xi2[j]
}

/// `I = sum_n (dp_n/dtheta)^2 / p_n` at `theta_j`.
pub fn fisher_information(grid: &ReadoutGrid, j: usize) -> f64 {
    ThetaProfile::new(grid).fisher[j]
}

/// Probe coherence `a(theta_j)` at fixed `tau`, synthesized from each grid column.
pub fn coherence_series(grid: &ReadoutGrid, tau: f64) -> Vec<Complex64> {
    (0..grid.n_theta())
        .map(|j| {
            let column: Vec<Complex64> =
                grid.column(j).into_iter().map(|p| Complex64::new(p, 0.0)).collect();
            offset_dft_forward(&column, tau)
        })
        .collect()
}

/// Probe time at which the coherence series feeds the QFI bound.
pub fn qfi_tau(n: usize) -> f64 {
    (n as f64 + 1.0) / 2.0
}

/// Lower bound on the QFI from the probe coherence series at `theta_j`.
pub fn qfi_bound(a_series: &[Complex64], j: usize) -> Result<f64> {
    qfi_bound_with(a_series, j, Differentiation::default())
}

/// [`qfi_bound`] with an explicit differentiation scheme.
///
/// `Re(a' e^{-i phi})^2 / (1 - |a|^2) + Im(a' e^{-i phi})^2` with `phi = arg a`.
pub fn qfi_bound_with(a_series: &[Complex64], j: usize, scheme: Differentiation) -> Result<f64> {
    if a_series.len() < 3 {
        return Err(Error::InvalidGrid(format!(
            "need at least 3 coherence samples, got {}",
            a_series.len()
        )));
    }
    if j >= a_series.len() {
        return Err(Error::InvalidParameter(format!(
            "theta index {j} outside series of length {}",
            a_series.len()
        )));
    }
    let derivative = periodic_derivative(a_series, scheme)[j];
    let a = a_series[j];
    let rotated = derivative * Complex64::from_polar(1.0, -a.arg());
    let radial = rotated.re * rotated.re;
    let tangential = rotated.im * rotated.im;
    let gap = 1.0 - a.norm_sqr();
    if gap < DEGENERATE_TOLERANCE {
        if radial < DEGENERATE_TOLERANCE {
            return Ok(tangential);
        }
        return Err(Error::Degenerate(format!(
            "|a| = 1 with radial slope {:.3e}",
            radial.sqrt()
        )));
    }
    Ok(radial / gap + tangential)
}

/// `4 Var(J_z)`, the QFI of a pure state under `exp(-i theta J_z)`.
pub fn qfi_oracle_pure(state: &StateVector) -> f64 {
    let m = state.basis().m_values();
    let (mean, second) = state
        .amplitudes()
        .iter()
        .zip(&m)
        .fold((0.0, 0.0), |(a, b), (c, &mv)| {
            let p = c.norm_sqr();
            (a + p * mv, b + p * mv * mv)
        });
    4.0 * (second - mean * mean)
}

/// Bell correlator recovered from the fastest theta oscillation of each row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BellExtraction {
    pub e: f64,
    pub q: f64,
    /// `(n, E_n, |c_n|)` for every row that passed the coefficient threshold.
    pub rows: Vec<(f64, f64, f64)>,
}

/// Estimates `|rho_{N/2,-N/2}|^2` from the `exp(-i N theta)` component of every `p_n(theta)`.
pub fn extract_bell_correlator(grid: &ReadoutGrid, mixing: &MixingMatrix) -> Result<BellExtraction> {
    let n = grid.n();
    let d = mixing.matrix();
    if d.nrows() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: d.nrows(),
        });
    }
    if n == 0 {
        return Err(Error::Extraction("a single level has no coherence".into()));
    }
    let n_theta = grid.n_theta();
    if n_theta < min_theta_points(n) {
        return Err(Error::InvalidGrid(format!(
            "{n_theta} theta points cannot isolate frequency {n}"
        )));
    }
    let thetas = grid.thetas();
    let mut rows = Vec::new();
    for k in 0..=n {
        // row k holds n = k - N/2, which is Dicke index N - k
        let r = n - k;
        let c = d[(r, 0)] * d[(r, n)].conj();
        if c.norm() <= EXTRACTION_THRESHOLD {
            continue;
        }
        let amplitude: Complex64 = grid
            .row(k)
            .iter()
            .zip(thetas)
            .map(|(&p, &th)| p * Complex64::from_polar(1.0, n as f64 * th))
            .sum::<Complex64>()
            / n_theta as f64;
        rows.push((grid.label(k).value(), amplitude.norm_sqr() / c.norm_sqr(), c.norm()));
    }
    if rows.is_empty() {
        return Err(Error::Extraction(format!(
            "every mixing coefficient is below {EXTRACTION_THRESHOLD:e}"
        )));
    }
    let total: f64 = rows.iter().map(|r| r.2).sum();
    let e = rows.iter().map(|r| r.1 * r.2).sum::<f64>() / total;
    Ok(BellExtraction {
        e,
        q: q_value(e, n),
        rows,
    })
}

/// Largest entanglement depth compatible with Fisher information `i` for `N` qubits.
///
/// A state whose blocks hold at most `k` qubits has `I <= s k^2 + r^2`, `N = s k + r`.
pub fn depth_bound_from_fisher(i: f64, n: usize) -> usize {
    let exceeded = (1..=n).rev().find(|&k| {
        let (s, r) = (n / k, n % k);
        let limit = (s * k * k + r * r) as f64;
        i > limit * (1.0 + DEPTH_TOLERANCE)
    });
    exceeded.map_or(1, |k| k + 1).clamp(1, n.max(1))
}

/// All witnesses evaluated at one working angle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub n: usize,
    pub theta_index: usize,
    pub theta_star: f64,
    pub working_point: WorkingPoint,
    pub xi2: f64,
    pub fisher: f64,
    pub excluded_bins: usize,
    pub qfi_tau: f64,
    pub qfi_bound: f64,
    pub qfi_oracle: Option<f64>,
    #[serde(rename = "bell_E")]
    pub bell_e: f64,
    #[serde(rename = "bell_Q")]
    pub bell_q: f64,
    /// Why the Bell correlator could not be extracted, if it could not.
    pub bell_reason: Option<String>,
    pub depth_bound: usize,
    pub hierarchy_ok: bool,
    /// Smallest margin among the checked hierarchy inequalities.
    pub hierarchy_slack: f64,
    pub cramer_rao: f64,
}

impl CertificationReport {
    /// JSON with every number rounded to twelve significant digits.
    pub fn to_json(&self) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        round_json(&mut value);
        Ok(serde_json::to_string_pretty(&value)?)
    }
}

/// Assembles the report at the working angle of the grid.
///
/// `a_series` is the probe coherence over the same angles, normally from
/// [`coherence_series`] at [`qfi_tau`].
pub fn certify(
    grid: &ReadoutGrid,
    a_series: &[Complex64],
    state_oracle: Option<&StateVector>,
) -> Result<CertificationReport> {
    let n = grid.n();
    if a_series.len() != grid.n_theta() {
        return Err(Error::DimensionMismatch {
            expected: grid.n_theta(),
            found: a_series.len(),
        });
    }
    if let Some(state) = state_oracle {
        if state.basis().dim() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: state.basis().dim(),
            });
        }
    }
    let profile = ThetaProfile::new(grid);
    let (j, working_point) = profile.working_point();
    let xi2 = profile.xi2[j];
    let fisher = profile.fisher[j];
    if profile.excluded[j] > 0 {
        log::info!(
            "{} bins below {FISHER_CUTOFF:e} excluded from the Fisher sum at theta index {j}",
            profile.excluded[j]
        );
    }
    let qfi = match qfi_bound(a_series, j) {
        Ok(b) => b,
        Err(Error::Degenerate(msg)) => {
            log::warn!("QFI bound undefined at theta index {j}: {msg}");
            f64::INFINITY
        }
        Err(e) => return Err(e),
    };
    let qfi_oracle = state_oracle.map(qfi_oracle_pure);
    let bell = match crate::spin::mixing_matrix(crate::spin::HalfInteger::qubits(n))
        .and_then(|d| extract_bell_correlator(grid, &d))
    {
        Ok(b) => (b.e, b.q, None),
        Err(Error::Extraction(msg)) => {
            log::warn!("{msg}");
            (f64::NAN, f64::NAN, Some(msg))
        }
        Err(e) => return Err(e),
    };

    let lower = if xi2.is_finite() { n as f64 / xi2 } else { 0.0 };
    let mut slack = fisher - lower;
    if let Some(oracle) = qfi_oracle {
        slack = slack.min(oracle - fisher);
    }
    Ok(CertificationReport {
        n,
        theta_index: j,
        theta_star: grid.thetas()[j],
        working_point,
        xi2,
        fisher,
        excluded_bins: profile.excluded[j],
        qfi_tau: qfi_tau(n),
        qfi_bound: qfi,
        qfi_oracle,
        bell_e: bell.0,
        bell_q: bell.1,
        bell_reason: bell.2,
        depth_bound: depth_bound_from_fisher(fisher, n),
        hierarchy_ok: slack >= -HIERARCHY_TOLERANCE,
        hierarchy_slack: slack,
        cramer_rao: 1.0 / qfi,
    })
}

/// [`certify`] with the coherence series synthesized from the grid at [`qfi_tau`].
pub fn certify_grid(grid: &ReadoutGrid, state_oracle: Option<&StateVector>) -> Result<CertificationReport> {
    let a = coherence_series(grid, qfi_tau(grid.n()));
    certify(grid, &a, state_oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::readout::{default_theta_points, direct_grid, Provenance, SymmetricDensityMatrix};
    use crate::spin::{coherent_state, mixing_matrix, CollectiveBasis, HalfInteger, SpinOperators};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn css_x(n: usize) -> StateVector {
        coherent_state(HalfInteger::qubits(n), FRAC_PI_2, 0.0).unwrap()
    }

    fn oat(n: usize, chi_t: f64) -> StateVector {
        css_x(n).apply_diagonal_phase(chi_t, |m| m * m)
    }

    fn grid_of(state: &StateVector, n_theta: usize) -> ReadoutGrid {
        let rho = SymmetricDensityMatrix::from_pure(state).unwrap();
        direct_grid(&rho, n_theta).unwrap()
    }

    fn grid(state: &StateVector) -> ReadoutGrid {
        let n = state.basis().dim() - 1;
        grid_of(state, default_theta_points(n))
    }

    /// Mean, variance and slope of the measured operator `U^dag J_z U`, `U = exp(-i pi/2 J_x) exp(-i theta J_z)`.
    fn exact_moments(state: &StateVector, theta: f64) -> (f64, f64, f64) {
        let n = state.basis().dim() - 1;
        let ops = SpinOperators::new(HalfInteger::qubits(n)).unwrap();
        let c = |x: f64| Complex64::new(x, 0.0);
        let observable = ops.jx.map(|v| v * c(theta.sin())) - ops.jy.map(|v| v * c(theta.cos()));
        let mean = state.expectation(&observable).re;
        let second = state.expectation(&(&observable * &observable)).re;
        let slope_op = ops.jx.map(|v| v * c(theta.cos())) + ops.jy.map(|v| v * c(theta.sin()));
        (mean, second - mean * mean, state.expectation(&slope_op).re)
    }

    #[test]
    fn moments_of_simple_distributions() {
        let mut delta = vec![vec![0.0; 3]; 8];
        delta.iter_mut().for_each(|c| c[1] = 1.0);
        let g = ReadoutGrid::from_columns(2, delta, Provenance::Direct).unwrap();
        assert_eq!(moments(&g, 0, 1), 0.0);
        assert_eq!(moments(&g, 0, 2), 0.0);
        let uniform = vec![vec![1.0 / 3.0; 3]; 8];
        let g = ReadoutGrid::from_columns(2, uniform, Provenance::Direct).unwrap();
        assert!(moments(&g, 3, 1).abs() < 1e-15);
        assert!((moments(&g, 3, 2) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn css_second_moment_is_binomial() {
        let g = grid(&css_x(16));
        assert!((moments(&g, 0, 2) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn measured_observable_rotates_in_the_equator() {
        // p_n(theta) measures sin(theta) J_x - cos(theta) J_y of the input state
        let state = oat(10, 0.17);
        let g = grid(&state);
        let profile = ThetaProfile::new(&g);
        for j in [0, 5, 13, 30] {
            let (mean, var, slope) = exact_moments(&state, g.thetas()[j]);
            assert!((profile.mean()[j] - mean).abs() < 1e-10);
            assert!((profile.variance()[j] - var).abs() < 1e-10);
            assert!((profile.slope()[j] - slope).abs() < 1e-9, "j={j} {} {slope} mean {} {mean}", profile.slope()[j], profile.mean()[j]);
        }
    }

    #[test]
    fn css_is_at_the_standard_quantum_limit() {
        let g = grid(&css_x(16));
        let profile = ThetaProfile::new(&g);
        for (j, &x) in profile.xi2().iter().enumerate() {
            if profile.slope()[j].abs() > 1e-3 {
                assert!((x - 1.0).abs() < 1e-9, "j={j} xi2={x}");
            }
        }
        // at the poles the distribution collapses onto one bin and the cutoff drops the rest
        for (j, &i) in profile.fisher().iter().enumerate() {
            if profile.excluded_bins()[j] == 0 {
                assert!((i - 16.0).abs() < 1e-5, "I={i}");
            }
        }
    }

    #[test]
    fn ghz_fisher_and_qfi_reach_heisenberg_scaling() {
        let state = StateVector::ghz(CollectiveBasis::qubits(8));
        let g = grid(&state);
        let profile = ThetaProfile::new(&g);
        let best = profile.fisher().iter().cloned().fold(0.0, f64::max);
        assert!((best - 64.0).abs() < 64.0 * 1e-4, "I={best}");
        assert!((qfi_oracle_pure(&state) - 64.0).abs() < 1e-12);
        let a = coherence_series(&g, qfi_tau(8));
        let (j, _) = profile.working_point();
        let bound = qfi_bound(&a, j).unwrap();
        assert!((bound - 64.0).abs() < 64.0 * 1e-3, "bound={bound}");
    }

    #[test]
    fn ghz_is_not_squeezed() {
        let g = grid(&StateVector::ghz(CollectiveBasis::qubits(8)));
        let profile = ThetaProfile::new(&g);
        assert!(profile.xi2().iter().all(|&x| x > 1e3));
    }

    #[test]
    fn oat_squeezing_matches_exact_moments() {
        let state = oat(20, 0.05);
        let g = grid(&state);
        let profile = ThetaProfile::new(&g);
        for (j, &x) in profile.xi2().iter().enumerate() {
            let (_, var, slope) = exact_moments(&state, g.thetas()[j]);
            if !x.is_finite() {
                assert!(slope.abs() < 1e-6);
                continue;
            }
            let expected = 20.0 * var / (slope * slope);
            assert!((x - expected).abs() < 1e-8 * expected.max(1.0), "j={j}");
        }
    }

    #[test]
    fn squeezed_quadrature_in_the_measured_plane_gives_xi_below_one() {
        // turn the OAT ellipse about x so its narrow axis lies in the equator
        let n = 20;
        let ops = SpinOperators::new(HalfInteger::qubits(n)).unwrap();
        let base = oat(n, 0.05);
        let best = (0..64)
            .map(|k| {
                let beta = PI * k as f64 / 64.0;
                let turned = base.evolve(&ops.jx, beta).unwrap();
                let profile = ThetaProfile::new(&grid(&turned));
                profile.xi2().iter().cloned().fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(best < 0.5, "xi2={best}");
    }

    #[test]
    fn mixed_state_is_flat() {
        let rho = SymmetricDensityMatrix::maximally_mixed(6);
        let g = direct_grid(&rho, default_theta_points(6)).unwrap();
        let profile = ThetaProfile::new(&g);
        assert!(profile.fisher().iter().all(|&i| i.abs() < 1e-20));
        assert!(profile.xi2().iter().all(|x| x.is_infinite()));
        let a = coherence_series(&g, qfi_tau(6));
        assert!(qfi_bound(&a, 3).unwrap().abs() < 1e-10);
        let report = certify_grid(&g, None).unwrap();
        assert!(report.fisher < 1e-20);
        assert!(report.bell_e < 1e-20);
        assert!(report.hierarchy_ok);
        assert_eq!(report.depth_bound, 1);
    }

    #[test]
    fn qfi_bound_degenerate_rule() {
        let flat = vec![Complex64::new(1.0, 0.0); 8];
        assert_eq!(qfi_bound(&flat, 2).unwrap(), 0.0);
        let rotating: Vec<Complex64> = (0..8)
            .map(|j| Complex64::from_polar(1.0, 3.0 * 2.0 * PI * j as f64 / 8.0))
            .collect();
        assert!((qfi_bound(&rotating, 1).unwrap() - 9.0).abs() < 1e-9);
        let mut bulging = flat.clone();
        bulging[3] = Complex64::new(0.5, 0.0);
        assert!(matches!(qfi_bound(&bulging, 2), Err(Error::Degenerate(_))));
        assert!(qfi_bound(&flat[..2], 0).is_err());
    }

    #[test]
    fn qfi_oracle_examples() {
        assert!((qfi_oracle_pure(&css_x(10)) - 10.0).abs() < 1e-10);
        let dicke = StateVector::dicke(CollectiveBasis::qubits(6), HalfInteger::from_twice(2)).unwrap();
        assert!(qfi_oracle_pure(&dicke).abs() < 1e-15);
    }

    fn extreme_coherence_sq(state: &StateVector) -> f64 {
        SymmetricDensityMatrix::from_pure(state).unwrap().bell_correlator()
    }

    #[test]
    fn extraction_recovers_extreme_coherence() {
        for n in [2usize, 5, 8, 13] {
            let d = mixing_matrix(HalfInteger::qubits(n)).unwrap();
            for state in [StateVector::ghz(CollectiveBasis::qubits(n)), oat(n, 0.4), oat(n, FRAC_PI_2)] {
                let got = extract_bell_correlator(&grid(&state), &d).unwrap();
                assert!((got.e - extreme_coherence_sq(&state)).abs() < 1e-8, "N={n}");
            }
        }
        let ghz = StateVector::ghz(CollectiveBasis::qubits(8));
        let got = extract_bell_correlator(&grid(&ghz), &mixing_matrix(HalfInteger::qubits(8)).unwrap()).unwrap();
        assert!((got.q - 6.0).abs() < 1e-8);
    }

    #[test]
    fn oat_half_pi_is_ghz_like() {
        // the twisted cat points along x; a quarter turn about y aligns it with z
        let ops = SpinOperators::new(HalfInteger::qubits(8)).unwrap();
        let state = oat(8, FRAC_PI_2).evolve(&ops.jy, FRAC_PI_2).unwrap();
        let d = mixing_matrix(HalfInteger::qubits(8)).unwrap();
        let got = extract_bell_correlator(&grid(&state), &d).unwrap();
        assert!((got.e - 0.25).abs() < 1e-8, "{got:?}");
    }

    #[test]
    fn extraction_checks_inputs() {
        let g = grid(&css_x(4));
        let wrong = mixing_matrix(HalfInteger::qubits(5)).unwrap();
        assert!(extract_bell_correlator(&g, &wrong).is_err());
    }

    #[test]
    fn depth_examples() {
        assert_eq!(depth_bound_from_fisher(8.0, 8), 1);
        assert_eq!(depth_bound_from_fisher(64.0, 8), 8);
        assert_eq!(depth_bound_from_fisher(64.0 * (1.0 + 1e-12), 8), 8);
        assert_eq!(depth_bound_from_fisher(8.5, 8), 2);
        assert_eq!(depth_bound_from_fisher(0.0, 8), 1);
        assert_eq!(depth_bound_from_fisher(30.0, 12), 3);
    }

    /// Largest `sum b_i^2` over partitions of `n` into parts of size at most `k`.
    fn best_partition(n: usize, k: usize) -> usize {
        fn go(rest: usize, cap: usize) -> usize {
            if rest == 0 {
                return 0;
            }
            (1..=cap.min(rest)).map(|b| b * b + go(rest - b, b)).max().unwrap()
        }
        go(n, k)
    }

    #[test]
    fn depth_matches_exhaustive_partition_search() {
        let n = 12;
        for step in 0..=(n * n * 4) {
            let i = step as f64 * 0.25 + 0.1;
            let searched = (1..=n).find(|&k| best_partition(n, k) as f64 >= i).unwrap_or(n);
            assert_eq!(depth_bound_from_fisher(i, n), searched, "I={i}");
        }
        assert_eq!(depth_bound_from_fisher(2.5 * 12.0, 12), 3);
    }

    #[test]
    fn fisher_central_difference_converges_quadratically() {
        let state = oat(6, 0.3);
        let fine = ThetaProfile::new(&grid_of(&state, 64)).fisher()[0];
        let errors: Vec<f64> = [32usize, 64, 128]
            .iter()
            .map(|&len| {
                let p = ThetaProfile::with_scheme(&grid_of(&state, len), Differentiation::CentralDifference);
                (p.fisher()[0] - fine).abs()
            })
            .collect();
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn css_and_ghz_reports() {
        let css = css_x(16);
        let report = certify_grid(&grid(&css), Some(&css)).unwrap();
        assert!((report.xi2 - 1.0).abs() < 1e-9);
        assert!((report.fisher - 16.0).abs() < 1e-5);
        assert_eq!(report.depth_bound, 1);
        assert!(report.hierarchy_ok, "{report:?}");

        let ghz = StateVector::ghz(CollectiveBasis::qubits(8));
        let report = certify_grid(&grid(&ghz), Some(&ghz)).unwrap();
        assert_eq!(report.working_point, WorkingPoint::MaxFisher);
        assert!((report.bell_q - 6.0).abs() < 1e-8);
        assert!((report.fisher - 64.0).abs() < 1e-3);
        assert!((report.qfi_bound - 64.0).abs() < 0.1);
        assert_eq!(report.depth_bound, 8);
        assert!(report.hierarchy_ok);
    }

    #[test]
    fn report_json_is_rounded_and_ordered() {
        let rho = SymmetricDensityMatrix::maximally_mixed(4);
        let report = certify_grid(&direct_grid(&rho, 10).unwrap(), None).unwrap();
        let json = report.to_json().unwrap();
        let n_pos = json.find("\"n\"").unwrap();
        let xi_pos = json.find("\"xi2\"").unwrap();
        let cr_pos = json.find("\"cramer_rao\"").unwrap();
        assert!(n_pos < xi_pos && xi_pos < cr_pos);
        assert!(json.contains("\"xi2\": null"));
        assert!(json.contains("\"qfi_oracle\": null"));
    }

    #[test]
    fn randomized_oat_hierarchy() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [4usize, 8, 16] {
            for _ in 0..20 {
                let chi_t = rng.random_range(0.0..PI);
                let state = oat(n, chi_t);
                let g = grid(&state);
                let report = certify_grid(&g, Some(&state)).unwrap();
                assert!(report.hierarchy_slack >= -1e-6, "N={n} chi_t={chi_t}: {report:?}");
                let oracle = qfi_oracle_pure(&state);
                if report.qfi_bound.is_finite() {
                    assert!(report.qfi_bound <= oracle + 1e-6, "N={n} chi_t={chi_t}: {report:?}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn depth_is_monotone(n in 1usize..40, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let top = (n * n) as f64;
            let (lo, hi) = if a <= b { (a * top, b * top) } else { (b * top, a * top) };
            let (dl, dh) = (depth_bound_from_fisher(lo, n), depth_bound_from_fisher(hi, n));
            prop_assert!(dl <= dh);
            prop_assert!((1..=n).contains(&dl));
        }

        #[test]
        fn hierarchy_holds_for_oat_states(n in 2usize..12, chi_t in 0.0f64..3.2) {
            let state = oat(n, chi_t);
            let report = certify_grid(&grid(&state), Some(&state)).unwrap();
            prop_assert!(report.hierarchy_ok, "{:?}", report);
        }
    }
}
