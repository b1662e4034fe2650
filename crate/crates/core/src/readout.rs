//! Probe-qubit read-out of a symmetric `N`-qubit state.
//!
//! The system first receives a phase imprint `exp(-i theta J_z)` and a pi/2 mixing pulse.
//! It then couples to a probe prepared along `+x` through `sum_i J_i sigma_z^i sigma_z^pr`.
//! The probe coherence `a(t)` is the Fourier transform of the population distribution
//! `p_n(theta)` over `n = (n_up - n_down)/2`. Sampling it at integer `tau` and inverting
//! recovers `p_n(theta)`.
//!
//! Probability rows are always stored in ascending `n`, so row `k` holds `n = k - N/2`.
//! Dicke-basis vectors stay in descending `m`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_sig;
use crate::fourier::{self, offset_dft_forward};
use crate::linalg::{self, ComplexMatrix};
use crate::spin::{mixing_matrix, CollectiveBasis, HalfInteger, MixingMatrix, StateVector};

/// Tolerance for validating densities and probability vectors.
pub const DENSITY_TOLERANCE: f64 = 1e-12;
/// Negative reconstructed weights above `-NEGATIVE_CLAMP` are treated as round-off.
pub const NEGATIVE_CLAMP: f64 = 1e-10;
/// Largest system for the literal sum over all `2^N` configurations.
pub const GENERAL_COUPLING_LIMIT: usize = 16;

/// Density matrix of `N` qubits restricted to the symmetric manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricDensityMatrix {
    n: usize,
    rho: ComplexMatrix,
}

impl SymmetricDensityMatrix {
    pub fn new(n: usize, rho: ComplexMatrix) -> Result<Self> {
        if rho.nrows() != n + 1 || rho.ncols() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: rho.nrows().max(rho.ncols()),
            });
        }
        let deviation = linalg::hermiticity_deviation(&rho);
        if deviation > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "Hermiticity deviation {deviation:.3e}"
            )));
        }
        let trace = rho.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace}")));
        }
        let lowest = rho.clone().symmetric_eigenvalues().min();
        if lowest < -NEGATIVE_CLAMP {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {lowest:.3e}"
            )));
        }
        Ok(Self { n, rho })
    }

    pub fn from_pure(state: &StateVector) -> Result<Self> {
        let n = state.basis().spin().twice() as usize;
        let psi = state.amplitudes();
        Self::new(n, psi * psi.adjoint())
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = n + 1;
        Self {
            n,
            rho: ComplexMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    /// Incoherent mixture `sum_k w_k |m_k><m_k|` over Dicke states.
    pub fn dicke_mixture(n: usize, weights: &[f64]) -> Result<Self> {
        validate_distribution(weights, n + 1)?;
        Self::new(n, linalg::diagonal(weights.iter().copied()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// `rho_{N/2, -N/2}`, the GHZ coherence.
    pub fn extreme_coherence(&self) -> Complex64 {
        self.rho[(0, self.n)]
    }

    /// `|rho_{N/2,-N/2}|^2`, the Bell correlator of the `N`-qubit state.
    pub fn bell_correlator(&self) -> f64 {
        self.extreme_coherence().norm_sqr()
    }

    /// `<J_z^2> - <J_z>^2`.
    pub fn jz_variance(&self) -> f64 {
        let m = CollectiveBasis::qubits(self.n).m_values();
        let (mean, second) = m.iter().enumerate().fold((0.0, 0.0), |(a, b), (k, mv)| {
            let p = self.rho[(k, k)].re;
            (a + p * mv, b + p * mv * mv)
        });
        second - mean * mean
    }
}

/// The phase imprint followed by the pi/2 mixing pulse for one `N`.
#[derive(Clone, Debug)]
pub struct LocalOps {
    n: usize,
    mixing: MixingMatrix,
    m: Vec<f64>,
}

impl LocalOps {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one qubit".into()));
        }
        let spin = HalfInteger::qubits(n);
        Ok(Self {
            n,
            mixing: mixing_matrix(spin)?,
            m: CollectiveBasis::qubits(n).m_values(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mixing(&self) -> &MixingMatrix {
        &self.mixing
    }

    fn check(&self, rho: &SymmetricDensityMatrix) -> Result<()> {
        if rho.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: rho.n,
            });
        }
        Ok(())
    }

    /// `D exp(-i theta J_z)` applied on the left of `rho`.
    fn left_product(&self, rho: &SymmetricDensityMatrix, theta: f64) -> ComplexMatrix {
        let phased = ComplexMatrix::from_fn(self.n + 1, self.n + 1, |r, c| {
            rho.rho[(r, c)] * Complex64::from_polar(1.0, -theta * (self.m[r] - self.m[c]))
        });
        self.mixing.matrix() * phased
    }

    /// `rho(theta) = D exp(-i theta J_z) rho exp(i theta J_z) D^dagger`.
    pub fn apply(&self, rho: &SymmetricDensityMatrix, theta: f64) -> Result<SymmetricDensityMatrix> {
        self.check(rho)?;
        let out = self.left_product(rho, theta) * self.mixing.matrix().adjoint();
        Ok(SymmetricDensityMatrix {
            n: self.n,
            rho: (&out + out.adjoint()) * Complex64::new(0.5, 0.0),
        })
    }

    /// Diagonal of `rho(theta)` in ascending `n`.
    pub fn probabilities(&self, rho: &SymmetricDensityMatrix, theta: f64) -> Result<Vec<f64>> {
        self.check(rho)?;
        let left = self.left_product(rho, theta);
        let d = self.mixing.matrix();
        Ok((0..=self.n)
            .rev()
            .map(|row| {
                left.row(row)
                    .iter()
                    .zip(d.row(row).iter())
                    .map(|(x, y)| x * y.conj())
                    .sum::<Complex64>()
                    .re
            })
            .collect())
    }
}

pub fn apply_local_ops(rho: &SymmetricDensityMatrix, theta: f64) -> Result<SymmetricDensityMatrix> {
    LocalOps::new(rho.n)?.apply(rho, theta)
}

/// `p_n(theta)` straight from the rotated density matrix, ascending `n`.
pub fn probability_direct(rho: &SymmetricDensityMatrix, theta: f64) -> Result<Vec<f64>> {
    LocalOps::new(rho.n)?.probabilities(rho, theta)
}

/// Checks length, sign and normalization of a probability vector.
pub fn validate_distribution(p: &[f64], expected_len: usize) -> Result<()> {
    if p.len() != expected_len {
        return Err(Error::InvalidDistribution(format!(
            "expected {expected_len} entries, got {}",
            p.len()
        )));
    }
    if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < -NEGATIVE_CLAMP) {
        return Err(Error::InvalidDistribution(format!("entry {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NEGATIVE_CLAMP {
        return Err(Error::InvalidDistribution(format!("sums to {total}")));
    }
    Ok(())
}

/// `a(tau) = sum_n p_n exp(-i 2 pi tau n / (N+1))` for `p` in ascending `n`.
pub fn probe_coherence_symmetric(p: &[f64], tau: f64, n: usize) -> Result<Complex64> {
    validate_distribution(p, n + 1)?;
    let weights: Vec<Complex64> = p.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(offset_dft_forward(&weights, tau))
}

/// `tau = 2 J (N+1) t / pi`, the DFT index reached after time `t` with uniform coupling `J`.
pub fn tau_from_time(j: f64, n: usize, t: f64) -> f64 {
    2.0 * j * (n + 1) as f64 * t / PI
}

pub fn time_from_tau(j: f64, n: usize, tau: f64) -> f64 {
    PI * tau / (2.0 * j * (n + 1) as f64)
}

/// System-probe coupling and interaction time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ProbeCoupling {
    Uniform { j: f64, t: f64 },
    General { couplings: Vec<f64>, t: f64 },
}

impl ProbeCoupling {
    pub fn uniform(j: f64, t: f64) -> Result<Self> {
        if !(j.is_finite() && j != 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("coupling J={j}, t={t}")));
        }
        Ok(Self::Uniform { j, t })
    }

    pub fn uniform_at_tau(j: f64, n: usize, tau: f64) -> Result<Self> {
        Self::uniform(j, time_from_tau(j, n, tau))
    }

    pub fn general(couplings: Vec<f64>, t: f64) -> Result<Self> {
        if couplings.len() > GENERAL_COUPLING_LIMIT {
            return Err(Error::SizeGuard {
                what: "general-coupling qubit count",
                requested: couplings.len(),
                limit: GENERAL_COUPLING_LIMIT,
            });
        }
        if couplings.iter().any(|c| !c.is_finite()) || !t.is_finite() {
            return Err(Error::InvalidParameter("non-finite coupling or time".into()));
        }
        Ok(Self::General { couplings, t })
    }

    pub fn time(&self) -> f64 {
        match self {
            Self::Uniform { t, .. } | Self::General { t, .. } => *t,
        }
    }

    /// `tau` of a uniform coupling; `None` for site-dependent couplings.
    pub fn tau(&self, n: usize) -> Option<f64> {
        match self {
            Self::Uniform { j, t } => Some(tau_from_time(*j, n, *t)),
            Self::General { .. } => None,
        }
    }

    /// Normalized probe coherence for a diagonal over all `2^N` configurations.
    pub fn coherence(&self, full_diagonal: &[f64]) -> Result<Complex64> {
        let n = full_diagonal.len().trailing_zeros() as usize;
        match self {
            Self::Uniform { j, t } => probe_coherence_general(full_diagonal, &vec![*j; n], *t),
            Self::General { couplings, t } => probe_coherence_general(full_diagonal, couplings, *t),
        }
    }
}

/// Literal `a = sum_s p_s exp(-2 i t sum_i J_i s_i)` over all `2^N` configurations.
///
/// Configuration bit `i` is qubit `i`, with 0 meaning `s_i = +1`.
pub fn probe_coherence_general(full_diagonal: &[f64], couplings: &[f64], t: f64) -> Result<Complex64> {
    let n = couplings.len();
    if n > GENERAL_COUPLING_LIMIT {
        return Err(Error::SizeGuard {
            what: "general-coupling qubit count",
            requested: n,
            limit: GENERAL_COUPLING_LIMIT,
        });
    }
    validate_distribution(full_diagonal, 1 << n)?;
    Ok(full_diagonal
        .iter()
        .enumerate()
        .map(|(config, &p)| {
            let field: f64 = couplings
                .iter()
                .enumerate()
                .map(|(i, j)| if config >> i & 1 == 0 { *j } else { -*j })
                .sum();
            Complex64::from_polar(p, -2.0 * t * field)
        })
        .sum())
}

/// Probe coherence and population at one `tau`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeSample {
    pub tau: f64,
    /// Coherence normalized to its value at `tau = 0`.
    pub a: Complex64,
    /// Upper diagonal element of the probe density matrix.
    pub population: f64,
}

/// Outcome of inverting one probe time series.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    /// `p_n` in ascending `n`.
    pub p: Vec<f64>,
    /// `max_tau |a_tau - a_tau(p)|`, zero for consistent input.
    pub residual: f64,
}

/// Inverts the probe coherence sampled at `tau = 0, 1, ..., N`.
pub fn reconstruct_probabilities(samples: &[ProbeSample], n: usize) -> Result<Reconstruction> {
    let indexed = samples
        .iter()
        .map(|s| {
            let rounded = s.tau.round();
            if (s.tau - rounded).abs() > 1e-9 {
                Err(Error::InvalidSamples(format!("tau {} is not an integer", s.tau)))
            } else {
                Ok((rounded as i64, s.a))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let weights = fourier::offset_dft_inverse(&indexed, n)?;
    let mut p: Vec<f64> = weights.iter().map(|(_, w)| w.re).collect();
    if let Some(worst) = p.iter().copied().filter(|v| *v < -NEGATIVE_CLAMP).reduce(f64::min) {
        return Err(Error::NonPhysical(format!("reconstructed weight {worst:.3e}")));
    }
    p.iter_mut().filter(|v| **v < 0.0).for_each(|v| *v = 0.0);
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NEGATIVE_CLAMP {
        return Err(Error::NonPhysical(format!("reconstructed weights sum to {total}")));
    }
    p.iter_mut().for_each(|v| *v /= total);

    let synth: Vec<Complex64> = p.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let residual = indexed
        .iter()
        .map(|&(tau, a)| (offset_dft_forward(&synth, tau as f64) - a).norm())
        .fold(0.0, f64::max);
    Ok(Reconstruction { p, residual })
}

/// Where a [`ReadoutGrid`] came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ReconstructedFromProbe,
    Direct,
}

/// `theta_j = 2 pi j / n_theta`.
pub fn theta_grid(n_theta: usize) -> Vec<f64> {
    (0..n_theta)
        .map(|j| 2.0 * PI * j as f64 / n_theta as f64)
        .collect()
}

/// Smallest grid resolving every frequency `|m - m'| <= N`.
pub fn min_theta_points(n: usize) -> usize {
    2 * n + 2
}

/// Default `n_theta = 4 (N+1)`.
pub fn default_theta_points(n: usize) -> usize {
    4 * (n + 1)
}

/// Probabilities `p_n(theta_j)` on a uniform periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutGrid {
    n: usize,
    thetas: Vec<f64>,
    /// `p[k][j]` with `n = k - N/2`.
    p: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl ReadoutGrid {
    /// Builds a grid from one probability column per `theta_j`.
    pub fn from_columns(n: usize, columns: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self> {
        let n_theta = columns.len();
        if n_theta < min_theta_points(n) {
            return Err(Error::InvalidGrid(format!(
                "{n_theta} theta points cannot resolve N={n}; need at least {}",
                min_theta_points(n)
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            validate_distribution(col, n + 1).map_err(|e| {
                Error::InvalidGrid(format!("column {j}: {e}"))
            })?;
        }
        let p = (0..=n)
            .map(|k| columns.iter().map(|col| col[k]).collect())
            .collect();
        Ok(Self {
            n,
            thetas: theta_grid(n_theta),
            p,
            provenance,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `n` of row `k`.
    pub fn label(&self, k: usize) -> HalfInteger {
        HalfInteger::from_twice(2 * k as i64 - self.n as i64)
    }

    pub fn labels(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.label(k).value()).collect()
    }

    /// Row index of label `n`.
    pub fn row_of(&self, label: HalfInteger) -> Option<usize> {
        let k = label.twice() + self.n as i64;
        (k >= 0 && k % 2 == 0 && k / 2 <= self.n as i64).then(|| (k / 2) as usize)
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.p[k]
    }

    pub fn value(&self, k: usize, j: usize) -> f64 {
        self.p[k][j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.p.iter().map(|row| row[j]).collect()
    }

    pub fn max_abs_difference(&self, other: &ReadoutGrid) -> Result<f64> {
        if self.n != other.n || self.n_theta() != other.n_theta() {
            return Err(Error::DimensionMismatch {
                expected: (self.n + 1) * self.n_theta(),
                found: (other.n + 1) * other.n_theta(),
            });
        }
        Ok(self
            .p
            .iter()
            .flatten()
            .zip(other.p.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// CSV `theta,n,p`, one row per cell, theta-major.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        out.write_record(["theta", "n", "p"])?;
        let labels = self.labels();
        for (j, theta) in self.thetas.iter().enumerate() {
            for (k, label) in labels.iter().enumerate() {
                out.write_record([fmt_sig(*theta), fmt_sig(*label), fmt_sig(self.p[k][j])])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a grid written by [`ReadoutGrid::write_csv`].
    pub fn read_csv<R: Read>(reader: R, provenance: Provenance) -> Result<Self> {
        let mut input = csv::Reader::from_reader(reader);
        let headers = input.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["theta", "n", "p"] {
            return Err(Error::InvalidGrid(format!("unexpected header {headers:?}")));
        }
        let mut cells: Vec<(f64, f64, f64)> = Vec::new();
        for record in input.records() {
            let record = record?;
            let field = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::InvalidGrid(format!("bad record {record:?}")))
            };
            cells.push((field(0)?, field(1)?, field(2)?));
        }
        let max_label = cells.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        let n = HalfInteger::from_f64(max_label)
            .ok()
            .filter(|h| h.twice() >= 1)
            .ok_or_else(|| Error::InvalidGrid("cannot infer N from labels".into()))?
            .twice() as usize;
        if cells.is_empty() || cells.len() % (n + 1) != 0 {
            return Err(Error::InvalidGrid("incomplete grid".into()));
        }
        let n_theta = cells.len() / (n + 1);
        let expected = theta_grid(n_theta);
        let mut columns = vec![vec![0.0; n + 1]; n_theta];
        for (idx, &(theta, label, p)) in cells.iter().enumerate() {
            let (j, k) = (idx / (n + 1), idx % (n + 1));
            if (theta - expected[j]).abs() > 1e-9 || (label - (k as f64 - n as f64 / 2.0)).abs() > 1e-9 {
                return Err(Error::InvalidGrid(format!(
                    "cell {idx} at theta={theta}, n={label} is out of order"
                )));
            }
            columns[j][k] = p;
        }
        Self::from_columns(n, columns, provenance)
    }
}

/// `p_n(theta_j)` computed directly from the density matrix.
pub fn direct_grid(rho: &SymmetricDensityMatrix, n_theta: usize) -> Result<ReadoutGrid> {
    let ops = LocalOps::new(rho.n)?;
    let columns = theta_grid(n_theta)
        .par_iter()
        .map(|&theta| ops.probabilities(rho, theta))
        .collect::<Result<Vec<_>>>()?;
    ReadoutGrid::from_columns(rho.n, columns, Provenance::Direct)
}

/// Probe time series for every theta and the grid reconstructed from them.
#[derive(Clone, Debug)]
pub struct ProbeRun {
    pub grid: ReadoutGrid,
    /// `samples[j]` holds `tau = 0..=N` at `theta_j`.
    pub samples: Vec<Vec<ProbeSample>>,
    /// Largest reconstruction residual over the grid.
    pub residual: f64,
    pub coupling_j: f64,
}

/// Upper population of the probe prepared along `+x`; the Ising coupling leaves it fixed.
pub const PROBE_POPULATION: f64 = 0.5;

/// Simulates the read-out protocol with uniform coupling `j`.
///
/// At each `theta_j` the probe coherence is evaluated at the times `t_k` where
/// `tau = k` for `k = 0..=N`, then inverted back to `p_n(theta_j)`.
pub fn simulate_probe_run(rho: &SymmetricDensityMatrix, n_theta: usize, j: f64) -> Result<ProbeRun> {
    let n = rho.n;
    if n_theta < min_theta_points(n) {
        return Err(Error::InvalidGrid(format!(
            "{n_theta} theta points cannot resolve N={n}"
        )));
    }
    if !(j.is_finite() && j != 0.0) {
        return Err(Error::InvalidParameter(format!("coupling J={j}")));
    }
    let ops = LocalOps::new(n)?;
    let labels: Vec<f64> = (0..=n).map(|k| k as f64 - n as f64 / 2.0).collect();
    let per_theta = theta_grid(n_theta)
        .par_iter()
        .map(|&theta| -> Result<(Vec<f64>, Vec<ProbeSample>, f64)> {
            let p = ops.probabilities(rho, theta)?;
            validate_distribution(&p, n + 1)?;
            let samples: Vec<ProbeSample> = (0..=n)
                .map(|k| {
                    let t = time_from_tau(j, n, k as f64);
                    let a = p
                        .iter()
                        .zip(&labels)
                        .map(|(&w, &label)| Complex64::from_polar(w, -4.0 * j * t * label))
                        .sum();
                    ProbeSample {
                        tau: k as f64,
                        a,
                        population: PROBE_POPULATION,
                    }
                })
                .collect();
            let rec = reconstruct_probabilities(&samples, n)?;
            Ok((rec.p, samples, rec.residual))
        })
        .collect::<Result<Vec<_>>>()?;
    let residual = per_theta.iter().map(|r| r.2).fold(0.0, f64::max);
    let (columns, samples): (Vec<_>, Vec<_>) = per_theta.into_iter().map(|(p, s, _)| (p, s)).unzip();
    Ok(ProbeRun {
        grid: ReadoutGrid::from_columns(n, columns, Provenance::ReconstructedFromProbe)?,
        samples,
        residual,
        coupling_j: j,
    })
}

/// CSV `theta,tau,re_a,im_a,P` for a probe run.
pub fn write_samples_csv<W: Write>(run: &ProbeRun, writer: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    out.write_record(["theta", "tau", "re_a", "im_a", "P"])?;
    for (theta, series) in run.grid.thetas().iter().zip(&run.samples) {
        for s in series {
            out.write_record([
                fmt_sig(*theta),
                fmt_sig(s.tau),
                fmt_sig(s.a.re),
                fmt_sig(s.a.im),
                fmt_sig(s.population),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Normalized theta-DFT magnitudes `|c_f|` of row `k`, ordered by signed frequency.
pub fn theta_spectrum(grid: &ReadoutGrid, k: usize) -> Vec<(i64, f64)> {
    let values: Vec<Complex64> = grid.row(k).iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let len = values.len();
    let mut spectrum: Vec<(i64, f64)> = fourier::periodic_coefficients(&values)
        .into_iter()
        .enumerate()
        .map(|(bin, c)| (fourier::signed_frequency(bin, len), c.norm()))
        .collect();
    spectrum.sort_by_key(|(f, _)| *f);
    spectrum
}
