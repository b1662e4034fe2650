//! Brute-force reference implementations on the full `2^mu` product space.
//!
//! Bit `i` of a basis index is qubit `i`, with 0 meaning spin up. When a probe is present it
//! is qubit 0 and system qubit `i` sits on bit `i + 1`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generation::{BellCorrelator, CentralSpinParams, GenerationModel, JointState};
use crate::linalg::{self, ComplexMatrix, ComplexVector, HermitianSpectrum};
use crate::readout::{probability_direct, probe_coherence_general, SymmetricDensityMatrix};
use crate::spin::{ln_binomial, StateVector};

/// Largest qubit count for full state vectors.
pub const MAX_STATE_QUBITS: usize = 12;
/// Largest system size for full density matrices.
pub const MAX_DENSITY_QUBITS: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn guard(what: &'static str, requested: usize, limit: usize) -> Result<()> {
    if requested > limit {
        return Err(Error::SizeGuard {
            what,
            requested,
            limit,
        });
    }
    Ok(())
}

/// Single-qubit operator in the `(up, down)` basis.
pub type Qubit2 = [[Complex64; 2]; 2];

/// A pure state of `mu` qubits in the product basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FullState {
    mu: usize,
    amps: ComplexVector,
}

impl FullState {
    pub fn new(mu: usize, amps: ComplexVector) -> Result<Self> {
        guard("full-state qubit count", mu, MAX_STATE_QUBITS)?;
        if amps.len() != 1 << mu {
            return Err(Error::DimensionMismatch {
                expected: 1 << mu,
                found: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { mu, amps })
    }

    /// Tensor product of single-qubit states, qubit 0 first.
    pub fn product(qubits: &[[Complex64; 2]]) -> Result<Self> {
        let mu = qubits.len();
        guard("full-state qubit count", mu, MAX_STATE_QUBITS)?;
        let amps = ComplexVector::from_iterator(
            1 << mu,
            (0..1usize << mu).map(|idx| {
                qubits
                    .iter()
                    .enumerate()
                    .map(|(q, s)| s[idx >> q & 1])
                    .product::<Complex64>()
            }),
        );
        Self::new(mu, amps)
    }

    /// Every qubit along `+x`.
    pub fn plus_x(mu: usize) -> Result<Self> {
        let plus = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::product(&vec![[plus, plus]; mu])
    }

    pub fn qubits(&self) -> usize {
        self.mu
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amps
    }

    pub fn inner(&self, other: &FullState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// Applies a single-qubit operator to qubit `q` (not necessarily unitary).
    fn apply_qubit(amps: &mut ComplexVector, q: usize, op: &Qubit2) {
        let bit = 1usize << q;
        for i0 in (0..amps.len()).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            let (a0, a1) = (amps[i0], amps[i1]);
            amps[i0] = op[0][0] * a0 + op[0][1] * a1;
            amps[i1] = op[1][0] * a0 + op[1][1] * a1;
        }
    }

    /// The same operator on every qubit.
    pub fn apply_all(&self, op: &Qubit2) -> ComplexVector {
        let mut amps = self.amps.clone();
        for q in 0..self.mu {
            Self::apply_qubit(&mut amps, q, op);
        }
        amps
    }
}

fn popcount(idx: usize) -> usize {
    idx.count_ones() as usize
}

/// Maps a Dicke state onto the product basis.
///
/// Dicke index `d` (descending `m`) has `d` down spins and spreads evenly over all such bit strings.
pub fn embed_symmetric(state: &StateVector) -> Result<FullState> {
    let n = state.basis().dim() - 1;
    guard("full-state qubit count", n, MAX_STATE_QUBITS)?;
    let c = state.amplitudes();
    let amps = ComplexVector::from_iterator(
        1 << n,
        (0..1usize << n).map(|idx| {
            let downs = popcount(idx);
            c[downs] * (-0.5 * ln_binomial(n as u64, downs as u64)).exp()
        }),
    );
    FullState::new(n, amps)
}

/// Maps a probe-plus-system state onto the product basis with the probe on qubit 0.
pub fn embed_joint(state: &JointState) -> Result<FullState> {
    let n = state.system_qubits();
    guard("full-state qubit count", n + 1, MAX_STATE_QUBITS)?;
    let c = state.amplitudes();
    let amps = ComplexVector::from_iterator(
        1 << (n + 1),
        (0..1usize << (n + 1)).map(|idx| {
            let probe_down = idx & 1 == 1;
            let downs = popcount(idx >> 1);
            c[JointState::index(n, probe_down, downs)]
                * (-0.5 * ln_binomial(n as u64, downs as u64)).exp()
        }),
    );
    FullState::new(n + 1, amps)
}

/// Exact evolution under the central-spin Hamiltonian written over individual qubits.
///
/// The Hamiltonian conserves the number of up spins, so each sector is diagonalized alone.
pub fn full_central_spin_evolution(
    params: &CentralSpinParams,
    n: usize,
    t: f64,
    psi0: &FullState,
) -> Result<FullState> {
    guard("central-spin system size", n, MAX_STATE_QUBITS - 1)?;
    if psi0.qubits() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: psi0.qubits(),
        });
    }
    let mu = n + 1;
    let energy = |idx: usize| -> f64 {
        (0..mu)
            .map(|q| {
                let s = if idx >> q & 1 == 0 { 0.5 } else { -0.5 };
                let w = if q == 0 { params.omega_probe } else { params.omega_sys };
                w * s
            })
            .sum()
    };
    let mut out = ComplexVector::zeros(1 << mu);
    for ups in 0..=mu {
        let sector: Vec<usize> = (0..1usize << mu).filter(|&i| mu - popcount(i) == ups).collect();
        let position = |idx: usize| sector.binary_search(&idx).expect("flip-flop keeps the sector");
        let dim = sector.len();
        let mut h = ComplexMatrix::zeros(dim, dim);
        for (col, &x) in sector.iter().enumerate() {
            h[(col, col)] = Complex64::new(energy(x), 0.0);
            // sigma_-^probe sigma_+^i: probe up -> down, qubit i down -> up
            if x & 1 == 0 {
                for i in 1..mu {
                    if x >> i & 1 == 1 {
                        let y = x ^ 1 ^ (1 << i);
                        let row = position(y);
                        h[(row, col)] = Complex64::new(params.g, 0.0);
                        h[(col, row)] = Complex64::new(params.g, 0.0);
                    }
                }
            }
        }
        let local = ComplexVector::from_iterator(dim, sector.iter().map(|&i| psi0.amps[i]));
        let evolved = HermitianSpectrum::new(&h)?.evolve(&local, t)?;
        for (k, &i) in sector.iter().enumerate() {
            out[i] = evolved[k];
        }
    }
    FullState::new(mu, out)
}

/// `exp(-i angle S_z^2)` with `S_z` the total spin of all qubits.
pub fn full_oat_evolution(angle: f64, psi0: &FullState) -> FullState {
    let mu = psi0.qubits();
    let amps = ComplexVector::from_iterator(
        1 << mu,
        psi0.amps.iter().enumerate().map(|(idx, a)| {
            let sz = (mu as f64 - 2.0 * popcount(idx) as f64) / 2.0;
            a * Complex64::from_polar(1.0, -angle * sz * sz)
        }),
    );
    FullState { mu, amps }
}

/// Local measurement frame: each qubit gets `R_y(polar) exp(-i azimuth sigma_z / 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasurementAxis {
    pub polar: f64,
    pub azimuth: f64,
}

impl MeasurementAxis {
    /// The equatorial frame used by the generation module.
    pub fn equatorial(azimuth: f64) -> Self {
        Self {
            polar: FRAC_PI_2,
            azimuth,
        }
    }

    fn rotation(&self) -> Qubit2 {
        let (c, s) = ((self.polar / 2.0).cos(), (self.polar / 2.0).sin());
        let up = Complex64::from_polar(1.0, -self.azimuth / 2.0);
        let down = Complex64::from_polar(1.0, self.azimuth / 2.0);
        [[up * c, -down * s], [up * s, down * c]]
    }

    /// `u^dag sigma_+ u` with `sigma_+ = |up><down|`.
    pub fn raising(&self) -> Qubit2 {
        let u = self.rotation();
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = u[0][r].conj() * u[1][c];
            }
        }
        out
    }
}

/// `|<prod_i sigma_+^(i)>|^2` with every raising operator taken about `axis`.
pub fn full_bell_correlator(state: &FullState, axis: MeasurementAxis) -> f64 {
    let raised = state.apply_all(&axis.raising());
    state.amps.dotc(&raised).norm_sqr()
}

/// `p_n(theta)` in ascending `n` after the phase imprint and pi/2 pulse on every qubit.
pub fn full_readout_probabilities(state: &FullState, theta: f64) -> Vec<f64> {
    let n = state.qubits();
    let imprint: Qubit2 = [
        [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
    ];
    let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mix: Qubit2 = [[c, Complex64::new(0.0, -FRAC_1_SQRT_2)], [Complex64::new(0.0, -FRAC_1_SQRT_2), c]];
    let mut amps = state.apply_all(&imprint);
    for q in 0..n {
        FullState::apply_qubit(&mut amps, q, &mix);
    }
    let mut p = vec![0.0; n + 1];
    for (idx, a) in amps.iter().enumerate() {
        p[n - popcount(idx)] += a.norm_sqr();
    }
    p
}

/// Probe `2x2` density matrix after evolving `rho_N (x) rho_probe` under
/// `sum_i J_i sigma_z^i sigma_z^probe` and tracing out the system.
pub fn full_probe_simulation(
    rho_n: &ComplexMatrix,
    couplings: &[f64],
    t: f64,
    probe_init: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let n = couplings.len();
    guard("density-matrix qubit count", n, MAX_DENSITY_QUBITS)?;
    let dim = 1usize << n;
    if rho_n.nrows() != dim || rho_n.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho_n.nrows(),
        });
    }
    if probe_init.nrows() != 2 || probe_init.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: probe_init.nrows(),
        });
    }
    for (what, m) in [("system", rho_n), ("probe", probe_init)] {
        let trace = m.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!("{what} trace {trace}")));
        }
    }
    // joint index = 2 * system + probe, so the probe is the lowest bit
    let joint = linalg::kron(rho_n, probe_init);
    let energy: Vec<f64> = (0..2 * dim)
        .map(|idx| {
            let probe = if idx & 1 == 0 { 1.0 } else { -1.0 };
            let field: f64 = couplings
                .iter()
                .enumerate()
                .map(|(i, j)| if idx >> (i + 1) & 1 == 0 { *j } else { -*j })
                .sum();
            field * probe
        })
        .collect();
    let evolved = ComplexMatrix::from_fn(2 * dim, 2 * dim, |r, c| {
        joint[(r, c)] * Complex64::from_polar(1.0, -t * (energy[r] - energy[c]))
    });
    Ok(ComplexMatrix::from_fn(2, 2, |p, q| {
        (0..dim).map(|s| evolved[(2 * s + p, 2 * s + q)]).sum()
    }))
}

/// `|+x><+x|` for the probe.
pub fn probe_plus_x() -> ComplexMatrix {
    ComplexMatrix::from_element(2, 2, Complex64::new(0.5, 0.0))
}

/// Off-diagonal element relative to its initial value.
pub fn normalized_coherence(probe: &ComplexMatrix, probe_init: &ComplexMatrix) -> Complex64 {
    probe[(0, 1)] / probe_init[(0, 1)]
}

/// `G G^dag / tr` with uniformly random complex entries.
pub fn random_density_matrix<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let trace = rho.trace();
    let rho = rho / trace;
    // restore exact Hermiticity after round-off
    (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Outcome of one brute-force comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleCheck {
    fn new(name: &str, deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            deviation,
            tolerance,
            passed: deviation <= tolerance,
        }
    }
}

/// All brute-force comparisons for one seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub checks: Vec<OracleCheck>,
    pub all_passed: bool,
}

/// Generation paths against the product-space twins at `mu = n + 1`.
pub fn check_generation(params: CentralSpinParams, n: usize, times: &[f64]) -> Result<Vec<OracleCheck>> {
    let model = GenerationModel::new(params, n)?;
    let joint_corr = BellCorrelator::joint(n)?;
    let collective_corr = BellCorrelator::collective(n + 1)?;
    let start = FullState::plus_x(n + 1)?;
    let (mut exact_dev, mut oat_dev, mut bell_dev) = (0.0f64, 0.0f64, 0.0f64);
    for &chi_t in times {
        let exact = model.exact_state(chi_t)?;
        let full_exact = full_central_spin_evolution(&params, n, params.physical_time(chi_t), &start)?;
        let embedded = embed_joint(&exact)?;
        exact_dev = exact_dev.max(1.0 - embedded.inner(&full_exact).norm());

        let oat = model.oat_state(chi_t);
        let full_oat = full_oat_evolution(chi_t * params.chi().signum(), &start);
        oat_dev = oat_dev.max(1.0 - embed_symmetric(&oat)?.inner(&full_oat).norm());

        for az in [0.0, 0.7, 2.0 * PI * chi_t.fract()] {
            let axis = MeasurementAxis::equatorial(az);
            let d1 = (joint_corr.evaluate(exact.amplitudes(), az)? - full_bell_correlator(&full_exact, axis)).abs();
            let d2 = (collective_corr.evaluate(oat.amplitudes(), az)? - full_bell_correlator(&full_oat, axis)).abs();
            bell_dev = bell_dev.max(d1).max(d2);
        }
    }
    Ok(vec![
        OracleCheck::new("central-spin evolution vs product space", exact_dev, 1e-10),
        OracleCheck::new("one-axis twisting vs product space", oat_dev, 1e-10),
        OracleCheck::new("Bell correlator vs product space", bell_dev, 1e-10),
    ])
}

/// Symmetric read-out probabilities against per-qubit pulses.
pub fn check_readout(state: &StateVector, thetas: &[f64]) -> Result<OracleCheck> {
    let rho = SymmetricDensityMatrix::from_pure(state)?;
    let full = embed_symmetric(state)?;
    let mut dev = 0.0f64;
    for &theta in thetas {
        let direct = probability_direct(&rho, theta)?;
        let brute = full_readout_probabilities(&full, theta);
        for (a, b) in direct.iter().zip(&brute) {
            dev = dev.max((a - b).abs());
        }
    }
    Ok(OracleCheck::new("read-out probabilities vs product space", dev, 1e-10))
}

/// Literal probe coherence sum against full joint evolution and partial trace.
pub fn check_probe<R: Rng>(n: usize, times: &[f64], rng: &mut R) -> Result<Vec<OracleCheck>> {
    let dim = 1usize << n;
    let rho = random_density_matrix(dim, rng);
    let couplings: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.5)).collect();
    let diagonal: Vec<f64> = (0..dim).map(|i| rho[(i, i)].re).collect();
    // same diagonal, different coherences
    let mut twin = random_density_matrix(dim, rng);
    for i in 0..dim {
        twin[(i, i)] = rho[(i, i)];
    }
    let init = probe_plus_x();
    let (mut coherence_dev, mut population_dev, mut diagonal_dev) = (0.0f64, 0.0f64, 0.0f64);
    for &t in times {
        let out = full_probe_simulation(&rho, &couplings, t, &init)?;
        let literal = probe_coherence_general(&diagonal, &couplings, t)?;
        coherence_dev = coherence_dev.max((normalized_coherence(&out, &init) - literal).norm());
        population_dev = population_dev
            .max((out[(0, 0)].re - init[(0, 0)].re).abs())
            .max((out[(1, 1)].re - init[(1, 1)].re).abs());
        let other = full_probe_simulation(&twin, &couplings, t, &init)?;
        diagonal_dev = diagonal_dev.max((out[(0, 1)] - other[(0, 1)]).norm());
    }
    Ok(vec![
        OracleCheck::new("probe coherence sum vs partial trace", coherence_dev, 1e-12),
        OracleCheck::new("probe population is time independent", population_dev, 1e-12),
        OracleCheck::new("probe depends only on the system diagonal", diagonal_dev, 1e-12),
    ])
}

/// Sizes and sample counts for [`run_oracle_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    /// Qubits in the generation twin, probe included.
    pub mu: usize,
    /// System qubits in the read-out and probe twins.
    pub n: usize,
    /// Random times or angles drawn per check.
    pub samples: usize,
    pub params: CentralSpinParams,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            mu: 8,
            n: 8,
            samples: 5,
            params: CentralSpinParams {
                omega_probe: 11.0,
                omega_sys: 1.0,
                g: 0.05,
            },
        }
    }
}

impl SuiteConfig {
    /// Rejects sizes beyond the brute-force limits before any work is done.
    pub fn validate(&self) -> Result<()> {
        guard("generation qubit count", self.mu, MAX_STATE_QUBITS)?;
        guard("read-out qubit count", self.n, MAX_DENSITY_QUBITS)?;
        if self.mu < 2 || self.n < 1 || self.samples == 0 {
            return Err(Error::InvalidParameter(format!(
                "need mu >= 2, n >= 1 and samples >= 1, got {self:?}"
            )));
        }
        CentralSpinParams::new(self.params.omega_probe, self.params.omega_sys, self.params.g)?;
        Ok(())
    }
}

/// The full brute-force suite used by `oracle-check`.
pub fn run_oracle_suite(config: &SuiteConfig, seed: u64) -> Result<OracleReport> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let times: Vec<f64> = (0..config.samples).map(|_| rng.random_range(0.0..PI)).collect();
    let mut checks = check_generation(config.params, config.mu - 1, &times)?;

    let css = crate::spin::coherent_state(crate::spin::HalfInteger::qubits(config.mu), FRAC_PI_2, 0.0)?;
    let direct = FullState::plus_x(config.mu)?;
    checks.push(OracleCheck::new(
        "coherent state embedding vs tensor product",
        1.0 - embed_symmetric(&css)?.inner(&direct).norm(),
        1e-12,
    ));

    let twisted = crate::spin::coherent_state(crate::spin::HalfInteger::qubits(config.n), FRAC_PI_2, 0.0)?
        .apply_diagonal_phase(rng.random_range(0.0..PI), |m| m * m);
    let thetas: Vec<f64> = (0..config.samples).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    checks.push(check_readout(&twisted, &thetas)?);

    let probe_times: Vec<f64> = (0..config.samples).map(|_| rng.random_range(0.0..3.0)).collect();
    checks.extend(check_probe(config.n, &probe_times, &mut rng)?);

    let all_passed = checks.iter().all(|c| c.passed);
    Ok(OracleReport {
        seed,
        checks,
        all_passed,
    })
}
