//! Generation of many-body Bell correlations by a probe qubit.
//!
//! Two routes are compared. The exact route evolves the collective spin of `N`
//! qubits together with the probe under the flip-flop central-spin Hamiltonian.
//! The effective route applies one-axis twisting `chi S_z^2` to the combined
//! spin of all `mu = N + 1` qubits. Both start from every qubit along `+x`.
//!
//! Joint states put the probe factor first (slowest index): block 0 holds the
//! probe up, block 1 the probe down, and each block is a Dicke vector of the
//! system in descending-`m` order.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, HermitianSpectrum};
use crate::spin::{
    coherent_state, rotation_y, CollectiveBasis, HalfInteger, SpinOperators, StateVector,
};

/// Above this `g/|Delta|` the dispersive approximation is considered unreliable.
pub const DISPERSIVE_WARNING_RATIO: f64 = 0.2;

/// Parameters of the central-spin Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralSpinParams {
    /// Probe splitting `Omega`.
    pub omega_probe: f64,
    /// System splitting `omega`.
    pub omega_sys: f64,
    /// Flip-flop coupling `g`.
    pub g: f64,
}

impl CentralSpinParams {
    pub fn new(omega_probe: f64, omega_sys: f64, g: f64) -> Result<Self> {
        if ![omega_probe, omega_sys, g].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "central-spin parameters must be finite".into(),
            ));
        }
        let params = Self {
            omega_probe,
            omega_sys,
            g,
        };
        if params.detuning() == 0.0 {
            return Err(Error::InvalidParameter(
                "resonant probe (Omega = omega) has no dispersive limit".into(),
            ));
        }
        if params.dispersive_ratio() > DISPERSIVE_WARNING_RATIO {
            log::warn!(
                "g/|Delta| = {:.3} is outside the dispersive regime",
                params.dispersive_ratio()
            );
        }
        Ok(params)
    }

    /// `Delta = Omega - omega`.
    pub fn detuning(&self) -> f64 {
        self.omega_probe - self.omega_sys
    }

    /// Twisting strength `chi = g^2 / Delta`.
    pub fn chi(&self) -> f64 {
        self.g * self.g / self.detuning()
    }

    pub fn dispersive_ratio(&self) -> f64 {
        self.g.abs() / self.detuning().abs()
    }

    /// Converts a dimensionless `|chi| t` into physical time.
    pub fn physical_time(&self, chi_t: f64) -> f64 {
        chi_t / self.chi().abs()
    }
}

/// Pure state of the system's Dicke manifold tensored with the probe.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    n: usize,
    amps: ComplexVector,
}

impl JointState {
    pub fn new(n: usize, amps: ComplexVector) -> Result<Self> {
        let dim = 2 * (n + 1);
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { n, amps })
    }

    /// Product of a system Dicke vector and a probe qubit `(up, down)`.
    pub fn product(system: &StateVector, probe: [Complex64; 2]) -> Result<Self> {
        let n = system.basis().spin().twice() as usize;
        let sys = system.amplitudes();
        let amps = ComplexVector::from_iterator(
            2 * (n + 1),
            probe.iter().flat_map(|&p| sys.iter().map(move |&s| p * s)),
        );
        Self::new(n, amps)
    }

    pub fn system_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Index of (probe block, system Dicke index).
    pub fn index(n: usize, probe_down: bool, k: usize) -> usize {
        usize::from(probe_down) * (n + 1) + k
    }

    pub fn expectation_total_sz(&self) -> f64 {
        total_sz_diagonal(self.n)
            .iter()
            .zip(self.amps.iter())
            .map(|(s, a)| s * a.norm_sqr())
            .sum()
    }

    pub fn overlap(&self, other: &JointState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }
}

/// Diagonal of `S_z = J_z + sigma_z/2` in the joint basis.
pub fn total_sz_diagonal(n: usize) -> Vec<f64> {
    let m = CollectiveBasis::qubits(n).m_values();
    [0.5, -0.5]
        .iter()
        .flat_map(|&probe| m.iter().map(move |&mv| mv + probe))
        .collect()
}

fn probe_matrix(entries: [f64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &entries.map(|v| Complex64::new(v, 0.0)))
}

/// `(Omega/2) sigma_z + omega J_z + g (J_+ sigma_- + J_- sigma_+)` on Dicke(N) x probe.
pub fn central_spin_hamiltonian(params: &CentralSpinParams, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one system qubit".into()));
    }
    let ops = SpinOperators::new(HalfInteger::qubits(n))?;
    let id_sys = ComplexMatrix::identity(n + 1, n + 1);
    let id_probe = ComplexMatrix::identity(2, 2);
    let sigma_z = probe_matrix([1.0, 0.0, 0.0, -1.0]);
    // basis (up, down): sigma_- = |down><up|
    let sigma_minus = probe_matrix([0.0, 0.0, 1.0, 0.0]);
    let sigma_plus = probe_matrix([0.0, 1.0, 0.0, 0.0]);
    let c = |v: f64| Complex64::new(v, 0.0);

    let h = linalg::kron(&sigma_z, &id_sys) * c(params.omega_probe / 2.0)
        + linalg::kron(&id_probe, &ops.jz) * c(params.omega_sys)
        + (linalg::kron(&sigma_minus, &ops.jplus) + linalg::kron(&sigma_plus, &ops.jminus))
            * c(params.g);
    Ok(h)
}

/// Second-order dispersive Hamiltonian of the central-spin model.
///
/// Eliminating the flip-flop term to order `g^2/Delta` gives
/// `H0 - chi J_z + chi sigma_z (J^2 - J_z^2)`, diagonal in the joint basis.
/// Each system level `m` is shifted by `+chi (J(J+1) - m(m+1))` with the probe up
/// and by `-chi (J(J+1) - m(m-1))` with the probe down.
pub fn dispersive_hamiltonian(params: &CentralSpinParams, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one system qubit".into()));
    }
    let chi = params.chi();
    let j = n as f64 / 2.0;
    let casimir = j * (j + 1.0);
    let m = CollectiveBasis::qubits(n).m_values();
    let diag = [1.0, -1.0].iter().flat_map(|&sz| {
        m.iter().map(move |&mv| {
            params.omega_probe / 2.0 * sz + params.omega_sys * mv - chi * mv
                + chi * sz * (casimir - mv * mv)
        })
    });
    Ok(linalg::diagonal(diag.collect::<Vec<_>>()))
}

/// `chi S_z^2` on the spin-`mu/2` manifold.
pub fn oat_hamiltonian(mu: usize, chi: f64) -> Result<ComplexMatrix> {
    if mu < 2 {
        return Err(Error::InvalidParameter(format!("mu must be >= 2, got {mu}")));
    }
    let m = CollectiveBasis::qubits(mu).m_values();
    Ok(linalg::diagonal(m.iter().map(|v| chi * v * v)))
}

/// Every qubit along `+x`, as a joint state and as a spin-`(N+1)/2` coherent state.
pub fn initial_plus_x(n: usize) -> Result<(JointState, StateVector)> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one system qubit".into()));
    }
    let system = coherent_state(HalfInteger::qubits(n), FRAC_PI_2, 0.0)?;
    let plus = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let joint = JointState::product(&system, [plus, plus])?;
    let collective = coherent_state(HalfInteger::qubits(n + 1), FRAC_PI_2, 0.0)?;
    Ok((joint, collective))
}

/// Maps a spin-`(N+1)/2` state into the joint basis.
///
/// The symmetric state with `K` down spins among `N + 1` qubits splits as
/// `sqrt((mu-K)/mu) |up>|K downs> + sqrt(K/mu) |down>|K-1 downs>`.
pub fn oat_to_joint(state: &StateVector) -> Result<JointState> {
    let mu = state.basis().spin().twice() as usize;
    if mu < 2 {
        return Err(Error::InvalidParameter("need mu >= 2".into()));
    }
    let n = mu - 1;
    let mut amps = ComplexVector::zeros(2 * (n + 1));
    for (downs, &a) in state.amplitudes().iter().enumerate() {
        let mu_f = mu as f64;
        if downs <= n {
            amps[JointState::index(n, false, downs)] += a * ((mu - downs) as f64 / mu_f).sqrt();
        }
        if downs >= 1 {
            amps[JointState::index(n, true, downs - 1)] += a * (downs as f64 / mu_f).sqrt();
        }
    }
    JointState::new(n, amps)
}

/// Collective states that carry a Bell correlator.
pub trait CollectiveState {
    /// Total number of qubits `mu`.
    fn qubit_count(&self) -> usize;
    fn amplitudes(&self) -> &ComplexVector;
    /// Correlator geometry for this state space.
    fn correlator(&self) -> Result<BellCorrelator>;
}

impl CollectiveState for StateVector {
    fn qubit_count(&self) -> usize {
        self.basis().spin().twice() as usize
    }

    fn amplitudes(&self) -> &ComplexVector {
        StateVector::amplitudes(self)
    }

    fn correlator(&self) -> Result<BellCorrelator> {
        BellCorrelator::collective(self.qubit_count())
    }
}

impl CollectiveState for JointState {
    fn qubit_count(&self) -> usize {
        self.n + 1
    }

    fn amplitudes(&self) -> &ComplexVector {
        &self.amps
    }

    fn correlator(&self) -> Result<BellCorrelator> {
        BellCorrelator::joint(self.n)
    }
}

/// `E(phi) = |<top| U rho U^dagger |bottom>|^2` with
/// `U = exp(-i pi/2 S_y) exp(-i phi S_z)`.
///
/// `U` maps an equatorial axis onto `z`, so `E` is the squared product of raising
/// operators quantized along that axis. For a pure state it factorizes into
/// `|<top|U psi>|^2 |<bottom|U psi>|^2`, which is all this type evaluates.
#[derive(Clone, Debug)]
pub struct BellCorrelator {
    mu: usize,
    sz: Vec<f64>,
    top: Vec<f64>,
    bottom: Vec<f64>,
}

impl BellCorrelator {
    /// Symmetric manifold of `mu` qubits.
    pub fn collective(mu: usize) -> Result<Self> {
        let spin = HalfInteger::qubits(mu);
        let ry = rotation_y(spin, FRAC_PI_2)?;
        let dim = mu + 1;
        Ok(Self {
            mu,
            sz: CollectiveBasis::qubits(mu).m_values(),
            top: ry.row(0).iter().copied().collect(),
            bottom: ry.row(dim - 1).iter().copied().collect(),
        })
    }

    /// Dicke(N) tensored with the probe.
    pub fn joint(n: usize) -> Result<Self> {
        let sys = rotation_y(HalfInteger::qubits(n), FRAC_PI_2)?;
        let probe = rotation_y(HalfInteger::from_twice(1), FRAC_PI_2)?;
        let mut top = Vec::with_capacity(2 * (n + 1));
        let mut bottom = Vec::with_capacity(2 * (n + 1));
        for b in 0..2 {
            for k in 0..=n {
                top.push(probe[(0, b)] * sys[(0, k)]);
                bottom.push(probe[(1, b)] * sys[(n, k)]);
            }
        }
        Ok(Self {
            mu: n + 1,
            sz: total_sz_diagonal(n),
            top,
            bottom,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.mu
    }

    fn check(&self, amps: &ComplexVector) -> Result<()> {
        if amps.len() != self.sz.len() {
            return Err(Error::DimensionMismatch {
                expected: self.sz.len(),
                found: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    fn eval_unchecked(&self, amps: &ComplexVector, azimuth: f64) -> f64 {
        let mut up = Complex64::new(0.0, 0.0);
        let mut down = Complex64::new(0.0, 0.0);
        for (k, a) in amps.iter().enumerate() {
            let rotated = a * Complex64::from_polar(1.0, -azimuth * self.sz[k]);
            up += rotated * self.top[k];
            down += rotated * self.bottom[k];
        }
        up.norm_sqr() * down.norm_sqr()
    }

    pub fn evaluate(&self, amps: &ComplexVector, azimuth: f64) -> Result<f64> {
        self.check(amps)?;
        Ok(self.eval_unchecked(amps, azimuth))
    }

    /// Maximum over a uniform azimuth grid, refined by golden-section search around
    /// the best grid point. Returns `(E_max, azimuth_star)` with the azimuth in `[0, 2 pi)`.
    pub fn maximize(&self, amps: &ComplexVector, grid_size: usize) -> Result<(f64, f64)> {
        if grid_size < 8 {
            return Err(Error::InvalidParameter(format!(
                "azimuth grid needs at least 8 points, got {grid_size}"
            )));
        }
        self.check(amps)?;
        let step = 2.0 * PI / grid_size as f64;
        let (best_idx, best_val) = (0..grid_size)
            .map(|j| (j, self.eval_unchecked(amps, j as f64 * step)))
            .fold((0, f64::NEG_INFINITY), |acc, cur| {
                if cur.1 > acc.1 {
                    cur
                } else {
                    acc
                }
            });
        let center = best_idx as f64 * step;
        let (x, fx) = golden_section_max(
            |phi| self.eval_unchecked(amps, phi),
            center - step,
            center + step,
            1e-11,
        );
        let (value, azimuth) = if fx >= best_val { (fx, x) } else { (best_val, center) };
        Ok((value, azimuth.rem_euclid(2.0 * PI)))
    }
}

/// Golden-section search for a maximum of a unimodal function on `[a, b]`.
pub(crate) fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Bell correlator at a fixed azimuth.
pub fn bell_correlator<S: CollectiveState + ?Sized>(state: &S, azimuth: f64) -> Result<f64> {
    state.correlator()?.evaluate(state.amplitudes(), azimuth)
}

/// Bell correlator maximized over the measurement azimuth.
pub fn bell_correlator_max<S: CollectiveState + ?Sized>(
    state: &S,
    azimuth_grid_size: usize,
) -> Result<(f64, f64)> {
    state
        .correlator()?
        .maximize(state.amplitudes(), azimuth_grid_size)
}

/// `Q = log2(E 2^mu)`; positive values certify Bell correlations.
///
/// `E = 0` maps to negative infinity.
pub fn q_value(e: f64, mu: usize) -> f64 {
    if e <= 0.0 {
        f64::NEG_INFINITY
    } else {
        e.log2() + mu as f64
    }
}

/// Both evolution routes for one parameter set, prepared once.
#[derive(Clone, Debug)]
pub struct GenerationModel {
    params: CentralSpinParams,
    n: usize,
    spectrum: HermitianSpectrum,
    joint0: JointState,
    collective0: StateVector,
    joint_corr: BellCorrelator,
    collective_corr: BellCorrelator,
}

impl GenerationModel {
    pub fn new(params: CentralSpinParams, n: usize) -> Result<Self> {
        let h = central_spin_hamiltonian(&params, n)?;
        let (joint0, collective0) = initial_plus_x(n)?;
        Ok(Self {
            params,
            n,
            spectrum: HermitianSpectrum::new(&h)?,
            joint0,
            collective0,
            joint_corr: BellCorrelator::joint(n)?,
            collective_corr: BellCorrelator::collective(n + 1)?,
        })
    }

    pub fn params(&self) -> &CentralSpinParams {
        &self.params
    }

    pub fn mu(&self) -> usize {
        self.n + 1
    }

    /// Exact central-spin state at dimensionless time `|chi| t`.
    pub fn exact_state(&self, chi_t: f64) -> Result<JointState> {
        let t = self.params.physical_time(chi_t);
        let amps = self.spectrum.evolve(self.joint0.amplitudes(), t)?;
        JointState::new(self.n, amps)
    }

    /// One-axis-twisted state at dimensionless time `|chi| t`.
    pub fn oat_state(&self, chi_t: f64) -> StateVector {
        let signed = chi_t * self.params.chi().signum();
        self.collective0.apply_diagonal_phase(signed, |m| m * m)
    }

    pub fn point(&self, chi_t: f64, azimuth_grid_size: usize) -> Result<SweepPoint> {
        let exact = self.exact_state(chi_t)?;
        let oat = self.oat_state(chi_t);
        let (e_exact, az_exact) = self
            .joint_corr
            .maximize(exact.amplitudes(), azimuth_grid_size)?;
        let (e_oat, az_oat) = self
            .collective_corr
            .maximize(oat.amplitudes(), azimuth_grid_size)?;
        Ok(SweepPoint {
            chi_t,
            q_exact: q_value(e_exact, self.mu()),
            q_oat: q_value(e_oat, self.mu()),
            azimuth_exact: az_exact,
            azimuth_oat: az_oat,
        })
    }

    /// `1 - F` between the exact and twisted states at `|chi| t`, after removing the
    /// best common rotation about the total `S_z`.
    pub fn fidelity_deficit(&self, chi_t: f64) -> Result<f64> {
        let exact = self.exact_state(chi_t)?;
        let oat = oat_to_joint(&self.oat_state(chi_t))?;
        Ok(1.0 - frame_aligned_fidelity(&exact, &oat)?.0)
    }
}

/// `max_alpha |<b| exp(i alpha S_z) |a>|^2` and the maximizing angle.
pub fn frame_aligned_fidelity(a: &JointState, b: &JointState) -> Result<(f64, f64)> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    let sz = total_sz_diagonal(a.n);
    let products: Vec<Complex64> = b
        .amps
        .iter()
        .zip(a.amps.iter())
        .map(|(x, y)| x.conj() * y)
        .collect();
    let fidelity = |alpha: f64| -> f64 {
        products
            .iter()
            .zip(&sz)
            .map(|(p, s)| p * Complex64::from_polar(1.0, alpha * s))
            .sum::<Complex64>()
            .norm_sqr()
    };
    let grid = 64 * (a.n + 1);
    let step = 2.0 * PI / grid as f64;
    let (best_idx, best_val) = (0..grid)
        .map(|j| (j, fidelity(j as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let center = best_idx as f64 * step;
    let (x, fx) = golden_section_max(fidelity, center - step, center + step, 1e-12);
    Ok(if fx >= best_val {
        (fx, x.rem_euclid(2.0 * PI))
    } else {
        (best_val, center)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub chi_t: f64,
    pub q_exact: f64,
    pub q_oat: f64,
    pub azimuth_exact: f64,
    pub azimuth_oat: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerationSweepResult {
    pub params: CentralSpinParams,
    pub mu: usize,
    pub points: Vec<SweepPoint>,
}

impl GenerationSweepResult {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.chi_t).collect()
    }

    pub fn q_exact(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.q_exact).collect()
    }

    pub fn q_oat(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.q_oat).collect()
    }

    /// `max |q_exact - q_oat|` over points with `chi_t` in `[lo, hi]`.
    pub fn max_deviation(&self, lo: f64, hi: f64) -> f64 {
        self.points
            .iter()
            .filter(|p| p.chi_t >= lo && p.chi_t <= hi)
            .map(|p| (p.q_exact - p.q_oat).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates both routes on a grid of `|chi| t` values. Points run in parallel and are
/// assembled in input order.
pub fn sweep(
    params: CentralSpinParams,
    n: usize,
    times: &[f64],
    azimuth_grid_size: usize,
) -> Result<GenerationSweepResult> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    if let Some(bad) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::InvalidParameter(format!("invalid time {bad}")));
    }
    let model = GenerationModel::new(params, n)?;
    let points = times
        .par_iter()
        .map(|&t| model.point(t, azimuth_grid_size))
        .collect::<Result<Vec<_>>>()?;
    Ok(GenerationSweepResult {
        params,
        mu: model.mu(),
        points,
    })
}
