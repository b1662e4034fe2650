//! Collective-spin algebra on the Dicke manifold.
//!
//! Basis vectors are ordered by descending magnetic label, `m = S, S-1, ..., -S`,
//! so index 0 is the all-up state and the last index the all-down state.
//! Labels are carried as doubled integers so odd qubit numbers stay exact.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};

/// A spin magnitude or magnetic label stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInteger {
    twice: i64,
}

impl HalfInteger {
    pub const fn from_twice(twice: i64) -> Self {
        Self { twice }
    }

    /// Spin `N/2` of `n` qubits.
    pub const fn qubits(n: usize) -> Self {
        Self { twice: n as i64 }
    }

    pub fn from_f64(value: f64) -> Result<Self> {
        let doubled = 2.0 * value;
        let rounded = doubled.round();
        if !value.is_finite() || (doubled - rounded).abs() > 1e-12 {
            return Err(Error::InvalidSpin(format!("{value} is not a half-integer")));
        }
        Ok(Self {
            twice: rounded as i64,
        })
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// The `(2S+1)`-dimensional Dicke basis of a spin-`S` manifold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectiveBasis {
    spin: HalfInteger,
}

impl CollectiveBasis {
    pub fn new(spin: HalfInteger) -> Result<Self> {
        if spin.twice() < 0 {
            return Err(Error::InvalidSpin(format!("negative spin {spin}")));
        }
        Ok(Self { spin })
    }

    /// Symmetric manifold of `n` qubits.
    pub fn qubits(n: usize) -> Self {
        Self {
            spin: HalfInteger::qubits(n),
        }
    }

    pub fn spin(&self) -> HalfInteger {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.twice() as usize + 1
    }

    pub fn label(&self, index: usize) -> HalfInteger {
        HalfInteger::from_twice(self.spin.twice() - 2 * index as i64)
    }

    pub fn index_of(&self, m: HalfInteger) -> Option<usize> {
        let offset = self.spin.twice() - m.twice();
        if offset < 0 || offset > 2 * self.spin.twice() || offset % 2 != 0 {
            return None;
        }
        Some((offset / 2) as usize)
    }

    pub fn labels(&self) -> impl Iterator<Item = HalfInteger> + '_ {
        (0..self.dim()).map(move |k| self.label(k))
    }

    /// Magnetic labels as floats, in basis order.
    pub fn m_values(&self) -> Vec<f64> {
        self.labels().map(HalfInteger::value).collect()
    }
}

/// Cartesian and ladder operators of one collective spin.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub basis: CollectiveBasis,
    pub jx: ComplexMatrix,
    pub jy: ComplexMatrix,
    pub jz: ComplexMatrix,
    pub jplus: ComplexMatrix,
    pub jminus: ComplexMatrix,
}

impl SpinOperators {
    pub fn new(spin: HalfInteger) -> Result<Self> {
        if spin.twice() < 1 {
            return Err(Error::InvalidSpin(format!(
                "operators need 2S >= 1, got S = {spin}"
            )));
        }
        let basis = CollectiveBasis::new(spin)?;
        let dim = basis.dim();
        let s = spin.value();
        let m = basis.m_values();

        let jz = ComplexMatrix::from_diagonal(&DVector::from_iterator(
            dim,
            m.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        let mut jplus = ComplexMatrix::zeros(dim, dim);
        for k in 1..dim {
            let from = m[k];
            jplus[(k - 1, k)] = Complex64::new((s * (s + 1.0) - from * (from + 1.0)).sqrt(), 0.0);
        }
        let jminus = jplus.adjoint();
        let half = Complex64::new(0.5, 0.0);
        let jx = (&jplus + &jminus) * half;
        let jy = (&jplus - &jminus) * Complex64::new(0.0, -0.5);

        Ok(Self {
            basis,
            jx,
            jy,
            jz,
            jplus,
            jminus,
        })
    }
}

/// Generator `-i J_y`, which is real and antisymmetric in the Dicke basis.
fn y_generator(basis: &CollectiveBasis) -> DMatrix<f64> {
    let dim = basis.dim();
    let s = basis.spin().value();
    let m = basis.m_values();
    let mut gen = DMatrix::zeros(dim, dim);
    for k in 1..dim {
        let c = (s * (s + 1.0) - m[k] * (m[k] + 1.0)).sqrt();
        // -i J_y = (J_- - J_+) / 2
        gen[(k - 1, k)] = -0.5 * c;
        gen[(k, k - 1)] = 0.5 * c;
    }
    gen
}

/// Real orthogonal matrix of `exp(-i angle J_y)`.
pub fn rotation_y(spin: HalfInteger, angle: f64) -> Result<DMatrix<f64>> {
    let basis = CollectiveBasis::new(spin)?;
    Ok(linalg::real_expm(&(y_generator(&basis) * angle)))
}

/// Matrix of `exp(-i (pi/2) J_x)`.
#[derive(Clone, Debug)]
pub struct MixingMatrix {
    basis: CollectiveBasis,
    d: ComplexMatrix,
}

impl MixingMatrix {
    pub fn basis(&self) -> &CollectiveBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.d
    }

    /// Element `<n| exp(-i pi/2 J_x) |m>`.
    pub fn element(&self, n: HalfInteger, m: HalfInteger) -> Option<Complex64> {
        let row = self.basis.index_of(n)?;
        let col = self.basis.index_of(m)?;
        Some(self.d[(row, col)])
    }

    pub fn unitarity_deviation(&self) -> f64 {
        linalg::unitarity_deviation(&self.d)
    }
}

/// Builds the pi/2 mixing matrix as `exp(i pi/2 J_z) exp(-i pi/2 J_y) exp(-i pi/2 J_z)`.
///
/// The y rotation is a real exponential evaluated by scaling and squaring, so this
/// path is independent of the eigendecomposition used by [`linalg::evolve`].
pub fn mixing_matrix(spin: HalfInteger) -> Result<MixingMatrix> {
    let basis = CollectiveBasis::new(spin)?;
    let ry = rotation_y(spin, FRAC_PI_2)?;
    let m = basis.m_values();
    let dim = basis.dim();
    let d = ComplexMatrix::from_fn(dim, dim, |r, c| {
        Complex64::from_polar(1.0, FRAC_PI_2 * (m[r] - m[c])) * ry[(r, c)]
    });
    Ok(MixingMatrix { basis, d })
}

/// Pure state on one collective manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    basis: CollectiveBasis,
    amps: ComplexVector,
}

impl StateVector {
    pub fn new(basis: CollectiveBasis, amps: ComplexVector) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { basis, amps })
    }

    /// Normalizes `amps` before wrapping them.
    pub fn normalized(basis: CollectiveBasis, amps: ComplexVector) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(basis, amps.unscale(norm))
    }

    pub fn dicke(basis: CollectiveBasis, m: HalfInteger) -> Result<Self> {
        let index = basis
            .index_of(m)
            .ok_or_else(|| Error::InvalidSpin(format!("label {m} outside spin {}", basis.spin())))?;
        let mut amps = ComplexVector::zeros(basis.dim());
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amps })
    }

    /// Equal superposition of the two extreme Dicke states.
    pub fn ghz(basis: CollectiveBasis) -> Self {
        let dim = basis.dim();
        let mut amps = ComplexVector::zeros(dim);
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0] += w;
        amps[dim - 1] += w;
        let amps = if dim == 1 { amps.normalize() } else { amps };
        Self { basis, amps }
    }

    pub fn basis(&self) -> &CollectiveBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> ComplexVector {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn expectation(&self, op: &ComplexMatrix) -> Complex64 {
        self.amps.dotc(&(op * &self.amps))
    }

    /// `exp(-i H t)` applied through the Hermitian spectrum of `h`.
    pub fn evolve(&self, h: &ComplexMatrix, t: f64) -> Result<Self> {
        let amps = linalg::evolve(h, &self.amps, t)?;
        Ok(Self {
            basis: self.basis,
            amps,
        })
    }

    /// Applies a diagonal phase `exp(-i t f(m))` for each Dicke label.
    pub fn apply_diagonal_phase(&self, t: f64, energy: impl Fn(f64) -> f64) -> Self {
        let m = self.basis.m_values();
        let amps = ComplexVector::from_iterator(
            self.amps.len(),
            self.amps
                .iter()
                .zip(&m)
                .map(|(a, &mv)| a * Complex64::from_polar(1.0, -t * energy(mv))),
        );
        Self {
            basis: self.basis,
            amps,
        }
    }
}

/// Natural log of `n choose k`.
pub(crate) fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Spin-`S` coherent state with mean spin along `(polar, azimuth)`.
///
/// Each constituent qubit is `cos(polar/2)|up> + exp(i azimuth) sin(polar/2)|down>`.
pub fn coherent_state(spin: HalfInteger, polar: f64, azimuth: f64) -> Result<StateVector> {
    let basis = CollectiveBasis::new(spin)?;
    let n = spin.twice() as u64;
    let (sin_half, cos_half) = (polar / 2.0).sin_cos();
    let amps = ComplexVector::from_iterator(
        basis.dim(),
        (0..=n).map(|downs| {
            let magnitude = (0.5 * ln_binomial(n, downs)).exp()
                * cos_half.powi((n - downs) as i32)
                * sin_half.powi(downs as i32);
            Complex64::from_polar(1.0, downs as f64 * azimuth) * magnitude
        }),
    );
    StateVector::normalized(basis, amps)
}
