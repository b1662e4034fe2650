//! Dense complex linear algebra shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Largest deviation allowed before a "Hermitian" input is rejected.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// `max |U^dagger U - 1|`.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    let dim = u.nrows();
    let product = u.adjoint() * u;
    product
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let (r, c) = (k % dim, k / dim);
            let target = if r == c { 1.0 } else { 0.0 };
            (z - Complex64::new(target, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

/// Largest entry modulus.
pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    values.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigendecomposition `H = V diag(lambda) V^dagger` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    values: DVector<f64>,
    vectors: ComplexMatrix,
}

impl HermitianSpectrum {
    /// Symmetrizes inputs within [`HERMITIAN_TOLERANCE`] and rejects anything worse.
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::DimensionMismatch {
                expected: h.nrows(),
                found: h.ncols(),
            });
        }
        let deviation = hermiticity_deviation(h);
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian { deviation });
        }
        let symmetric = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = symmetric.symmetric_eigen();
        Ok(Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    /// `exp(-i H t) psi`.
    pub fn evolve(&self, psi: &ComplexVector, t: f64) -> Result<ComplexVector> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.len(),
            });
        }
        if t == 0.0 {
            return Ok(psi.clone());
        }
        let mut coeffs = self.vectors.ad_mul(psi);
        for (c, &lambda) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= Complex64::from_polar(1.0, -lambda * t);
        }
        Ok(&self.vectors * coeffs)
    }

    /// Dense propagator `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (mut col, &lambda) in scaled.column_iter_mut().zip(self.values.iter()) {
            col *= Complex64::from_polar(1.0, -lambda * t);
        }
        scaled * self.vectors.adjoint()
    }
}

/// `exp(-i H t) psi` through the spectral decomposition of `h`.
pub fn evolve(h: &ComplexMatrix, psi: &ComplexVector, t: f64) -> Result<ComplexVector> {
    if h.nrows() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: psi.len(),
        });
    }
    HermitianSpectrum::new(h)?.evolve(psi, t)
}

/// Real matrix exponential by scaling and squaring of a Taylor series.
pub fn real_expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = a.nrows();
    let norm = a
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);
    let mut result = DMatrix::identity(dim, dim);
    let mut term = DMatrix::identity(dim, dim);
    for k in 1..=40 {
        term = &term * &scaled / k as f64;
        result += &term;
        if term.amax() < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Kronecker product with the first factor varying slowest.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn diagonal(values: impl IntoIterator<Item = f64>) -> ComplexMatrix {
    let v: Vec<Complex64> = values.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    ComplexMatrix::from_diagonal(&DVector::from_vec(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> ComplexVector {
        ComplexVector::from_fn(dim, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .normalize()
    }

    /// Truncated Taylor series of `exp(-i H t) psi`, applied term by term.
    fn taylor_evolve(h: &ComplexMatrix, psi: &ComplexVector, t: f64, terms: usize) -> ComplexVector {
        let mut total = psi.clone();
        let mut term = psi.clone();
        for k in 1..=terms {
            term = (h * term) * Complex64::new(0.0, -t / k as f64);
            total += &term;
        }
        total
    }

    #[test]
    fn evolve_matches_taylor_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(&mut rng, 8);
        let psi = random_state(&mut rng, 8);
        let spectral = evolve(&h, &psi, 0.37).unwrap();
        let series = taylor_evolve(&h, &psi, 0.37, 40);
        assert!(max_abs(&(spectral - series)) < 1e-10);
    }

    #[test]
    fn evolve_at_zero_time_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = random_hermitian(&mut rng, 5);
        let psi = random_state(&mut rng, 5);
        assert_eq!(evolve(&h, &psi, 0.0).unwrap(), psi);
    }

    #[test]
    fn eigenstate_picks_up_phase() {
        let h = diagonal([2.5, 1.5, 0.5, -0.5, -1.5, -2.5]);
        let mut psi = ComplexVector::zeros(6);
        psi[1] = Complex64::new(1.0, 0.0);
        let out = evolve(&h, &psi, 0.8).unwrap();
        assert!((out[1] - Complex64::from_polar(1.0, -1.5 * 0.8)).norm() < 1e-14);
        assert!((out.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut h = diagonal([1.0, 2.0]);
        h[(0, 1)] = Complex64::new(1e-6, 0.0);
        let psi = ComplexVector::from_element(2, Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        assert!(matches!(evolve(&h, &psi, 1.0), Err(Error::NotHermitian { .. })));
        let ok = diagonal([1.0, 2.0, 3.0]);
        assert!(matches!(
            evolve(&ok, &psi, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let mut h = diagonal([1.0, 2.0]);
        h[(0, 1)] = Complex64::new(1e-12, 0.0);
        assert!(HermitianSpectrum::new(&h).is_ok());
    }

    #[test]
    fn propagator_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(&mut rng, 12);
        let spec = HermitianSpectrum::new(&h).unwrap();
        assert!(unitarity_deviation(&spec.propagator(3.1)) < 1e-12);
    }

    #[test]
    fn real_expm_of_rotation_generator() {
        let theta = 1.234_f64;
        let gen = DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]);
        let r = real_expm(&gen);
        assert!((r[(0, 0)] - theta.cos()).abs() < 1e-15);
        assert!((r[(1, 0)] - theta.sin()).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn evolution_preserves_norm_and_composes(seed in any::<u64>(), t1 in -5.0..5.0f64, t2 in -5.0..5.0f64) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let h = random_hermitian(&mut rng, 9);
                let psi = random_state(&mut rng, 9);
                let spec = HermitianSpectrum::new(&h).unwrap();
                let once = spec.evolve(&psi, t1 + t2).unwrap();
                let twice = spec.evolve(&spec.evolve(&psi, t1).unwrap(), t2).unwrap();
                prop_assert!((once.norm() - 1.0).abs() < 1e-12);
                prop_assert!(max_abs(&(once - twice)) < 1e-11);
            }
        }
    }
}
