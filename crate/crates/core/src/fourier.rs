//! Discrete Fourier kernels: the offset transform linking probe coherence to
//! number-difference probabilities, and periodic transforms over phase grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::spin::HalfInteger;

/// Synthesizes `a(tau) = sum_n p_n exp(-i 2 pi tau n / (N+1))`, `n = -N/2..=N/2`.
///
/// `weights[k]` belongs to `n = k - N/2`.
pub fn offset_dft_forward(weights: &[Complex64], tau: f64) -> Complex64 {
    let n_qubits = weights.len() - 1;
    let period = (n_qubits + 1) as f64;
    weights
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let n = k as f64 - n_qubits as f64 / 2.0;
            p * Complex64::from_polar(1.0, -2.0 * PI * tau * n / period)
        })
        .sum()
}

/// Inverts [`offset_dft_forward`] from samples at `tau = 0, 1, ..., N`.
///
/// Returns `(n, p_n)` in ascending `n`. The offset phase `exp(i pi tau N/(N+1))` is
/// removed first, leaving a plain `(N+1)`-point inverse transform over `k = n + N/2`.
pub fn offset_dft_inverse(
    samples: &[(i64, Complex64)],
    n_qubits: usize,
) -> Result<Vec<(HalfInteger, Complex64)>> {
    let len = n_qubits + 1;
    if samples.len() != len {
        return Err(Error::InvalidSamples(format!(
            "expected {len} samples, got {}",
            samples.len()
        )));
    }
    let mut buffer = vec![None; len];
    for &(tau, value) in samples {
        let slot = usize::try_from(tau)
            .ok()
            .filter(|&t| t < len)
            .ok_or_else(|| Error::InvalidSamples(format!("tau {tau} outside 0..={n_qubits}")))?;
        if buffer[slot].replace(value).is_some() {
            return Err(Error::InvalidSamples(format!("duplicate tau {tau}")));
        }
    }
    let period = len as f64;
    let mut data: Vec<Complex64> = buffer
        .into_iter()
        .enumerate()
        .map(|(tau, v)| {
            // every slot is filled: count matches and duplicates were rejected
            let v = v.expect("missing tau");
            v * Complex64::from_polar(1.0, -PI * tau as f64 * n_qubits as f64 / period)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(len).process(&mut data);
    Ok(data
        .into_iter()
        .enumerate()
        .map(|(k, v)| (HalfInteger::from_twice(2 * k as i64 - n_qubits as i64), v / period))
        .collect())
}

/// Normalized Fourier coefficients `c_k = (1/L) sum_j x_j exp(-2 pi i j k / L)`
/// of samples on a uniform periodic grid, in FFT order.
pub fn periodic_coefficients(values: &[Complex64]) -> Vec<Complex64> {
    let len = values.len();
    let mut data = values.to_vec();
    FftPlanner::new().plan_fft_forward(len).process(&mut data);
    data.iter_mut().for_each(|v| *v /= len as f64);
    data
}

/// Signed frequency of FFT bin `k` for a grid of length `len`.
pub fn signed_frequency(k: usize, len: usize) -> i64 {
    if k <= len / 2 {
        k as i64
    } else {
        k as i64 - len as i64
    }
}

/// How the phase derivative on a periodic grid is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Differentiation {
    /// Fourier differentiation; exact for trigonometric polynomials resolved by the grid.
    #[default]
    Spectral,
    /// Second-order periodic central differences.
    CentralDifference,
}

/// Derivative of samples on `theta_j = 2 pi j / L` over one full period.
pub fn periodic_derivative(values: &[Complex64], scheme: Differentiation) -> Vec<Complex64> {
    let len = values.len();
    match scheme {
        Differentiation::CentralDifference => {
            let step = 2.0 * PI / len as f64;
            (0..len)
                .map(|j| (values[(j + 1) % len] - values[(j + len - 1) % len]) / (2.0 * step))
                .collect()
        }
        Differentiation::Spectral => {
            let mut data = values.to_vec();
            let mut planner = FftPlanner::new();
            planner.plan_fft_forward(len).process(&mut data);
            for (k, v) in data.iter_mut().enumerate() {
                let freq = signed_frequency(k, len);
                if len % 2 == 0 && k == len / 2 {
                    *v = Complex64::new(0.0, 0.0);
                } else {
                    *v *= Complex64::new(0.0, freq as f64);
                }
            }
            planner.plan_fft_inverse(len).process(&mut data);
            data.iter_mut().for_each(|v| *v /= len as f64);
            data
        }
    }
}

/// Real-valued convenience wrapper around [`periodic_derivative`].
pub fn periodic_derivative_real(values: &[f64], scheme: Differentiation) -> Vec<f64> {
    let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    periodic_derivative(&complex, scheme)
        .into_iter()
        .map(|z| z.re)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Literal synthesis used as the oracle for the inverse.
    fn synthesize(p: &[f64], n_qubits: usize) -> Vec<(i64, Complex64)> {
        (0..=n_qubits)
            .map(|tau| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &w) in p.iter().enumerate() {
                    let n = k as f64 - n_qubits as f64 / 2.0;
                    let angle = -2.0 * PI * tau as f64 * n / (n_qubits as f64 + 1.0);
                    acc += Complex64::new(w * angle.cos(), w * angle.sin());
                }
                (tau as i64, acc)
            })
            .collect()
    }

    fn random_distribution(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    }

    #[test]
    fn recovers_three_point_distribution() {
        let p = [0.2, 0.5, 0.3];
        let out = offset_dft_inverse(&synthesize(&p, 2), 2).unwrap();
        let labels: Vec<i64> = out.iter().map(|(n, _)| n.twice()).collect();
        assert_eq!(labels, vec![-2, 0, 2]);
        for ((_, w), expected) in out.iter().zip(p) {
            assert!((w - Complex64::new(expected, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn constant_samples_are_dc() {
        let samples: Vec<_> = (0..=6).map(|t| (t, Complex64::new(1.0, 0.0))).collect();
        let out = offset_dft_inverse(&samples, 6).unwrap();
        for (n, w) in out {
            let expected = if n.twice() == 0 { 1.0 } else { 0.0 };
            assert!((w - Complex64::new(expected, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn half_integer_frequencies_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_distribution(&mut rng, 8);
        let out = offset_dft_inverse(&synthesize(&p, 7), 7).unwrap();
        assert_eq!(out[0].0, HalfInteger::from_twice(-7));
        for ((_, w), expected) in out.iter().zip(&p) {
            assert!((w - Complex64::new(*expected, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_matches_literal_synthesis() {
        let p = [0.1, 0.2, 0.3, 0.15, 0.25];
        let weights: Vec<Complex64> = p.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for (tau, expected) in synthesize(&p, 4) {
            assert!((offset_dft_forward(&weights, tau as f64) - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_malformed_sample_sets() {
        let good: Vec<_> = (0..=3).map(|t| (t, Complex64::new(1.0, 0.0))).collect();
        assert!(offset_dft_inverse(&good[..3], 3).is_err());
        let mut dup = good.clone();
        dup[3].0 = 1;
        assert!(offset_dft_inverse(&dup, 3).is_err());
        let mut out_of_range = good;
        out_of_range[0].0 = 9;
        assert!(offset_dft_inverse(&out_of_range, 3).is_err());
    }

    #[test]
    fn spectral_derivative_is_exact_for_band_limited_signals() {
        let len = 36;
        let values: Vec<f64> = (0..len)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / len as f64;
                0.3 + (8.0 * t + 0.4).cos() - 0.2 * (3.0 * t).sin()
            })
            .collect();
        let d = periodic_derivative_real(&values, Differentiation::Spectral);
        for (j, v) in d.iter().enumerate() {
            let t = 2.0 * PI * j as f64 / len as f64;
            let exact = -8.0 * (8.0 * t + 0.4).sin() - 0.6 * (3.0 * t).cos();
            assert!((v - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn central_difference_is_second_order() {
        let err = |len: usize| {
            let values: Vec<f64> = (0..len)
                .map(|j| (2.0 * PI * j as f64 / len as f64).sin())
                .collect();
            let d = periodic_derivative_real(&values, Differentiation::CentralDifference);
            (d[0] - 1.0).abs()
        };
        let ratio = err(64) / err(128);
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn inverse_of_synthesis_is_identity(seed in any::<u64>(), n_qubits in 1usize..=128) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let p = random_distribution(&mut rng, n_qubits + 1);
                let out = offset_dft_inverse(&synthesize(&p, n_qubits), n_qubits).unwrap();
                for ((_, w), expected) in out.iter().zip(&p) {
                    prop_assert!((w - Complex64::new(*expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }
}
