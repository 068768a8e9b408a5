//! Spectral helpers on the uniform periodic grid xi_i = 2*pi*i/N.
//!
//! Conventions: Fourier coefficients are stored in FFT order with
//! `coeff[k] = (1/N) sum_j f(xi_j) exp(-i k* xi_j)` where `k*` is the signed
//! wavenumber of slot `k` (0..N/2 then -N/2..-1). The Nyquist slot is zeroed
//! by odd-order derivative filters.

use nalgebra::Vector3;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Grid point xi_i = 2*pi*i/N.
pub fn grid_point(i: usize, n: usize) -> f64 {
    TAU * i as f64 / n as f64
}

/// Signed wavenumber of FFT slot `k` on an N-point grid.
pub fn wavenumber(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Forward DFT returning normalized coefficients.
pub fn coefficients(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Inverse of [`coefficients`].
pub fn synthesis(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    FftPlanner::new()
        .plan_fft_inverse(buf.len())
        .process(&mut buf);
    buf
}

/// Evaluates `sum_n modes[n] exp(i n xi)` on the N-point grid.
pub fn synthesize_modes(modes: &BTreeMap<i32, Complex64>, n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (&m, &c) in modes {
        for (i, v) in out.iter_mut().enumerate() {
            let phase = m as f64 * grid_point(i, n);
            *v += c * Complex64::from_polar(1.0, phase);
        }
    }
    out
}

/// Single Fourier coefficient of a sampled complex field (direct projection).
pub fn mode_coefficient(values: &[Complex64], m: i32) -> Complex64 {
    let n = values.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        let phase = -(m as f64) * grid_point(i, n);
        acc += v * Complex64::from_polar(1.0, phase);
    }
    acc / n as f64
}

/// Spectral derivative of given order for each component of a vector field.
pub fn derivative3(points: &[Vector3<f64>], order: u32) -> Vec<Vector3<f64>> {
    let n = points.len();
    let mut out = vec![Vector3::zeros(); n];
    for comp in 0..3 {
        let vals: Vec<Complex64> = points
            .iter()
            .map(|p| Complex64::new(p[comp], 0.0))
            .collect();
        let mut coeffs = coefficients(&vals);
        apply_derivative_filter(&mut coeffs, order);
        let back = synthesis(&coeffs);
        for (i, v) in back.iter().enumerate() {
            out[i][comp] = v.re;
        }
    }
    out
}

/// Multiplies coefficients by (i k)^order in place. For odd orders the
/// Nyquist slot of an even-length grid is zeroed (its sign is ambiguous).
pub fn apply_derivative_filter(coeffs: &mut [Complex64], order: u32) {
    let n = coeffs.len();
    for (slot, c) in coeffs.iter_mut().enumerate() {
        let k = wavenumber(slot, n);
        if order % 2 == 1 && n % 2 == 0 && slot == n / 2 {
            *c = Complex64::new(0.0, 0.0);
            continue;
        }
        let ik = Complex64::new(0.0, k as f64);
        *c *= ik.powu(order);
    }
}

/// Tail integrals J(xi_i) = int_{xi_i}^{2 pi} f(eta) d eta for each component,
/// evaluated through the Fourier antiderivative. Exact for band-limited
/// fields; the mean component contributes the linear-in-xi piece.
pub fn tail_integrals3(points: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let n = points.len();
    let mut out = vec![Vector3::zeros(); n];
    for comp in 0..3 {
        let vals: Vec<Complex64> = points
            .iter()
            .map(|p| Complex64::new(p[comp], 0.0))
            .collect();
        let coeffs = coefficients(&vals);
        // int_xi^{2pi} e^{i m eta} d eta = (1 - e^{i m xi}) / (i m), m != 0
        for i in 0..n {
            let xi = grid_point(i, n);
            let mut acc = coeffs[0] * Complex64::new(TAU - xi, 0.0);
            for (slot, &c) in coeffs.iter().enumerate() {
                let m = wavenumber(slot, n);
                if m == 0 {
                    continue;
                }
                let im = Complex64::new(0.0, m as f64);
                let num = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, m as f64 * xi);
                acc += c * num / im;
            }
            out[i][comp] = acc.re;
        }
    }
    out
}

/// Mean over the grid times 2*pi: the full-period trapezoid rule, which is
/// spectrally accurate for smooth periodic integrands.
pub fn periodic_integral(values: &[f64]) -> f64 {
    TAU * values.iter().sum::<f64>() / values.len() as f64
}
