//! Closed filament represented through the Fourier modes of its tangent
//! perturbation, and reconstruction of the space curve from them.
//!
//! The unperturbed ring has tangent j0(xi) = (-sin xi, cos xi, 0). The
//! perturbation lives in the complex amplitude sj = j_rho + i j_z whose
//! Fourier modes are the dynamical variables. The curve is recovered from
//! the tangent field through the piecewise-constant loop kernel, which for a
//! closed field reduces to r(xi) = q - R * int_xi^{2pi} j(eta) d eta.

use nalgebra::Vector3;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::dynamics::coupling_factor;
use crate::error::{Error, Result};
use crate::fourier;

/// Residual below which a state counts as closed.
pub const CLOSURE_TOL: f64 = 1e-10;

/// Stored mode pairs must satisfy the conjugate coupling to this tolerance.
const COUPLING_TOL: f64 = 1e-12;

/// Radial unit vector of the unperturbed frame at material point xi.
pub fn e_rho(xi: f64) -> Vector3<f64> {
    Vector3::new(xi.cos(), xi.sin(), 0.0)
}

/// Tangent of the unperturbed ring at material point xi.
pub fn base_tangent(xi: f64) -> Vector3<f64> {
    Vector3::new(-xi.sin(), xi.cos(), 0.0)
}

/// Dynamical state of the closed filament.
///
/// Only excited mode indices are stored; an absent index means zero. The
/// constructors enforce the closure restrictions on the low modes (j_0 real,
/// j_1 = -conj(j_{-1})) and the conjugate coupling on every stored pair with
/// |n| >= 2, so a constructed state always describes a closed curve that
/// evolves by pure phase rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct FilamentState {
    q: Vector3<f64>,
    r: f64,
    gamma: f64,
    epsilon: f64,
    modes: BTreeMap<i32, Complex64>,
}

impl FilamentState {
    /// Unperturbed ring of radius `r` anchored at `q` (the xi = 0 material
    /// point coincides with `q`).
    pub fn base_ring(q: Vector3<f64>, r: f64, gamma: f64) -> Result<Self> {
        Self::new(q, r, gamma, 0.0, BTreeMap::new())
    }

    pub fn new(
        q: Vector3<f64>,
        r: f64,
        gamma: f64,
        epsilon: f64,
        modes: BTreeMap<i32, Complex64>,
    ) -> Result<Self> {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::validation("R", format!("ring radius must be positive, got {r}")));
        }
        if !gamma.is_finite() {
            return Err(Error::validation("Gamma", "circulation must be finite"));
        }
        if !epsilon.is_finite() || !(0.0..1.0).contains(&epsilon) {
            return Err(Error::validation(
                "epsilon",
                format!("must satisfy 0 <= epsilon < 1, got {epsilon}"),
            ));
        }
        validate_modes(&modes)?;
        Ok(FilamentState {
            q,
            r,
            gamma,
            epsilon,
            modes,
        })
    }

    /// Adds the mode pair for index `n`, completing the partner amplitude
    /// from the conjugate coupling (or the closure restriction for |n| <= 1).
    ///
    /// For n = 0 the amplitude must be real. For |n| = 1 the partner is
    /// -conj(c). For |n| >= 2 the partner is coupling_factor(n) * conj(c).
    pub fn excite(mut self, n: i32, c: Complex64) -> Result<Self> {
        if n == 0 {
            if c.im.abs() > COUPLING_TOL * c.norm().max(1.0) {
                return Err(Error::validation(
                    "j_0",
                    "the n = 0 amplitude must be real for a closed curve",
                ));
            }
            self.modes.insert(0, Complex64::new(c.re, 0.0));
        } else if n > 0 {
            // conj(j_{-n}) = coupling_factor(n) * j_n, and the factor is -1
            // at |n| = 1 which reproduces j_1 = -conj(j_{-1})
            self.modes.insert(n, c);
            self.modes.insert(-n, coupling_factor(n) * c.conj());
        } else {
            // solve the same relation for the positive member; the division
            // keeps the stored pair consistent to rounding, which the
            // reciprocal coupling factor would not
            self.modes.insert(n, c);
            self.modes.insert(-n, c.conj() / coupling_factor(-n));
        }
        validate_modes(&self.modes)?;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || !(0.0..1.0).contains(&epsilon) {
            return Err(Error::validation(
                "epsilon",
                format!("must satisfy 0 <= epsilon < 1, got {epsilon}"),
            ));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    /// Replaces the mode map by its phase-evolved image at dimensionless
    /// time `tau` (see [`crate::dynamics::evolve_modes`]).
    pub fn evolved(&self, tau: f64) -> Self {
        FilamentState {
            modes: crate::dynamics::evolve_modes(&self.modes, tau),
            ..self.clone()
        }
    }

    pub fn q(&self) -> Vector3<f64> {
        self.q
    }
    pub fn radius(&self) -> f64 {
        self.r
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn modes(&self) -> &BTreeMap<i32, Complex64> {
        &self.modes
    }

    /// Amplitude of mode n (zero when absent).
    pub fn mode(&self, n: i32) -> Complex64 {
        self.modes
            .get(&n)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    /// Largest excited |n|.
    pub fn max_mode(&self) -> i32 {
        self.modes.keys().map(|n| n.abs()).max().unwrap_or(0)
    }

    /// Smallest grid that samples the state without aliasing.
    pub fn min_grid(&self) -> usize {
        (4 * self.max_mode().max(1) as usize).max(16)
    }

    fn check_grid(&self, n: usize) -> Result<()> {
        let required = 4 * self.max_mode() as usize;
        if n < required.max(4) {
            return Err(Error::Aliasing {
                required: required.max(4),
                got: n,
                n_max: self.max_mode(),
            });
        }
        Ok(())
    }

    /// Complex perturbation amplitude sj sampled on the N-point grid.
    pub fn amplitude_field(&self, n: usize) -> Result<Vec<Complex64>> {
        self.check_grid(n)?;
        Ok(fourier::synthesize_modes(&self.modes, n))
    }

    /// Unit-tangent field j(xi_i) = j0 + epsilon (Re sj e_rho + Im sj e_z).
    pub fn tangent_field(&self, n: usize) -> Result<Vec<Vector3<f64>>> {
        let sj = self.amplitude_field(n)?;
        Ok((0..n)
            .map(|i| {
                let xi = fourier::grid_point(i, n);
                base_tangent(xi) + self.epsilon * (sj[i].re * e_rho(xi) + sj[i].im * Vector3::z())
            })
            .collect())
    }

    /// Integrals of the tangent components over one period; all three vanish
    /// for a closed curve.
    pub fn check_closure(&self) -> Vector3<f64> {
        let n = self.min_grid().max(64);
        // the synthesized field is band-limited, so the full-period
        // trapezoid rule evaluates the integrals exactly
        let j = self
            .tangent_field(n)
            .expect("min_grid satisfies the aliasing bound");
        let mut res = Vector3::zeros();
        for v in &j {
            res += v;
        }
        res * (TAU / n as f64)
    }

    /// Reconstructs the space curve on an N-point grid.
    ///
    /// The loop kernel is 0 for eta <= xi and -1 for eta > xi on the
    /// principal square, so r(xi) = q - R int_xi^{2pi} j(eta) d eta; the tail
    /// integral is evaluated through the Fourier antiderivative, which is the
    /// split-at-the-discontinuity quadrature carried out exactly.
    pub fn reconstruct_curve(&self, n: usize) -> Result<SampledCurve> {
        let residual = self.check_closure();
        if residual.norm() > CLOSURE_TOL {
            return Err(Error::ClosureViolation(residual.x, residual.y, residual.z));
        }
        let tangents = self.tangent_field(n)?;
        let tails = fourier::tail_integrals3(&tangents);
        let points = tails.iter().map(|t| self.q - self.r * t).collect();
        Ok(SampledCurve { points, tangents })
    }
}

fn validate_modes(modes: &BTreeMap<i32, Complex64>) -> Result<()> {
    for (&n, &c) in modes {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::validation(
                format!("j_{n}"),
                "mode amplitude must be finite",
            ));
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let at = |n: i32| modes.get(&n).copied().unwrap_or(zero);
    // check each pair once, by |n|, including pairs stored only on the
    // negative side
    let indices: std::collections::BTreeSet<i32> = modes.keys().map(|n| n.abs()).collect();
    for n in indices {
        let c = at(n);
        let partner = at(-n);
        let scale = c.norm().max(partner.norm()).max(1.0);
        if n == 0 {
            if c.im.abs() > COUPLING_TOL * scale {
                return Err(Error::validation(
                    "j_0",
                    format!("must be real (Im = {:.3e})", c.im),
                ));
            }
        } else {
            // conj(j_{-n}) = 2 [n sqrt(n^2-1) - n^2 + 1/2] j_n
            let defect = partner.conj() - coupling_factor(n) * c;
            if defect.norm() > COUPLING_TOL * scale {
                return Err(Error::validation(
                    format!("j_{}/j_{}", n, -n),
                    format!("conjugate coupling violated (defect {:.3e})", defect.norm()),
                ));
            }
        }
    }
    Ok(())
}

/// Space curve sampled on the uniform material grid xi_i = 2*pi*i/N.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    /// Positions r(xi_i).
    pub points: Vec<Vector3<f64>>,
    /// Tangent directions j(xi_i), approximately unit for small epsilon.
    pub tangents: Vec<Vector3<f64>>,
}

impl SampledCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total arclength from the spectral derivative of the positions.
    pub fn total_length(&self) -> f64 {
        let d = fourier::derivative3(&self.points, 1);
        fourier::periodic_integral(&d.iter().map(Vector3::norm).collect::<Vec<_>>())
    }

    /// Centroid of the sample points.
    pub fn centroid(&self) -> Vector3<f64> {
        self.points.iter().sum::<Vector3<f64>>() / self.len() as f64
    }
}
