//! Physical constants and the derived scales built from them.
//!
//! Every other module works in the dimensionless groups assembled here:
//! lengths in units of `r0`, times in `t0 = r0/v0`, masses in `mu0`, and the
//! quantum scale `beta = hbar/(mu0*v0*r0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensional inputs of the model.
///
/// `epsilon` is the perturbation amplitude of the ring; it is carried here
/// because it multiplies every perturbative quantity downstream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    /// Fluid density (mass / length^3).
    pub rho0: f64,
    /// Speed of sound (length / time).
    pub v0: f64,
    /// Natural scale length, of the order of the cross-section diameter.
    pub r0: f64,
    /// Cylinder height (length).
    pub l: f64,
    /// Mass parameter (mass).
    pub mu0: f64,
    /// Reduced Planck constant (action). Configurable so that the
    /// hbar^2-level structure is visible in f64 at desk scale.
    pub hbar: f64,
    /// Perturbation amplitude, 0 <= epsilon < 1.
    #[serde(default)]
    pub epsilon: f64,
}

impl PhysicalConstants {
    pub fn new(
        rho0: f64,
        v0: f64,
        r0: f64,
        l: f64,
        mu0: f64,
        hbar: f64,
        epsilon: f64,
    ) -> Result<Self> {
        let c = PhysicalConstants {
            rho0,
            v0,
            r0,
            l,
            mu0,
            hbar,
            epsilon,
        };
        c.validate()?;
        Ok(c)
    }

    /// All-unit constants with a given epsilon; the workhorse for tests.
    pub fn unit(epsilon: f64) -> Self {
        PhysicalConstants {
            rho0: 1.0,
            v0: 1.0,
            r0: 1.0,
            l: 1.0,
            mu0: 1.0,
            hbar: 1.0,
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho0", self.rho0),
            ("v0", self.v0),
            ("r0", self.r0),
            ("l", self.l),
            ("mu0", self.mu0),
            ("hbar", self.hbar),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::validation(
                    name,
                    format!("must be finite and strictly positive, got {value}"),
                ));
            }
        }
        if !self.epsilon.is_finite() || !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::validation(
                "epsilon",
                format!("must satisfy 0 <= epsilon < 1, got {}", self.epsilon),
            ));
        }
        Ok(())
    }

    /// Effective vortex mass mu_v = mu0 (R/R0)^2 of a ring of radius `r`.
    pub fn vortex_mass(&self, r: f64) -> f64 {
        self.mu0 * (r / self.r0) * (r / self.r0)
    }
}

/// Auxiliary constants derived from [`PhysicalConstants`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Time scale t0 = R0/v0.
    pub t0: f64,
    /// Energy scale E0 = mu0 v0^2 / 2.
    pub e0: f64,
    /// Natural mass of the domain, mu~0 = rho0 R0^2 L.
    pub mu_tilde0: f64,
    /// Dimensionless mass ratio alpha = mu0 / mu~0.
    pub alpha: f64,
    /// Dimensionless quantum scale beta = hbar / (mu0 v0 R0).
    pub beta: f64,
}

/// Builds the derived scales, rejecting invalid inputs with the field name.
pub fn derive_scales(c: &PhysicalConstants) -> Result<DerivedScales> {
    c.validate()?;
    let mu_tilde0 = c.rho0 * c.r0 * c.r0 * c.l;
    Ok(DerivedScales {
        t0: c.r0 / c.v0,
        e0: c.mu0 * c.v0 * c.v0 / 2.0,
        mu_tilde0,
        alpha: c.mu0 / mu_tilde0,
        beta: c.hbar / (c.mu0 * c.v0 * c.r0),
    })
}
