//! Dynamics and quantized circulation of a thin closed vortex filament in a
//! cylindrical domain.
//!
//! The crate covers the full pipeline:
//!
//! - [`constants`]: dimensional inputs and the derived scales (alpha, beta,
//!   vortex mass).
//! - [`filament`]: the closed curve through the Fourier modes of its tangent
//!   perturbation, with closure and conjugate-coupling invariants.
//! - [`dynamics`]: the local-induction flow; exact mode propagator,
//!   linearized pseudo-spectral integrator and the nonlinear curve solver.
//! - [`hydro`]: the hydrodynamic impulse functional, the momentum relations
//!   and the classical circulation constraint.
//! - [`laplace`]: Dirichlet spectra of the cross-section, analytic for disk
//!   and rectangle, boundary-fitted finite differences with Richardson
//!   extrapolation for everything else.
//! - [`spectrum`]: circulation levels Gamma_{n,m,k} with the form-factor and
//!   fine-structure corrections, selection rules, and the peak histogram of
//!   mu_v Gamma / hbar.
//! - [`config`] and [`cli`]: the config-file driven front end behind the
//!   `vring` binary.
//!
//! Every capability has a runnable demonstration under `examples/`.

pub mod bessel;
pub mod cli;
pub mod config;
pub mod constants;
pub mod dynamics;
pub mod eigsolve;
pub mod error;
pub mod filament;
pub mod fourier;
pub mod hydro;
pub mod laplace;
pub mod spectrum;

pub use constants::{derive_scales, DerivedScales, PhysicalConstants};
pub use dynamics::{
    dispersion, evolve_linearized_pde, evolve_modes, evolve_nonlinear, LinearField,
    NonlinearOptions, NonlinearRun,
};
pub use error::{Error, Result};
pub use filament::{FilamentState, SampledCurve};
pub use hydro::{impulse_f, momentum, phi_gamma, solve_gamma_classical, ImpulseResult};
pub use laplace::{eigen_analytic, eigen_grid, DomainSpec, EigenResult, GridMask};
pub use spectrum::{
    enumerate_levels, gamma_exact, gamma_series, peak_histogram, CirculationLevel,
    EnumerationOptions, QuantumNumbers,
};
