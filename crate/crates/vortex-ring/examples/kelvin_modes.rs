//! Oscillation modes of the ring: the dispersion law, the exact phase
//! propagator, and the pseudo-spectral integrator for the linearized
//! amplitude equation agreeing with it.
//!
//! ```bash
//! cargo run --release --example kelvin_modes
//! ```

use num_complex::Complex64;
use std::f64::consts::TAU;

use nalgebra::Vector3;
use vortex_ring::dynamics::{
    dispersion, evolve_linearized_pde, linearized_stability_bound, LinearField,
};
use vortex_ring::filament::FilamentState;
use vortex_ring::fourier;

fn main() -> vortex_ring::Result<()> {
    println!("dispersion omega_n = n sqrt(n^2 - 1):");
    for n in 0..=6 {
        println!("  n = {n}: omega = {:.9}", dispersion(n));
    }

    // a single n = 2 pair rotated by the exact propagator
    let state = FilamentState::base_ring(Vector3::zeros(), 1.0, 1.0)?
        .with_epsilon(0.05)?
        .excite(2, Complex64::new(0.7, 0.3))?;
    let period = TAU / dispersion(2);
    println!("\nmode 2 period: {period:.9}");
    let half = state.evolved(period / 2.0);
    println!(
        "j_2 after half a period: {:.6} (phase flip of {:.6})",
        half.mode(2),
        state.mode(2)
    );

    // the PDE integrator reproduces the same rotation
    let n = 64;
    let field0 = LinearField::from_amplitude(&state.amplitude_field(n)?);
    let dt = 0.8 * linearized_stability_bound(n);
    let field1 = evolve_linearized_pde(&field0, period, dt)?;
    let exact = state.evolved(period).amplitude_field(n)?;
    let dev = field1
        .amplitude()
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("PDE vs exact propagator after one period: {dev:.3e}");

    // phase of the radial coefficient rotates at omega_2
    let c0 = fourier::mode_coefficient(&field0.amplitude(), 2);
    let quarter = evolve_linearized_pde(&field0, period / 4.0, dt)?;
    let c1 = fourier::mode_coefficient(&quarter.amplitude(), 2);
    println!(
        "coefficient phase advance over a quarter period: {:.6} (expect {:.6})",
        (c1 / c0).arg(),
        TAU / 4.0
    );
    Ok(())
}
