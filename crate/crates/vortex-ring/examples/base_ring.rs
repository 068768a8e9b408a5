//! The unperturbed vortex ring: build it, reconstruct the curve from its
//! tangent field, and recover the circulation from the momentum.
//!
//! ```bash
//! cargo run --release --example base_ring
//! ```

use nalgebra::Vector3;
use vortex_ring::constants::PhysicalConstants;
use vortex_ring::filament::FilamentState;
use vortex_ring::hydro::{momentum, phi_gamma, solve_gamma_classical};

fn main() -> vortex_ring::Result<()> {
    let constants = PhysicalConstants::unit(0.0);
    let radius = 0.4;
    let gamma = 1.7;
    let state = FilamentState::base_ring(Vector3::new(0.1, 0.0, 0.0), radius, gamma)?;

    // the anchor point is the xi = 0 material point of the curve
    let curve = state.reconstruct_curve(128)?;
    println!("ring radius          : {radius}");
    println!(
        "curve starts at      : ({:.6}, {:.3e}, {:.3e})",
        curve.points[0].x, curve.points[0].y, curve.points[0].z
    );
    println!(
        "total length / 2 pi R: {:.12}",
        curve.total_length() / (std::f64::consts::TAU * radius)
    );
    println!(
        "closure residual     : {:.3e}",
        state.check_closure().norm()
    );

    // the impulse of a flat ring points along the axis with |f| = pi
    let m = momentum(&state, &constants, 256)?;
    println!("impulse f            : ({:.3e}, {:.3e}, {:.6})", m.f.x, m.f.y, m.f.z);
    println!("axial momentum       : {:.12} (closed form {:.12})", m.p_z, m.p_z_closed_form);

    // invert the constraint to get the circulation back from the momentum
    let s = vortex_ring::derive_scales(&constants)?;
    let p = s.alpha * m.p_tilde;
    let recovered = solve_gamma_classical(p, state.mode(-1), &constants, radius);
    println!("recovered Gamma      : {recovered:.12} (input {gamma})");
    println!(
        "constraint residual  : {:.3e}",
        phi_gamma(p, state.mode(-1), recovered, &constants, radius)
    );
    Ok(())
}
