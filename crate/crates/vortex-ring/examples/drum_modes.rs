//! Dirichlet spectra of cross-sections: closed forms for disk and
//! rectangle, and the boundary-fitted grid solver with its Richardson
//! error estimates, including a convergence study against the Bessel
//! oracle and a polygon section rasterized to a mask.
//!
//! ```bash
//! cargo run --release --example drum_modes
//! ```

use vortex_ring::laplace::{
    eigen_analytic, eigen_grid, eigen_grid_single, DomainSpec, GridMask,
};

fn main() -> vortex_ring::Result<()> {
    let disk = DomainSpec::disk(1.0)?;
    let eig = eigen_analytic(&disk, 6)?;
    println!("unit disk, analytic:");
    for e in &eig.entries {
        println!(
            "  m = {}: lambda^2 = {:.9} (multiplicity {})",
            e.m, e.lambda_sq, e.multiplicity
        );
    }

    let rect = DomainSpec::rectangle(2.0, 1.0)?;
    let eig = eigen_analytic(&rect, 4)?;
    println!("2 x 1 rectangle, analytic:");
    for e in &eig.entries {
        println!("  m = {}: lambda^2 = {:.9}", e.m, e.lambda_sq);
    }

    // grid solver convergence on the disk
    let exact = eigen_analytic(&disk, 1)?.entries[0].lambda_sq;
    println!("\ngrid solver on the disk (exact lambda_1^2 = {exact:.9}):");
    let mut prev: Option<f64> = None;
    for across in [32usize, 64, 128] {
        let lam = eigen_grid_single(&disk, 1, across)?[0];
        let err = (lam - exact).abs();
        match prev {
            Some(p) => println!(
                "  {across:>4} cells across: lambda_1^2 = {lam:.9}, error {err:.3e}, order {:.2}",
                (p / err).log2()
            ),
            None => println!("  {across:>4} cells across: lambda_1^2 = {lam:.9}, error {err:.3e}"),
        }
        prev = Some(err);
    }
    let extrapolated = eigen_grid(&disk, 1, Some(2.0 / 64.0))?;
    println!(
        "  Richardson from 64/128: {:.9} +/- {:.1e}",
        extrapolated.entries[0].lambda_sq, extrapolated.entries[0].error_estimate
    );

    // an L-shaped section comes in as a polygon and runs through the mask path
    let ell = [
        [0.0, 0.0],
        [0.8, 0.0],
        [0.8, 0.4],
        [0.4, 0.4],
        [0.4, 0.8],
        [0.0, 0.8],
    ];
    let mask = GridMask::rasterize_polygon(&ell, 0.8 / 64.0)?;
    println!(
        "\nL-shaped polygon rasterized to {} x {} cells ({} components)",
        mask.nx,
        mask.ny,
        mask.component_count()
    );
    let eig = eigen_grid(&DomainSpec::mask(mask)?, 3, None)?;
    for e in &eig.entries {
        println!(
            "  m = {}: lambda^2 = {:.6} +/- {:.1e}",
            e.m, e.lambda_sq, e.error_estimate
        );
    }
    Ok(())
}
