//! The spectral fractional Laplacian on a periodic box: eigenvalues of single
//! modes, the inverse, the `X^s` norm, and the free-space Riesz potential.
//!
//! ```bash
//! cargo run --release --example fractional_laplacian
//! ```

use std::f64::consts::PI;

use gsqg::spectral::{riesz_constant, riesz_far_eval};
use gsqg::{FracParams, Grid, ScalarField, Spectral};

fn main() -> gsqg::Result<()> {
    let grid = Grid::new(64, 4.0)?;
    let sp = Spectral::new(grid);
    let q = PI / grid.half_width();

    for s in [0.25, 0.5, 0.75] {
        let s = FracParams::new(s)?;
        let (mr, mz) = (3.0, 5.0);
        let mode = ScalarField::from_fn(grid, |r, z| (mr * q * r).sin() * (mz * q * z).cos());
        let eig = ((mr * mr + mz * mz) * q * q).powf(s.s());
        let err = sp.frac_laplacian(&mode, s).sub(&mode.scaled(eig)).max_abs() / eig;
        let back = sp.inv_frac_laplacian(&sp.frac_laplacian(&mode, s), s)?;
        println!(
            "s = {:.2}  |xi|^2s = {eig:10.4}  eigen error {err:.1e}  roundtrip {:.1e}  K_s = {:.6}",
            s.s(),
            back.sub(&mode).max_abs(),
            riesz_constant(s)
        );
    }

    // far field of a compact odd pair, periodic grid field vs Riesz sum
    let s = FracParams::new(0.5)?;
    let blob = |r: f64, z: f64| {
        let q = r * r + z * z;
        if q < 0.25 { (1.0 - 4.0 * q).powi(3) } else { 0.0 }
    };
    let theta = ScalarField::from_fn(grid, |r, z| blob(r - 0.6, z) - blob(r + 0.6, z)).symmetrize_odd_r();
    let periodic = sp.inv_frac_laplacian(&theta, s)?;
    let points: Vec<(f64, f64)> = [1.5, 2.0, 2.5, 3.0].iter().map(|&r| (r, 0.0)).collect();
    let free = riesz_far_eval(&theta, &points, s)?;
    println!("\n   r   periodic psi   free-space psi");
    for ((r, _), f) in points.iter().zip(&free) {
        let ir = ((r + grid.half_width()) / grid.spacing()).round() as usize;
        println!("{r:4.1}   {:12.6}   {f:14.6}", periodic.get(ir, grid.center()));
    }
    Ok(())
}
