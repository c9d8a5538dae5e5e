//! Evolve fields under the generalized SQG flow: a radial profile stays put,
//! an odd pair translates along `z`.
//!
//! ```bash
//! cargo run --release --example transport_check -- 0.5
//! ```

use gsqg::transport::{cfl_limit, evolve, wave_report};
use gsqg::{FracParams, Grid, ScalarField, Spectral};

fn main() -> gsqg::Result<()> {
    let horizon: f64 = std::env::args().nth(1).map_or(0.5, |a| a.parse().expect("horizon"));
    let grid = Grid::new(128, 4.0)?;
    let sp = Spectral::new(grid);
    let s = FracParams::new(0.5)?;

    let radial = ScalarField::from_fn(grid, |r, z| {
        let q = (r * r + z * z) / 0.5;
        (1.0 - q) * (-q).exp()
    });
    let dt = 0.5 * cfl_limit(&sp, &radial, s)?;
    let out = evolve(&sp, &radial, s, horizon, dt)?;
    println!(
        "radial profile: |theta(T) - theta0| / |theta0| = {:.2e} (dt = {dt:.3e})",
        out.sub(&radial).l2_norm() / radial.l2_norm()
    );

    let blob = |r: f64, z: f64| (-(r * r + z * z) / 0.2).exp();
    let pair = ScalarField::from_fn(grid, |r, z| blob(r - 0.6, z) - blob(r + 0.6, z)).symmetrize_odd_r();
    let dt = 0.5 * cfl_limit(&sp, &pair, s)?;
    let report = wave_report(&sp, &pair, s, 1.0, horizon, dt)?;
    println!(
        "odd pair: drifts at speed {:.4} (residual {:.2e} after the best shift), L2 drift {:.1e}",
        report.fitted_speed, report.fitted_error, report.l2_drift
    );
    Ok(())
}
