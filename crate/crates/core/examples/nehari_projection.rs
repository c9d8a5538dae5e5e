//! Project a trial field onto the Nehari manifold and print the scalar `t`,
//! the energy and the lower bounds that hold on the manifold.
//!
//! ```bash
//! cargo run --release --example nehari_projection
//! ```

use gsqg::energy::NEHARI_TOL;
use gsqg::minimizer::SolveConfig;
use gsqg::ScalarField;

fn main() -> gsqg::Result<()> {
    let config = SolveConfig { n: 64, ..SolveConfig::default() };
    let fun = config.functional()?;
    let grid = *fun.grid();
    let bump = |r: f64, z: f64| (-(r * r + z * z)).exp();
    let psi = ScalarField::from_fn(grid, |r, z| bump(r - 2.0, z) - bump(r + 2.0, z)).symmetrize_odd_r();

    for lambda in [1.0, 2.0, 10.0] {
        let trial = psi.scaled(lambda);
        let proj = fun.nehari_project(&trial, NEHARI_TOL)?;
        println!(
            "lambda = {lambda:5.1}  t = {:.10}  lambda t = {:.10}  g(t) = {:+.2e}",
            proj.t,
            lambda * proj.t,
            proj.g_residual
        );
    }

    let on = fun.nehari_project(&psi, NEHARI_TOL)?.field;
    let b = fun.nehari_bounds_check(&on, NEHARI_TOL)?;
    println!("\nE = {:.6}  |psi|^2 = {:.6}  E / |psi|^2 = {:.6}", b.energy, b.xs_norm_sq, 1.0 / b.ratio);
    let mu = config.mu;
    println!("mu / (2(mu+1))       = {:.6}  holds: {}", mu / (2.0 * (mu + 1.0)), b.mu_bound_holds);
    println!("(mu-1) / (2(mu+1))   = {:.6}  holds: {}", (mu - 1.0) / (2.0 * (mu + 1.0)), b.shifted_bound_holds);

    println!("\nenergy along the ray t psi (maximal at the projection):");
    let t_star = fun.nehari_project(&psi, NEHARI_TOL)?.t;
    for f in [0.5, 0.9, 1.0, 1.1, 2.0] {
        println!("  t = {:7.4}  E = {:.8}", f * t_star, fun.energy(&psi.scaled(f * t_star)));
    }
    Ok(())
}
