//! Solve for the default traveling wave and print a short summary.
//!
//! ```bash
//! cargo run --release --example traveling_wave -- 256 8
//! ```

use gsqg::minimizer::{solve_with, SolveConfig};

fn main() -> gsqg::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let mut config = SolveConfig::default();
    if let Some(n) = args.get(1) {
        config.n = n.parse().expect("grid size");
    }
    if let Some(l) = args.get(2) {
        config.l = l.parse().expect("half-width");
        config.r0 = config.l / 4.0;
        config.w = config.l / 16.0;
    }
    let start = std::time::Instant::now();
    let bundle = solve_with(&config, |p| {
        if p.iteration % 100 == 0 {
            println!(
                "iter {:5}  E = {:.12}  residual = {:.3e}  step = {:.3}",
                p.iteration, p.energy, p.residual, p.step
            );
        }
    })?;
    println!("stopped after {} iterations: {:?}", bundle.iterations, bundle.stop_reason);
    println!("alpha = E(psi*)       {:.12}", bundle.alpha);
    println!("|psi*|^2              {:.12}", bundle.beta_witness);
    println!("residual              {:.3e}", bundle.residual_final);
    println!("max psi*              {:.6}", bundle.psi_star.max_abs());
    println!("elapsed               {:.1?}", start.elapsed());
    Ok(())
}
