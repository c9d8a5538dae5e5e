//! Solve from two different starting bumps and report how close the results
//! are after the best `z`-translation.
//!
//! ```bash
//! cargo run --release --example compare_initializations -- 256
//! ```

use gsqg::minimizer::{solve, SolveConfig};
use gsqg::{ScalarField, Spectral};

fn aligned_distance(sp: &Spectral, a: &ScalarField, b: &ScalarField) -> (f64, f64) {
    let h = sp.grid().spacing();
    let dist = |dz: f64| sp.shift_z(b, dz).sub(a).l2_norm() / a.l2_norm();
    let n = sp.grid().n() as isize;
    let best_cell = (-n / 4..=n / 4)
        .min_by(|&i, &j| dist(i as f64 * h).total_cmp(&dist(j as f64 * h)))
        .expect("non-empty range");
    // ternary refinement inside the best cell
    let (mut lo, mut hi) = ((best_cell as f64 - 1.0) * h, (best_cell as f64 + 1.0) * h);
    for _ in 0..60 {
        let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if dist(m1) < dist(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let dz = 0.5 * (lo + hi);
    (dz, dist(dz))
}

fn main() -> gsqg::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(256, |a| a.parse().expect("grid size"));
    let base = SolveConfig { n, ..SolveConfig::default() };
    let runs: Vec<_> = [4.0, 3.0]
        .iter()
        .map(|&div| {
            let config = SolveConfig { r0: base.l / div, ..base.clone() };
            let bundle = solve(&config)?;
            println!(
                "r0 = L/{div}: {:?} after {} iterations, E = {:.12}",
                bundle.stop_reason, bundle.iterations, bundle.alpha
            );
            Ok(bundle)
        })
        .collect::<gsqg::Result<_>>()?;
    let sp = Spectral::new(base.grid()?);
    let (dz, dist) = aligned_distance(&sp, &runs[0].psi_star, &runs[1].psi_star);
    println!("best shift {dz:+.6}, relative L2 distance {dist:.3e} (1e-3 is the agreement target)");
    Ok(())
}
