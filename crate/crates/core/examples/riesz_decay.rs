//! Far-field decay of the free-space Riesz potential for a one-signed blob and
//! for an odd pair.
//!
//! ```bash
//! cargo run --release --example riesz_decay
//! ```

use gsqg::verify::decay_report;
use gsqg::{FracParams, Grid, ScalarField};

fn main() -> gsqg::Result<()> {
    let grid = Grid::new(64, 4.0)?;
    let blob = |r: f64, z: f64| {
        let q = r * r + z * z;
        if q < 0.25 { (1.0 - 4.0 * q).powi(3) } else { 0.0 }
    };
    let single = ScalarField::from_fn(grid, blob);
    let pair = ScalarField::from_fn(grid, |r, z| blob(r - 0.6, z) - blob(r + 0.6, z)).symmetrize_odd_r();

    println!("   s   expected   one-signed    odd pair");
    for s in [0.25, 0.5, 0.75] {
        let s = FracParams::new(s)?;
        let mono = decay_report(&single, s)?;
        let dip = decay_report(&pair, s)?;
        println!("{:.2}   {:8.3}   {:10.3}  {:10.3}", s.s(), mono.expected_slope, mono.slope, dip.slope);
    }
    Ok(())
}
