//! Polarization and Steiner rearrangement of an odd field, with the Gagliardo
//! seminorm before and after each step.
//!
//! ```bash
//! cargo run --release --example rearrangement
//! ```

use gsqg::rearrange::{gagliardo_sq, polarize, steiner};
use gsqg::{Grid, ScalarField};

fn main() -> gsqg::Result<()> {
    let grid = Grid::new(32, 4.0)?;
    let bump = |r: f64, z: f64, a: f64| (-(r * r + z * z) / a).exp();
    // odd in r but with mass on the wrong side and off-centre in z
    let psi = ScalarField::from_fn(grid, |r, z| {
        bump(r - 1.5, z - 1.0, 0.4) - 0.8 * bump(r - 0.7, z + 1.2, 0.2) - bump(r + 1.5, z - 1.0, 0.4)
            + 0.8 * bump(r + 0.7, z + 1.2, 0.2)
    })
    .symmetrize_odd_r();
    let pol = polarize(&psi);
    let st = steiner(&pol)?;

    for s in [0.25, 0.5, 0.75] {
        let g0 = gagliardo_sq(&psi, s, 2.0)?;
        let g1 = gagliardo_sq(&pol, s, 2.0)?;
        let g2 = gagliardo_sq(&st, s, 2.0)?;
        println!("s = {s:.2}  [psi] = {g0:10.4}  polarized {g1:10.4}  Steiner {g2:10.4}");
    }

    println!("\nright half-plane line through the lower bump, before and after Steiner:");
    let ir = ((0.75 + grid.half_width()) / grid.spacing()).round() as usize;
    let fmt = |f: &ScalarField| f.line(ir).iter().map(|v| format!("{v:5.2}")).collect::<Vec<_>>().join(" ");
    println!("{}\n{}", fmt(&pol), fmt(&st));
    Ok(())
}
