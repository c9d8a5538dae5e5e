//! Parse a run configuration, solve a small problem and round-trip the bundle
//! through disk.
//!
//! ```bash
//! cargo run --release --example config_and_io -- /tmp/small
//! ```

use std::path::PathBuf;

use gsqg::config::parse_str;
use gsqg::io::{read_bundle, write_bundle};
use gsqg::solve;

fn main() -> gsqg::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("gsqg_small"));
    let cfg = parse_str("# small smoke run\nn = 64\nL = 4\nmax_iter = 400\n", "inline")?;
    println!("r0 = {}, w = {}, evolve T = {}", cfg.solve.r0, cfg.solve.w, cfg.evolve_t);

    let bundle = solve(&cfg.solve)?;
    write_bundle(&bundle, &dir)?;
    let back = read_bundle(&dir)?;
    let same = back.psi_star.values() == bundle.psi_star.values() && back.energy_history == bundle.energy_history;
    println!(
        "{:?} after {} iterations, E = {:.10}; wrote {} (round trip exact: {same})",
        bundle.stop_reason,
        bundle.iterations,
        bundle.alpha,
        dir.display()
    );
    Ok(())
}
