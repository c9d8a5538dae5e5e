//! Solve (or load a saved bundle) and print the full verification report and
//! the traveling-wave check.
//!
//! ```bash
//! cargo run --release --example verify_solution -- /tmp/wave
//! ```

use std::path::PathBuf;

use gsqg::io::{read_bundle, write_bundle};
use gsqg::minimizer::{solve, SolveConfig};
use gsqg::transport::{cfl_limit, wave_report};
use gsqg::verify::verify_bundle;

fn main() -> gsqg::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from);
    let bundle = match &dir {
        Some(d) if d.join("summary.json").exists() => read_bundle(d)?,
        _ => {
            let b = solve(&SolveConfig::default())?;
            if let Some(d) = &dir {
                write_bundle(&b, d)?;
            }
            b
        }
    };
    let report = verify_bundle(&bundle)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));

    let cfg = &bundle.config;
    let fun = cfg.functional()?;
    let h = 2.0 * cfg.l / cfg.n as f64;
    let horizon = 8.0 * h / cfg.c;
    let limit = cfl_limit(fun.spectral(), &bundle.theta_star, fun.s())?;
    let dt = (0.5 * limit).min(horizon / 8.0);
    let wave = wave_report(fun.spectral(), &bundle.theta_star, fun.s(), cfg.c, horizon, dt)?;
    println!("{}", serde_json::to_string_pretty(&wave).expect("serializable"));
    Ok(())
}
