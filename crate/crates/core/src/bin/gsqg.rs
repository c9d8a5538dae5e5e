use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gsqg::config::parse_config;
use gsqg::io::{read_bundle, write_bundle, write_field, write_json};
use gsqg::minimizer::solve_with;
use gsqg::nonlinearity::Nonlin;
use gsqg::transport::{compare_with_translation, default_horizon, default_step, evolve as evolve_theta};
use gsqg::verify::verify_bundle_with;
use gsqg::{Error, FracParams};

const THETA_T_FILE: &str = "theta_T.bin";
const WAVE_FILE: &str = "wave.json";
const VERIFY_FILE: &str = "verify.json";

#[derive(Parser)]
#[command(name = "gsqg", version, about = "Traveling waves of the generalized SQG equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the energy and write a solution bundle.
    Solve {
        /// Flat `key = value` file; defaults are used for missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (overrides `out` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra `key=value` settings applied after the file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Print progress every this many iterations (0 = silent).
        #[arg(long, default_value_t = 100)]
        progress: usize,
    },
    /// Check a saved bundle and print the JSON report.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Skip the far-field decay check.
        #[arg(long)]
        skip_decay: bool,
    },
    /// Evolve the saved profile and compare with a rigid translation.
    Evolve {
        #[arg(long = "in")]
        input: PathBuf,
        /// Horizon; defaults to eight cells of travel.
        #[arg(long = "T")]
        t: Option<f64>,
        /// Time step; defaults to half the CFL limit.
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Audit the nonlinearity hypotheses for one parameter set.
    Hypotheses {
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        nu: f64,
        #[arg(long, default_value_t = 1.5)]
        mu: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

/// Returns whether every check passed.
fn run(command: Command) -> gsqg::Result<bool> {
    match command {
        Command::Solve { config, out, set, progress } => {
            let cfg = parse_config(config.as_deref(), &set)?;
            let dir = out.or(cfg.out.clone()).ok_or_else(|| {
                Error::InvalidParameter("no output directory: pass --out or set `out`".into())
            })?;
            let bundle = solve_with(&cfg.solve, |p| {
                if progress > 0 && p.iteration % progress == 0 {
                    eprintln!(
                        "iter {:5}  E = {:.12}  residual = {:.3e}  step = {:.2e}",
                        p.iteration, p.energy, p.residual, p.step
                    );
                }
            })?;
            write_bundle(&bundle, &dir)?;
            eprintln!(
                "{:?} after {} iterations: E = {:.12}, residual = {:.3e}",
                bundle.stop_reason, bundle.iterations, bundle.alpha, bundle.residual_final
            );
            println!("{}", dir.display());
            Ok(bundle.converged())
        }
        Command::Verify { input, skip_decay } => {
            let bundle = read_bundle(&input)?;
            let report = verify_bundle_with(&bundle, !skip_decay)?;
            write_json(&input.join(VERIFY_FILE), &report)?;
            print_json(&report);
            Ok(report.all_passed)
        }
        Command::Evolve { input, t, dt } => evolve(&input, t, dt),
        Command::Hypotheses { s, nu, mu, samples } => {
            let s = FracParams::new(s)?;
            let report = Nonlin::new(nu, mu, s)?.check_hypotheses(s, samples)?;
            print_json(&report);
            Ok(report.all_passed)
        }
    }
}

fn evolve(input: &Path, t: Option<f64>, dt: Option<f64>) -> gsqg::Result<bool> {
    let bundle = read_bundle(input)?;
    let cfg = &bundle.config;
    let fun = cfg.functional()?;
    let sp = fun.spectral();
    let theta = &bundle.theta_star;
    let horizon = t.unwrap_or_else(|| default_horizon(sp, cfg.c));
    let dt = match dt {
        Some(dt) => dt,
        None => default_step(sp, theta, fun.s(), horizon)?,
    };
    let evolved = evolve_theta(sp, theta, fun.s(), horizon, dt)?;
    let report = compare_with_translation(sp, theta, &evolved, cfg.c, horizon, dt);
    write_field(&input.join(THETA_T_FILE), &evolved, cfg.s)?;
    write_json(&input.join(WAVE_FILE), &report)?;
    print_json(&report);
    Ok(report.passed)
}
