//! The vorticity profile `f(xi) = xi^nu exp(-1/xi)`, its antiderivative, and
//! the numerical audit of the growth hypotheses.
//!
//! ```bash
//! cargo run --release --example nonlinearity_audit -- 0.5 2 1.5
//! ```

use gsqg::nonlinearity::{growth_exponent_bound, Nonlin};
use gsqg::FracParams;

fn main() -> gsqg::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("number"))
        .collect();
    let s = FracParams::new(*args.first().unwrap_or(&0.5))?;
    let nu = *args.get(1).unwrap_or(&2.0);
    let mu = *args.get(2).unwrap_or(&1.5);
    println!("s = {}, nu = {nu}, mu = {mu}, nu must stay below {}", s.s(), growth_exponent_bound(s));

    let p = match Nonlin::new(nu, mu, s) {
        Ok(p) => p,
        Err(e) => {
            println!("rejected: {e}");
            return Ok(());
        }
    };
    println!("\n      xi          f(xi)         F(xi)    xi f'/f");
    for xi in [0.05, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
        println!(
            "{xi:8.2}  {:13.6e}  {:13.6e}  {:8.4}",
            p.f(xi),
            p.antiderivative(xi),
            xi * p.f_prime(xi) / p.f(xi)
        );
    }
    let report = p.check_hypotheses(s, 2000)?;
    println!();
    for c in &report.checks {
        println!("{:4} {}\n     margin {:+.3e}: {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.worst_margin, c.detail);
    }
    Ok(())
}
