//! Constrained descent on the Nehari manifold with periodic polarization and
//! Steiner rearrangement.

use serde::{Deserialize, Serialize};

use crate::energy::{Functional, WaveParams, NEHARI_TOL};
use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::nonlinearity::Nonlin;
use crate::rearrange::{polarize, steiner};
use crate::spectral::FracParams;

const STEP_MAX: f64 = 1.0;
const STEP_GROWTH: f64 = 1.5;
const STEP_MIN: f64 = 1e-12;
const STALL_WINDOW: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub s: f64,
    pub c: f64,
    pub k: f64,
    pub nu: f64,
    pub mu: f64,
    /// Offset of the initial bump from the axis.
    pub r0: f64,
    /// Width of the initial bump.
    pub w: f64,
    /// Initial amplitude, doubled until the bump reaches the cut-off.
    pub amplitude: f64,
    pub max_iter: usize,
    /// Stop once both `|grad E|_{X^s} / |psi|_{X^s}` and the relative PDE
    /// residual drop below this.
    pub tol_residual: f64,
    /// Relative energy change counted as a stall, and the slack allowed when
    /// accepting a rearranged iterate.
    pub tol_energy: f64,
    pub sym_every: usize,
    pub step0: f64,
    pub backtrack: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            n: 256,
            l: 8.0,
            s: 0.5,
            c: 1.0,
            k: 0.5,
            nu: 2.0,
            mu: 1.5,
            r0: 2.0,
            w: 0.5,
            amplitude: 1.0,
            max_iter: 5000,
            tol_residual: 1e-6,
            tol_energy: 1e-14,
            sym_every: 10,
            step0: 0.5,
            backtrack: 0.5,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        for (name, v) in [
            ("tol_residual", self.tol_residual),
            ("tol_energy", self.tol_energy),
            ("r0", self.r0),
            ("w", self.w),
            ("amplitude", self.amplitude),
            ("step0", self.step0),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if self.sym_every == 0 {
            return bad("sym_every must be at least 1".into());
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad(format!("backtrack = {} must lie in (0, 1)", self.backtrack));
        }
        if self.r0 >= self.l {
            return bad(format!("r0 = {} must be inside the domain half-width {}", self.r0, self.l));
        }
        self.functional().map(|_| ())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.l)
    }

    pub fn frac(&self) -> Result<FracParams> {
        FracParams::new(self.s)
    }

    pub fn functional(&self) -> Result<Functional> {
        let s = self.frac()?;
        Ok(Functional::new(
            self.grid()?,
            s,
            WaveParams::new(self.c, self.k)?,
            Nonlin::new(self.nu, self.mu, s)?,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    EnergyStalled,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SolutionBundle {
    pub psi_star: ScalarField,
    pub theta_star: ScalarField,
    /// Nehari scalar of the last projection (close to 1 at convergence).
    pub t_final: f64,
    pub energy_history: Vec<f64>,
    pub residual_final: f64,
    /// `E(psi_star)`.
    pub alpha: f64,
    /// `|psi_star|^2_{X^s}`.
    pub beta_witness: f64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub config: SolveConfig,
}

impl SolutionBundle {
    pub fn converged(&self) -> bool {
        self.stop_reason == StopReason::Converged
    }
}

/// Progress record passed to the observer of [`solve_with`].
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub iteration: usize,
    pub energy: f64,
    pub residual: f64,
    pub step: f64,
}

/// Odd pair of Gaussian bumps at `(+-r0, 0)`, scaled up until it crosses the
/// cut-off `c r + k` somewhere on the half-plane.
pub fn init_guess(config: &SolveConfig) -> Result<ScalarField> {
    config.validate()?;
    let grid = config.grid()?;
    let wave = WaveParams::new(config.c, config.k)?;
    let (r0, w) = (config.r0, config.w);
    let shape = ScalarField::from_fn(grid, |r, z| {
        let g = |dr: f64| (-(dr * dr + z * z) / (w * w)).exp();
        g(r - r0) - g(r + r0)
    })
    .symmetrize_odd_r();
    let excess = |amp: f64| {
        let mut best = f64::NEG_INFINITY;
        for ir in grid.center()..grid.n() {
            let a = wave.offset(grid.coord(ir));
            for &v in shape.line(ir) {
                best = best.max(amp * v - a);
            }
        }
        best
    };
    let mut amp = config.amplitude;
    for _ in 0..200 {
        if excess(amp) > 0.0 {
            return Ok(shape.scaled(amp));
        }
        amp *= 2.0;
    }
    Err(Error::NotAdmissible(
        "initial bump never reaches the cut-off level".into(),
    ))
}

/// Gradient of `E` in the `X^s` metric: `psi - (-Delta)^{-s} theta(psi)`.
pub fn xs_gradient(fun: &Functional, psi: &ScalarField) -> Result<ScalarField> {
    let theta = fun.theta_from_psi(psi);
    let potential = fun.spectral().inv_frac_laplacian(&theta, fun.s())?;
    Ok(psi.sub(&potential).symmetrize_odd_r())
}

/// Larger of `|grad E|_{X^s} / |psi|_{X^s}` and the PDE residual
/// `|(-Delta)^s psi - theta|_{L^2} / |theta|_{L^2}`, with the gradient.
fn gradient_and_residual(fun: &Functional, psi: &ScalarField) -> Result<(ScalarField, f64)> {
    let grad = xs_gradient(fun, psi)?;
    let sp = fun.spectral();
    let xs = (sp.xs_norm_sq(&grad, fun.s()) / sp.xs_norm_sq(psi, fun.s())).sqrt();
    let theta_norm = fun.theta_from_psi(psi).l2_norm();
    let pde = if theta_norm > 0.0 {
        sp.frac_laplacian(&grad, fun.s()).l2_norm() / theta_norm
    } else {
        f64::INFINITY
    };
    Ok((grad, xs.max(pde)))
}

/// Rearranged candidate: odd projection, polarization, Steiner rearrangement,
/// then averaging with the `z`-reflection (which keeps the Steiner form).
fn rearranged(psi: &ScalarField) -> Result<ScalarField> {
    let sharp = steiner(&polarize(&psi.symmetrize_odd_r()))?;
    Ok(sharp.add(&sharp.reflect_z()).scaled(0.5))
}

pub fn solve(config: &SolveConfig) -> Result<SolutionBundle> {
    solve_with(config, |_| {})
}

/// As [`solve`], calling `observe` after every accepted descent step.
pub fn solve_with(config: &SolveConfig, mut observe: impl FnMut(&Progress)) -> Result<SolutionBundle> {
    config.validate()?;
    let fun = config.functional()?;
    let first = fun.nehari_project(&init_guess(config)?, NEHARI_TOL)?;
    let mut t_final = first.t;
    let mut psi = first.field;
    let mut energy = fun.energy(&psi);
    let mut history = vec![energy];
    let mut step = config.step0;
    let mut stalled = 0;
    let mut stop_reason = StopReason::MaxIterations;
    let mut iterations = 0;

    // accepts a rearranged iterate unless it costs more than tol_energy
    let try_rearrange = |psi: &ScalarField, energy: f64| -> Result<Option<(ScalarField, f64, f64)>> {
        let candidate = rearranged(psi)?;
        let projected = fun.nehari_project(&candidate, NEHARI_TOL)?;
        let delta = fun.energy_diff(psi, &projected.field);
        if delta <= config.tol_energy * energy.abs() {
            Ok(Some((projected.field, delta, projected.t)))
        } else {
            Ok(None)
        }
    };

    while iterations < config.max_iter {
        let (grad, residual) = gradient_and_residual(&fun, &psi)?;
        if residual < config.tol_residual {
            stop_reason = StopReason::Converged;
            break;
        }
        iterations += 1;

        let (next, delta, t) = loop {
            let trial = psi.axpy(-step, &grad).symmetrize_odd_r();
            if let Ok(projected) = fun.nehari_project(&trial, NEHARI_TOL) {
                let delta = fun.energy_diff(&psi, &projected.field);
                if delta < 0.0 {
                    break (projected.field, delta, projected.t);
                }
            }
            step *= config.backtrack;
            if step < STEP_MIN {
                return Err(Error::NoDescentDirection {
                    iteration: iterations,
                    energy,
                });
            }
        };
        psi = next;
        t_final = t;
        energy += delta;
        history.push(energy);
        observe(&Progress {
            iteration: iterations,
            energy,
            residual,
            step,
        });
        step = (step * STEP_GROWTH).min(STEP_MAX);

        if delta.abs() <= config.tol_energy * energy.abs() {
            stalled += 1;
            if stalled >= STALL_WINDOW {
                stop_reason = StopReason::EnergyStalled;
                break;
            }
        } else {
            stalled = 0;
        }

        if iterations % config.sym_every == 0 {
            if let Some((field, delta, t)) = try_rearrange(&psi, energy)? {
                psi = field;
                t_final = t;
                if delta != 0.0 {
                    energy += delta;
                    history.push(energy);
                }
            }
        }
    }

    // leave the returned field in Steiner normal form
    if let Some((field, delta, t)) = try_rearrange(&psi, energy)? {
        psi = field;
        t_final = t;
        if delta != 0.0 {
            energy += delta;
            history.push(energy);
        }
    }

    let (_, residual_final) = gradient_and_residual(&fun, &psi)?;
    let theta_star = fun.theta_from_psi(&psi);
    let beta_witness = fun.spectral().xs_norm_sq(&psi, fun.s());
    Ok(SolutionBundle {
        alpha: fun.energy(&psi),
        psi_star: psi,
        theta_star,
        t_final,
        energy_history: history,
        residual_final,
        beta_witness,
        iterations,
        stop_reason,
        config: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> SolveConfig {
        SolveConfig {
            n: 64,
            l: 8.0,
            r0: 2.0,
            w: 0.5,
            max_iter: 300,
            tol_residual: 1e-5,
            ..SolveConfig::default()
        }
    }

    #[test]
    fn init_guess_is_odd_and_admissible() {
        let cfg = SolveConfig::default();
        let psi = init_guess(&cfg).unwrap();
        assert_eq!(psi.reflect_r().add(&psi).max_abs(), 0.0);
        let fun = cfg.functional().unwrap();
        assert!(!fun.t_map(&psi).is_zero());
        assert!(fun.nehari_project(&psi, NEHARI_TOL).is_ok());
    }

    #[test]
    fn config_validation() {
        let mut cfg = small();
        cfg.sym_every = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = small();
        cfg.nu = 3.2;
        assert!(cfg.validate().is_err());
        let mut cfg = small();
        cfg.backtrack = 1.0;
        assert!(cfg.validate().is_err());
        assert!(small().validate().is_ok());
    }

    #[test]
    fn gradient_pairs_like_the_derivative() {
        let cfg = small();
        let fun = cfg.functional().unwrap();
        let grid = *fun.grid();
        let psi = init_guess(&cfg).unwrap().scaled(3.0);
        let grad = xs_gradient(&fun, &psi).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let h = ScalarField::from_values(grid, values).unwrap().symmetrize_odd_r();
            let lhs = fun.spectral().xs_inner(&grad, &h, fun.s());
            let rhs = fun.euler_lagrange_pairing(&psi, &h);
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(lhs.abs()));
        }
        // below the cut-off the potential term vanishes
        let tiny = psi.scaled(1e-3);
        assert_eq!(xs_gradient(&fun, &tiny).unwrap().values(), tiny.values());
    }

    #[test]
    fn small_solve_decreases_energy_and_stays_on_manifold() {
        let cfg = small();
        let bundle = solve(&cfg).unwrap();
        let tol = cfg.tol_energy;
        for w in bundle.energy_history.windows(2) {
            assert!(w[1] <= w[0] + tol * w[0].abs());
        }
        let fun = cfg.functional().unwrap();
        let psi = &bundle.psi_star;
        let pairing = fun.euler_lagrange_pairing(psi, psi);
        assert!(pairing.abs() < 1e-8 * bundle.beta_witness);
        assert!(bundle.alpha > 0.0 && bundle.beta_witness > 0.0);
        assert_eq!(psi.reflect_r().add(psi).max_abs(), 0.0);
    }
}
