//! Pseudo-spectral time stepping of the generalized SQG system
//! `d_t theta + v . grad theta = 0`, `v = grad^perp psi`, `(-Delta)^s psi = theta`.

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::spectral::{check_mean_zero, FracParams, Spectral};

/// Advective CFL number used for the step-size limit.
pub const CFL: f64 = 0.5;

/// Largest relative `wave_error` accepted as a traveling wave.
pub const WAVE_ERROR_MAX: f64 = 5e-2;

/// Cells travelled over the default check horizon.
pub const HORIZON_CELLS: f64 = 8.0;

/// Time for a wave of speed `c` to cross [`HORIZON_CELLS`] cells.
pub fn default_horizon(spectral: &Spectral, c: f64) -> f64 {
    HORIZON_CELLS * spectral.grid().spacing() / c
}

/// Half the CFL limit, capped so the horizon takes at least eight steps.
pub fn default_step(spectral: &Spectral, theta: &ScalarField, s: FracParams, horizon: f64) -> Result<f64> {
    let limit = 0.5 * cfl_limit(spectral, theta, s)?;
    Ok(if horizon > 0.0 { limit.min(horizon / 8.0) } else { limit })
}

/// `grad^perp (-Delta)^{-s} theta`.
pub fn velocity_from_theta(
    spectral: &Spectral,
    theta: &ScalarField,
    s: FracParams,
) -> Result<(ScalarField, ScalarField)> {
    let psi = spectral.inv_frac_laplacian(theta, s)?;
    Ok(spectral.gradient_perp(&psi))
}

/// Largest stable step `CFL h / max |v|` for the velocity induced by `theta`.
pub fn cfl_limit(spectral: &Spectral, theta: &ScalarField, s: FracParams) -> Result<f64> {
    let (vr, vz) = velocity_from_theta(spectral, theta, s)?;
    let speed = vr
        .values()
        .iter()
        .zip(vz.values())
        .map(|(a, b)| a.hypot(*b))
        .fold(0.0, f64::max);
    Ok(if speed > 0.0 {
        CFL * spectral.grid().spacing() / speed
    } else {
        f64::INFINITY
    })
}

struct Rhs<'a> {
    spectral: &'a Spectral,
    inv_multiplier: Vec<f64>,
    dealias: Vec<bool>,
}

impl<'a> Rhs<'a> {
    fn new(spectral: &'a Spectral, s: FracParams) -> Self {
        let n = spectral.grid().n();
        let cutoff = n as f64 / 3.0;
        let signed = |m: usize| if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
        let mut inv_multiplier = vec![0.0; n * n];
        let mut dealias = vec![false; n * n];
        for mr in 0..n {
            for mz in 0..n {
                let idx = mr * n + mz;
                let xi_sq = spectral.xi_sq(mr, mz);
                if xi_sq > 0.0 {
                    inv_multiplier[idx] = xi_sq.powf(-s.s());
                }
                dealias[idx] = signed(mr).abs() <= cutoff && signed(mz).abs() <= cutoff;
            }
        }
        Rhs {
            spectral,
            inv_multiplier,
            dealias,
        }
    }

    /// Fourier coefficients of `-v . grad theta`, with the product dealiased.
    fn eval(&self, theta_hat: &[Complex64]) -> Vec<Complex64> {
        let sp = self.spectral;
        let n = sp.grid().n();
        let mut vr = vec![Complex64::new(0.0, 0.0); n * n];
        let mut vz = vr.clone();
        let mut dr = vr.clone();
        let mut dz = vr.clone();
        for mr in 0..n {
            let kr = sp.derivative_factor(mr);
            for mz in 0..n {
                let idx = mr * n + mz;
                let kz = sp.derivative_factor(mz);
                let t = theta_hat[idx];
                let psi = t * self.inv_multiplier[idx];
                vr[idx] = -kz * psi;
                vz[idx] = kr * psi;
                dr[idx] = kr * t;
                dz[idx] = kz * t;
            }
        }
        let (vr, vz) = (sp.inverse_real(vr), sp.inverse_real(vz));
        let (dr, dz) = (sp.inverse_real(dr), sp.inverse_real(dz));
        let product = vr
            .zip_with(&dr, |a, b| a * b)
            .add(&vz.zip_with(&dz, |a, b| a * b));
        let mut out = sp.forward(&product);
        for (c, &keep) in out.iter_mut().zip(&self.dealias) {
            *c = if keep { -*c } else { Complex64::new(0.0, 0.0) };
        }
        out
    }
}

/// Classical RK4 from `theta0` to time `t_end` with steps no larger than `dt`.
pub fn evolve(
    spectral: &Spectral,
    theta0: &ScalarField,
    s: FracParams,
    t_end: f64,
    dt: f64,
) -> Result<ScalarField> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("horizon T = {t_end} must be non-negative")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step dt = {dt} must be positive")));
    }
    check_mean_zero(theta0)?;
    let limit = cfl_limit(spectral, theta0, s)?;
    if dt > limit {
        return Err(Error::CflViolation { dt, limit });
    }
    if t_end == 0.0 || theta0.is_zero() {
        return Ok(theta0.clone());
    }
    let steps = (t_end / dt).ceil() as usize;
    let h = t_end / steps as f64;
    let rhs = Rhs::new(spectral, s);
    let mut state = spectral.forward(theta0);
    let axpy = |base: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> {
        base.iter().zip(k).map(|(x, y)| x + y * a).collect()
    };
    for _ in 0..steps {
        let k1 = rhs.eval(&state);
        let k2 = rhs.eval(&axpy(&state, &k1, 0.5 * h));
        let k3 = rhs.eval(&axpy(&state, &k2, 0.5 * h));
        let k4 = rhs.eval(&axpy(&state, &k3, h));
        for (i, x) in state.iter_mut().enumerate() {
            *x += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    Ok(spectral.inverse_real(state))
}

/// `|theta(T) - shift_z(theta0, c T)| / |theta0|`: zero for a profile that
/// translates rigidly in `+z` at speed `c`.
pub fn wave_error(
    spectral: &Spectral,
    theta0: &ScalarField,
    s: FracParams,
    c: f64,
    t_end: f64,
    dt: f64,
) -> Result<f64> {
    let evolved = evolve(spectral, theta0, s, t_end, dt)?;
    Ok(shift_error(spectral, theta0, &evolved, c * t_end))
}

fn shift_error(spectral: &Spectral, theta0: &ScalarField, evolved: &ScalarField, dz: f64) -> f64 {
    let norm = theta0.l2_norm();
    if norm == 0.0 {
        return evolved.l2_norm();
    }
    let reference = if dz == 0.0 {
        theta0.clone()
    } else {
        spectral.shift_z(theta0, dz)
    };
    evolved.sub(&reference).l2_norm() / norm
}

#[derive(Debug, Clone, Serialize)]
pub struct WaveReport {
    pub horizon: f64,
    pub dt: f64,
    pub speed: f64,
    pub error: f64,
    pub threshold: f64,
    pub passed: bool,
    /// Error against a translation by twice the expected distance.
    pub wrong_speed_error: f64,
    /// Speed of the best-matching translation.
    pub fitted_speed: f64,
    pub fitted_error: f64,
    pub l2_drift: f64,
}

/// Evolves `theta0` once and compares against several translations of it.
pub fn wave_report(
    spectral: &Spectral,
    theta0: &ScalarField,
    s: FracParams,
    c: f64,
    t_end: f64,
    dt: f64,
) -> Result<WaveReport> {
    let evolved = evolve(spectral, theta0, s, t_end, dt)?;
    Ok(compare_with_translation(spectral, theta0, &evolved, c, t_end, dt))
}

/// The comparisons of [`wave_report`] for a field already evolved to `t_end`.
pub fn compare_with_translation(
    spectral: &Spectral,
    theta0: &ScalarField,
    evolved: &ScalarField,
    c: f64,
    t_end: f64,
    dt: f64,
) -> WaveReport {
    let err = |dz: f64| shift_error(spectral, theta0, evolved, dz);
    let (fitted_shift, fitted_error) = if t_end > 0.0 {
        golden_min(&err, 0.0, 3.0 * c * t_end)
    } else {
        (0.0, err(0.0))
    };
    let norm = theta0.l2_norm();
    let error = err(c * t_end);
    WaveReport {
        horizon: t_end,
        dt,
        speed: c,
        error,
        threshold: WAVE_ERROR_MAX,
        passed: error < WAVE_ERROR_MAX,
        wrong_speed_error: err(2.0 * c * t_end),
        fitted_speed: if t_end > 0.0 { fitted_shift / t_end } else { c },
        fitted_error,
        l2_drift: if norm > 0.0 { (evolved.l2_norm() - norm).abs() / norm } else { 0.0 },
    }
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if (b - a).abs() <= 1e-10 * (1.0 + b.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
