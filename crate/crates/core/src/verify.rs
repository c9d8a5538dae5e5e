//! A posteriori checks on a computed solution: PDE residual, symmetries,
//! compact support, monotonicity in `|z|`, and far-field decay.

use serde::Serialize;

use crate::energy::{Functional, WaveParams};
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::minimizer::SolutionBundle;
use crate::spectral::{riesz_far_eval, FracParams, Spectral};

pub const PDE_RESIDUAL_MAX: f64 = 1e-6;
pub const SYMMETRY_MAX: f64 = 1e-12;
pub const MONOTONE_SLACK: f64 = 1e-12;
pub const SUPPORT_THRESHOLD: f64 = 1e-10;
/// Required distance from the support to the domain edge, as a fraction of `L`.
pub const MARGIN_FRACTION: f64 = 0.1;
const DECAY_ANGLES: usize = 64;

/// `|(-Delta)^s psi - theta|_{L^2} / |theta|_{L^2}`.
pub fn pde_residual(
    spectral: &Spectral,
    psi: &ScalarField,
    theta: &ScalarField,
    s: FracParams,
) -> Result<f64> {
    if theta.is_zero() {
        return Err(Error::ZeroTheta);
    }
    let lhs = spectral.frac_laplacian(psi, s);
    Ok(lhs.sub(theta).l2_norm() / theta.l2_norm())
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    /// `max |theta + theta o sigma| / max |theta|`.
    pub odd_r_defect: f64,
    /// `max |theta(r, z) - theta(r, -z)| / max |theta|`.
    pub even_z_defect: f64,
    pub passed: bool,
}

pub fn symmetry_report(theta: &ScalarField) -> SymmetryReport {
    let max = theta.max_abs();
    let (odd, even) = if max == 0.0 {
        (0.0, 0.0)
    } else {
        (
            theta.add(&theta.reflect_r()).max_abs() / max,
            theta.sub(&theta.reflect_z()).max_abs() / max,
        )
    };
    SymmetryReport {
        odd_r_defect: odd,
        even_z_defect: even,
        passed: odd <= SYMMETRY_MAX && even <= SYMMETRY_MAX,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundingBox {
    pub r_min: f64,
    pub r_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportReport {
    /// Number of cells in the vorticity zone on `r >= 0`.
    pub cells: usize,
    /// `None` when the zone is empty.
    pub bounding_box: Option<BoundingBox>,
    pub area: f64,
    /// Distance from the support (and its mirror image) to the edge of the domain.
    pub margin: f64,
    pub margin_ok: bool,
    /// Smallest `r` in the zone.
    pub strip_half_width: f64,
    pub strip_ok: bool,
    /// `k^{-2/(1-s)} int_{r >= 0} psi_+^{2/(1-s)}`, an upper bound for the area.
    pub area_bound: f64,
    pub area_bound_ok: bool,
    pub passed: bool,
}

/// Describes `{theta > 1e-10 max theta}` on the half-plane.
pub fn support_report(
    psi: &ScalarField,
    theta: &ScalarField,
    wave: WaveParams,
    s: FracParams,
) -> Result<SupportReport> {
    let grid = *theta.grid();
    let n = grid.n();
    let l = grid.half_width();
    let h = grid.spacing();
    let max = theta.values().iter().cloned().fold(0.0, f64::max);
    let q = 2.0 / (1.0 - s.s());
    let area_bound = psi.map(|v| v.max(0.0).powf(q)).integrate_half() / wave.k().powf(q);

    let mut cells = 0;
    let mut bbox: Option<BoundingBox> = None;
    if max > 0.0 {
        let threshold = SUPPORT_THRESHOLD * max;
        for ir in grid.center()..n {
            let r = grid.coord(ir);
            for iz in 0..n {
                if theta.get(ir, iz) > threshold {
                    cells += 1;
                    let z = grid.coord(iz);
                    let b = bbox.get_or_insert(BoundingBox {
                        r_min: r,
                        r_max: r,
                        z_min: z,
                        z_max: z,
                    });
                    b.r_min = b.r_min.min(r);
                    b.r_max = b.r_max.max(r);
                    b.z_min = b.z_min.min(z);
                    b.z_max = b.z_max.max(z);
                }
            }
        }
    }
    let area = cells as f64 * grid.cell_area();
    let Some(b) = bbox else {
        return Ok(SupportReport {
            cells: 0,
            bounding_box: None,
            area: 0.0,
            margin: l,
            margin_ok: true,
            strip_half_width: 0.0,
            strip_ok: false,
            area_bound,
            area_bound_ok: true,
            passed: false,
        });
    };
    let margin = (l - b.r_max).min(b.z_min + l).min(l - b.z_max);
    if margin < 2.0 * h {
        return Err(Error::SupportTouchesBoundary {
            margin,
            min: 2.0 * h,
        });
    }
    let margin_ok = margin >= MARGIN_FRACTION * l;
    let strip_ok = b.r_min > 0.0;
    let area_bound_ok = area <= area_bound * (1.0 + 1e-12);
    Ok(SupportReport {
        cells,
        bounding_box: Some(b),
        area,
        margin,
        margin_ok,
        strip_half_width: b.r_min,
        strip_ok,
        area_bound,
        area_bound_ok,
        passed: margin_ok && strip_ok && area_bound_ok,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    /// Largest increase away from `z = 0`, relative to `max |theta|`.
    pub worst_violation: f64,
    pub worst_r: f64,
    pub passed: bool,
}

/// Checks that `theta(r, .)` is non-increasing in `|z|` on every line `r >= 0`.
pub fn z_monotonicity(theta: &ScalarField) -> MonotonicityReport {
    let grid = *theta.grid();
    let n = grid.n();
    let c = grid.center();
    let max = theta.max_abs();
    let mut worst = 0.0f64;
    let mut worst_r = 0.0;
    if max > 0.0 {
        for ir in c..n {
            let line = theta.line(ir);
            let mut line_worst = 0.0f64;
            for iz in c..n - 1 {
                line_worst = line_worst.max(line[iz + 1] - line[iz]);
            }
            for iz in 1..=c {
                line_worst = line_worst.max(line[iz - 1] - line[iz]);
            }
            if line_worst / max > worst {
                worst = line_worst / max;
                worst_r = grid.coord(ir);
            }
        }
    }
    MonotonicityReport {
        worst_violation: worst,
        worst_r,
        passed: worst <= MONOTONE_SLACK,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    /// `max |psi~|` over each circle.
    pub max_values: Vec<f64>,
    pub slope: f64,
    /// `-2(1 - s)`.
    pub expected_slope: f64,
    pub tolerance: f64,
    /// Exponent of an odd (dipolar) source, `-(2(1 - s) + 1)`, for comparison.
    pub dipole_slope: f64,
    /// `sup |psi~(x)| (1 + |x|^{2(1-s)})` over the samples.
    pub c_witness: f64,
    pub passed: bool,
}

/// Far-field decay tolerance for the fitted exponent: 0.1 at `s = 1/2`, 0.15 at `s = 1/4`.
pub fn decay_tolerance(s: FracParams) -> f64 {
    0.2 * (1.0 - s.s())
}

/// Fits the decay exponent of the free-space potential of `theta` on
/// circles of radius `R0, 2 R0, 4 R0, 8 R0`, `R0` twice the support radius.
pub fn decay_report(theta: &ScalarField, s: FracParams) -> Result<DecayReport> {
    if theta.is_zero() {
        return Err(Error::ZeroTheta);
    }
    let grid = *theta.grid();
    let n = grid.n();
    let mut support_radius = 0.0f64;
    for ir in 0..n {
        for iz in 0..n {
            if theta.get(ir, iz) != 0.0 {
                support_radius = support_radius.max(grid.coord(ir).hypot(grid.coord(iz)));
            }
        }
    }
    let r0 = 2.0 * support_radius.max(grid.spacing());
    let radii: Vec<f64> = (0..4).map(|i| r0 * 2f64.powi(i)).collect();
    let exponent = s.kernel_exponent();
    let mut max_values = Vec::with_capacity(radii.len());
    let mut c_witness = 0.0f64;
    for &radius in &radii {
        // half-step offset keeps samples off the axis, where the potential vanishes
        let points: Vec<(f64, f64)> = (0..DECAY_ANGLES)
            .map(|j| {
                let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / DECAY_ANGLES as f64;
                (radius * phi.cos(), radius * phi.sin())
            })
            .collect();
        let values = riesz_far_eval(theta, &points, s)?;
        let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        c_witness = c_witness.max(peak * (1.0 + radius.powf(exponent)));
        max_values.push(peak);
    }
    let slope = fit_slope(
        &radii.iter().map(|r| r.ln()).collect::<Vec<_>>(),
        &max_values.iter().map(|v| v.ln()).collect::<Vec<_>>(),
    );
    let expected = -exponent;
    let tolerance = decay_tolerance(s);
    Ok(DecayReport {
        radii,
        max_values,
        slope,
        expected_slope: expected,
        tolerance,
        dipole_slope: -(exponent + 1.0),
        c_witness,
        passed: (slope - expected).abs() <= tolerance,
    })
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralDecay {
    /// Fitted `gamma` in `max_{|xi| in shell} |psi^(xi)| ~ exp(-gamma |xi|)`.
    pub rate: f64,
    /// Largest `|xi|` whose shell is above the round-off floor.
    pub resolved_xi: f64,
}

/// Exponential decay rate of the Fourier coefficients, a smoothness
/// diagnostic with no pass/fail attached.
pub fn spectral_decay(spectral: &Spectral, psi: &ScalarField) -> SpectralDecay {
    let grid = *spectral.grid();
    let n = grid.n();
    let coeffs = spectral.forward(psi);
    let dxi = spectral.wavenumber(1);
    let shells = n / 2;
    let mut peak = vec![0.0f64; shells];
    for mr in 0..n {
        for mz in 0..n {
            let shell = (spectral.xi_sq(mr, mz).sqrt() / dxi).round() as usize;
            if shell < shells {
                peak[shell] = peak[shell].max(coeffs[mr * n + mz].norm());
            }
        }
    }
    let top = peak.iter().cloned().fold(0.0, f64::max);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, &p) in peak.iter().enumerate().skip(1) {
        if p > 1e-13 * top {
            xs.push(i as f64 * dxi);
            ys.push(p.ln());
        }
    }
    let rate = if xs.len() >= 2 { -fit_slope(&xs, &ys) } else { 0.0 };
    SpectralDecay {
        rate,
        resolved_xi: xs.last().copied().unwrap_or(0.0),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueCheck {
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub pde_residual: Option<ValueCheck>,
    pub symmetry: SymmetryReport,
    pub support: Option<SupportReport>,
    pub z_monotonicity: MonotonicityReport,
    pub decay: Option<DecayReport>,
    pub spectral_decay: SpectralDecay,
    pub alpha: f64,
    pub beta_witness: f64,
    pub alpha_positive: bool,
    /// Errors raised by individual checks; each one counts as a failure.
    pub errors: Vec<String>,
    pub all_passed: bool,
}

/// Runs every check on a bundle. Check failures are recorded, not raised.
pub fn verify_bundle(bundle: &SolutionBundle) -> Result<VerifyReport> {
    verify_bundle_with(bundle, true)
}

/// As [`verify_bundle`]; with `check_decay` false the far-field decay is
/// neither computed nor counted.
pub fn verify_bundle_with(bundle: &SolutionBundle, check_decay: bool) -> Result<VerifyReport> {
    let fun: Functional = bundle.config.functional()?;
    let s = fun.s();
    let psi = &bundle.psi_star;
    let theta = &bundle.theta_star;
    let mut errors = Vec::new();

    let pde = match pde_residual(fun.spectral(), psi, theta, s) {
        Ok(value) => Some(ValueCheck {
            value,
            threshold: PDE_RESIDUAL_MAX,
            passed: value < PDE_RESIDUAL_MAX,
        }),
        Err(e) => {
            errors.push(format!("pde_residual: {e}"));
            None
        }
    };
    let symmetry = symmetry_report(theta);
    let support = match support_report(psi, theta, fun.wave(), s) {
        Ok(r) => Some(r),
        Err(e) => {
            errors.push(format!("support: {e}"));
            None
        }
    };
    let z_monotonicity = z_monotonicity(theta);
    let decay = if check_decay {
        match decay_report(theta, s) {
            Ok(r) => Some(r),
            Err(e) => {
                errors.push(format!("decay: {e}"));
                None
            }
        }
    } else {
        None
    };
    let spectral_decay = spectral_decay(fun.spectral(), psi);
    let alpha = fun.energy(psi);
    let beta_witness = fun.spectral().xs_norm_sq(psi, s);

    let all_passed = errors.is_empty()
        && pde.as_ref().is_some_and(|c| c.passed)
        && symmetry.passed
        && support.as_ref().is_some_and(|r| r.passed)
        && z_monotonicity.passed
        && (!check_decay || decay.as_ref().is_some_and(|r| r.passed))
        && alpha > 0.0
        && beta_witness > 0.0;
    Ok(VerifyReport {
        pde_residual: pde,
        symmetry,
        support,
        z_monotonicity,
        decay,
        spectral_decay,
        alpha,
        beta_witness,
        alpha_positive: alpha > 0.0,
        errors,
        all_passed,
    })
}
