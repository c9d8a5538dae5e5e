//! Fourier-multiplier operators on the periodic grid and the free-space
//! Riesz potential.
//!
//! Wavenumbers are `xi = (pi / L) * m` with `m` in the centered range
//! `[-n/2, n/2)`. Transforms are unnormalized forward, `1/n^2` on inverse.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};

/// Mean tolerance for inverting the fractional Laplacian, relative to max |field|.
pub const MEAN_TOLERANCE: f64 = 1e-10;

/// Exponent `s` of `(-Delta)^s`, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FracParams(f64);

impl FracParams {
    pub fn new(s: f64) -> Result<Self> {
        if s > 0.0 && s < 1.0 {
            Ok(FracParams(s))
        } else {
            Err(Error::InvalidParameter(format!(
                "fractional exponent s = {s} must lie in (0, 1)"
            )))
        }
    }

    pub fn s(self) -> f64 {
        self.0
    }

    /// Far-field decay exponent `2(1 - s)` of the Riesz kernel.
    pub fn kernel_exponent(self) -> f64 {
        2.0 * (1.0 - self.0)
    }
}

impl TryFrom<f64> for FracParams {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        FracParams::new(s)
    }
}

impl From<FracParams> for f64 {
    fn from(p: FracParams) -> f64 {
        p.0
    }
}

/// FFT plans and wavenumber tables for one grid. Cheap to share: all methods
/// take `&self` and allocate their own scratch.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let base = PI / grid.half_width();
        let wavenumbers = (0..n).map(|m| base * signed_mode(m, n) as f64).collect();
        Spectral {
            grid,
            forward,
            inverse,
            wavenumbers,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Wavenumber of index `m` along either axis.
    pub fn wavenumber(&self, m: usize) -> f64 {
        self.wavenumbers[m]
    }

    fn is_nyquist(&self, m: usize) -> bool {
        m == self.grid.n() / 2
    }

    /// Unnormalized 2D DFT, same storage order as the field.
    pub fn forward(&self, field: &ScalarField) -> Vec<Complex64> {
        self.check_grid(field);
        let mut data: Vec<Complex64> = field
            .values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.transform_2d(&mut data, &self.forward);
        data
    }

    /// Inverse of [`Spectral::forward`]; keeps the real part.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> ScalarField {
        self.transform_2d(&mut spectrum, &self.inverse);
        let norm = 1.0 / self.grid.len() as f64;
        let values = spectrum.iter().map(|c| c.re * norm).collect();
        ScalarField::from_raw(self.grid, values)
    }

    fn transform_2d(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // z is contiguous: all rows at once
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, n);
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, n);
    }

    fn check_grid(&self, field: &ScalarField) {
        assert_eq!(
            field.grid(),
            &self.grid,
            "field grid does not match spectral grid"
        );
    }

    /// Applies `m(xi_r, xi_z)` in Fourier space.
    pub fn apply_multiplier(
        &self,
        field: &ScalarField,
        multiplier: impl Fn(usize, usize) -> Complex64,
    ) -> ScalarField {
        let n = self.grid.n();
        let mut spectrum = self.forward(field);
        for mr in 0..n {
            for mz in 0..n {
                spectrum[mr * n + mz] *= multiplier(mr, mz);
            }
        }
        self.inverse_real(spectrum)
    }

    /// `|xi|^2` of mode `(mr, mz)`.
    pub fn xi_sq(&self, mr: usize, mz: usize) -> f64 {
        let (a, b) = (self.wavenumbers[mr], self.wavenumbers[mz]);
        a * a + b * b
    }

    /// `(-Delta)^s` via the multiplier `|xi|^{2s}`; the zero mode is annihilated.
    pub fn frac_laplacian(&self, field: &ScalarField, s: FracParams) -> ScalarField {
        self.apply_multiplier(field, |mr, mz| {
            Complex64::new(power_or_zero(self.xi_sq(mr, mz), s.s()), 0.0)
        })
    }

    /// `-Delta` via the multiplier `|xi|^2`.
    pub fn neg_laplacian(&self, field: &ScalarField) -> ScalarField {
        self.apply_multiplier(field, |mr, mz| Complex64::new(self.xi_sq(mr, mz), 0.0))
    }

    /// `(-Delta)^{-s}` via `|xi|^{-2s}` with the zero mode set to 0. Fields
    /// with a non-negligible mean are rejected.
    pub fn inv_frac_laplacian(&self, field: &ScalarField, s: FracParams) -> Result<ScalarField> {
        check_mean_zero(field)?;
        Ok(self.apply_multiplier(field, |mr, mz| {
            Complex64::new(power_or_zero(self.xi_sq(mr, mz), -s.s()), 0.0)
        }))
    }

    /// Plancherel form of the `H^s` inner product, normalized so that
    /// `xs_inner(a, b) == (a * frac_laplacian(b)).integrate()`.
    pub fn xs_inner(&self, a: &ScalarField, b: &ScalarField, s: FracParams) -> f64 {
        let (fa, fb) = (self.forward(a), self.forward(b));
        self.spectral_inner(&fa, &fb, s)
    }

    pub fn xs_norm_sq(&self, field: &ScalarField, s: FracParams) -> f64 {
        let spectrum = self.forward(field);
        self.spectral_inner(&spectrum, &spectrum, s)
    }

    fn spectral_inner(&self, fa: &[Complex64], fb: &[Complex64], s: FracParams) -> f64 {
        let n = self.grid.n();
        let mut sum = 0.0;
        for mr in 0..n {
            for mz in 0..n {
                let idx = mr * n + mz;
                let w = power_or_zero(self.xi_sq(mr, mz), s.s());
                sum += w * (fa[idx] * fb[idx].conj()).re;
            }
        }
        sum * self.grid.cell_area() / self.grid.len() as f64
    }

    /// Spectral `d/dr`, Nyquist mode zeroed.
    pub fn d_dr(&self, field: &ScalarField) -> ScalarField {
        self.apply_multiplier(field, |mr, _| self.derivative_factor(mr))
    }

    /// Spectral `d/dz`, Nyquist mode zeroed.
    pub fn d_dz(&self, field: &ScalarField) -> ScalarField {
        self.apply_multiplier(field, |_, mz| self.derivative_factor(mz))
    }

    pub(crate) fn derivative_factor(&self, m: usize) -> Complex64 {
        if self.is_nyquist(m) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, self.wavenumbers[m])
        }
    }

    /// `grad^perp psi = (-d_z psi, d_r psi)`.
    pub fn gradient_perp(&self, psi: &ScalarField) -> (ScalarField, ScalarField) {
        let n = self.grid.n();
        let spectrum = self.forward(psi);
        let mut v_r = spectrum.clone();
        let mut v_z = spectrum;
        for mr in 0..n {
            for mz in 0..n {
                let idx = mr * n + mz;
                v_r[idx] *= -self.derivative_factor(mz);
                v_z[idx] *= self.derivative_factor(mr);
            }
        }
        (self.inverse_real(v_r), self.inverse_real(v_z))
    }

    /// Sub-cell periodic translation in `z`: output(z) = input(z - dz).
    pub fn shift_z(&self, field: &ScalarField, dz: f64) -> ScalarField {
        self.apply_multiplier(field, |_, mz| {
            let phase = -self.wavenumbers[mz] * dz;
            Complex64::new(phase.cos(), phase.sin())
        })
    }
}

fn signed_mode(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

fn power_or_zero(xi_sq: f64, exponent: f64) -> f64 {
    if xi_sq == 0.0 {
        0.0
    } else {
        xi_sq.powf(exponent)
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

pub(crate) fn check_mean_zero(field: &ScalarField) -> Result<()> {
    let mean = field.mean();
    let max = field.max_abs();
    if mean.abs() > MEAN_TOLERANCE * max {
        return Err(Error::NonZeroMean { mean, max });
    }
    Ok(())
}

/// Normalization of the two-dimensional Riesz potential inverting `(-Delta)^s`:
/// `Gamma(1 - s) / (4^s pi Gamma(s))`.
pub fn riesz_constant(s: FracParams) -> f64 {
    let s = s.s();
    gamma(1.0 - s) / (4f64.powf(s) * PI * gamma(s))
}

/// Free-space Riesz potential `K_s sum_y theta(y) |x - y|^{-2(1-s)} h^2` of a
/// compactly supported field at arbitrary points. Points within one cell of
/// the support are rejected.
pub fn riesz_far_eval(
    theta: &ScalarField,
    points: &[(f64, f64)],
    s: FracParams,
) -> Result<Vec<f64>> {
    let grid = theta.grid();
    let n = grid.n();
    let h = grid.spacing();
    let support: Vec<(f64, f64, f64)> = (0..n)
        .flat_map(|ir| (0..n).map(move |iz| (ir, iz)))
        .filter_map(|(ir, iz)| {
            let v = theta.get(ir, iz);
            (v != 0.0).then(|| (grid.coord(ir), grid.coord(iz), v))
        })
        .collect();
    let constant = riesz_constant(s) * grid.cell_area();
    let half_exponent = -0.5 * s.kernel_exponent();
    points
        .iter()
        .map(|&(r, z)| {
            let mut sum = 0.0;
            for &(yr, yz, v) in &support {
                let d_sq = (r - yr).powi(2) + (z - yz).powi(2);
                if d_sq <= h * h {
                    return Err(Error::PointOnSupport { r, z });
                }
                sum += v * d_sq.powf(half_exponent);
            }
            Ok(constant * sum)
        })
        .collect()
}
