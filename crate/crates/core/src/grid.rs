//! Uniform periodic grids on `[-L, L]^2` and real scalar fields living on them.
//!
//! Coordinates are `(r, z)`. Storage is row-major with `z` fastest:
//! `values[i_r * n + i_z]`. Index `n / 2` on either axis is the line `0`,
//! so the reflection `i -> (n - i) mod n` maps grid points to grid points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    half_width: f64,
}

impl Grid {
    /// `n` points per axis (a power of two, at least 4) on `[-half_width, half_width)^2`.
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size n = {n} must be a power of two >= 4"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "half-width L = {half_width} must be positive"
            )));
        }
        Ok(Grid { n, half_width })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the `0` line on either axis.
    pub fn center(&self) -> usize {
        self.n / 2
    }

    /// Coordinate of index `i`. Computed as `(i - n/2) h`, so that mirrored
    /// indices give exactly negated coordinates.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.spacing()
    }

    pub fn index(&self, ir: usize, iz: usize) -> usize {
        ir * self.n + iz
    }

    pub fn mirror(&self, i: usize) -> usize {
        (self.n - i) % self.n
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "field values must be finite, found {bad}"
            )));
        }
        Ok(ScalarField { grid, values })
    }

    /// Samples `f(r, z)` at every grid point.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for ir in 0..n {
            let r = grid.coord(ir);
            for iz in 0..n {
                values.push(f(r, grid.coord(iz)));
            }
        }
        ScalarField { grid, values }
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, ir: usize, iz: usize) -> f64 {
        self.values[self.grid.index(ir, iz)]
    }

    pub fn set(&mut self, ir: usize, iz: usize, value: f64) {
        let idx = self.grid.index(ir, iz);
        self.values[idx] = value;
    }

    /// The `z`-line at fixed `r` index.
    pub fn line(&self, ir: usize) -> &[f64] {
        let n = self.grid.n();
        &self.values[ir * n..(ir + 1) * n]
    }

    pub fn line_mut(&mut self, ir: usize) -> &mut [f64] {
        let n = self.grid.n();
        &mut self.values[ir * n..(ir + 1) * n]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| factor * v)
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + alpha * other`
    pub fn axpy(&self, alpha: f64, other: &ScalarField) -> Self {
        self.zip_with(other, |a, b| a + alpha * b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Discrete `L^2` inner product `sum a b h^2`.
    pub fn dot(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        sum * self.grid.cell_area()
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// `Psi(r, z) -> Psi(-r, z)` on grid indices.
    pub fn reflect_r(&self) -> Self {
        let n = self.grid.n();
        let mut out = ScalarField::zeros(self.grid);
        for ir in 0..n {
            out.line_mut(ir).copy_from_slice(self.line(self.grid.mirror(ir)));
        }
        out
    }

    /// `Psi(r, z) -> Psi(r, -z)` on grid indices.
    pub fn reflect_z(&self) -> Self {
        let n = self.grid.n();
        let mut out = ScalarField::zeros(self.grid);
        for ir in 0..n {
            let src = self.line(ir);
            let dst = out.line_mut(ir);
            for (iz, v) in dst.iter_mut().enumerate() {
                *v = src[(n - iz) % n];
            }
        }
        out
    }

    /// Periodic translation in `z` by a whole number of cells: the output at
    /// `z` equals the input at `z - cells * h`.
    pub fn shift_z_cells(&self, cells: isize) -> Self {
        let n = self.grid.n() as isize;
        let mut out = ScalarField::zeros(self.grid);
        for ir in 0..self.grid.n() {
            let src = self.line(ir);
            let dst = out.line_mut(ir);
            for (iz, v) in dst.iter_mut().enumerate() {
                *v = src[(iz as isize - cells).rem_euclid(n) as usize];
            }
        }
        out
    }

    /// Projection `(Psi - Psi o sigma) / 2` onto fields odd in `r`.
    pub fn symmetrize_odd_r(&self) -> Self {
        let n = self.grid.n();
        let mut out = ScalarField::zeros(self.grid);
        for ir in 0..n {
            let mirror = self.line(self.grid.mirror(ir));
            let own = self.line(ir);
            for ((dst, &a), &b) in out.line_mut(ir).iter_mut().zip(own).zip(mirror) {
                *dst = 0.5 * (a - b);
            }
        }
        out
    }

    /// Cell-sum quadrature over the whole grid.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    /// Cell-sum quadrature over the half-plane `r >= 0`, the `r = 0` line
    /// weighted by one half.
    pub fn integrate_half(&self) -> f64 {
        let c = self.grid.center();
        let mut sum = 0.5 * self.line(c).iter().sum::<f64>();
        for ir in c + 1..self.grid.n() {
            sum += self.line(ir).iter().sum::<f64>();
        }
        sum * self.grid.cell_area()
    }

    /// Mean value over the domain.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Half-plane quadrature weight for line `ir`: 1 for `r > 0`, 1/2 on `r = 0`,
/// 0 for `r < 0`.
pub(crate) fn half_plane_weight(grid: &Grid, ir: usize) -> f64 {
    use std::cmp::Ordering;
    match ir.cmp(&grid.center()) {
        Ordering::Greater => 1.0,
        Ordering::Equal => 0.5,
        Ordering::Less => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(32, 4.0).unwrap()
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(Grid::new(6, 1.0).is_err());
        assert!(Grid::new(2, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        let g = Grid::new(16, 3.0).unwrap();
        assert_eq!(g.spacing() * g.n() as f64, 6.0);
        assert_eq!(g.coord(g.center()), 0.0);
        assert_eq!(g.coord(0), -3.0);
        for i in 1..16 {
            assert_eq!(g.coord(g.mirror(i)), -g.coord(i));
        }
    }

    #[test]
    fn reflect_r_of_odd_field_negates() {
        let f = ScalarField::from_fn(grid(), |r, z| r * (1.0 + z * z));
        let reflected = f.reflect_r();
        // index 0 (r = -L) is its own mirror and not odd; skip it
        for ir in 1..32 {
            for iz in 0..32 {
                assert_eq!(reflected.get(ir, iz), -f.get(ir, iz));
            }
        }
    }

    #[test]
    fn reflect_r_is_an_involution_and_fixes_constants() {
        let f = ScalarField::from_fn(grid(), |r, z| (r + 0.3).sin() * z.cos() + r * z);
        assert_eq!(f.reflect_r().reflect_r(), f);
        let c = ScalarField::from_fn(grid(), |_, _| 2.5);
        assert_eq!(c.reflect_r(), c);
    }

    #[test]
    fn symmetrize_odd_projection() {
        let g = grid();
        let odd = ScalarField::from_fn(g, |r, z| r.powi(3) * (-z * z).exp()).symmetrize_odd_r();
        assert_eq!(odd.symmetrize_odd_r(), odd);
        let even = ScalarField::from_fn(g, |r, z| r * r + z);
        assert!(even.symmetrize_odd_r().is_zero());
        let linear = ScalarField::from_fn(g, |r, _| r);
        let sym = linear.symmetrize_odd_r();
        for ir in 1..32 {
            for iz in 0..32 {
                assert_eq!(sym.get(ir, iz), linear.get(ir, iz));
            }
        }
        for iz in 0..32 {
            assert_eq!(sym.get(g.center(), iz), 0.0);
        }
    }

    #[test]
    fn integrate_constant_and_odd() {
        let g = grid();
        let one = ScalarField::from_fn(g, |_, _| 1.0);
        assert!((one.integrate() - 64.0).abs() < 1e-12);
        let odd = ScalarField::from_fn(g, |r, z| r * (z + 1.0)).symmetrize_odd_r();
        assert!(odd.integrate().abs() < 1e-12);
        let f = ScalarField::from_fn(g, |r, z| (r - 0.7).exp() * z.cos());
        assert!((f.reflect_r().integrate() - f.integrate()).abs() < 1e-10);
    }

    #[test]
    fn integrate_gaussian_mass() {
        // A exp(-|x|^2 / w^2) has mass pi w^2 A on the plane.
        let g = Grid::new(128, 8.0).unwrap();
        let (a, w) = (1.7, 0.9);
        let f = ScalarField::from_fn(g, |r, z| a * (-(r * r + z * z) / (w * w)).exp());
        assert!((f.integrate() - PI * w * w * a).abs() < 1e-10);
    }

    #[test]
    fn integrate_half_of_even_field_is_half() {
        let g = grid();
        let f = ScalarField::from_fn(g, |r, z| (-4.0 * r * r - 0.5 * z * z).exp());
        // the r = -L line has no partner; its weight is negligible here
        assert!((2.0 * f.integrate_half() - f.integrate()).abs() < 1e-10);
    }

    #[test]
    fn shift_and_reflection_commute() {
        let f = ScalarField::from_fn(grid(), |r, z| (r + 0.2 * z).sin() + r * z);
        let a = f.symmetrize_odd_r().shift_z_cells(3);
        let b = f.shift_z_cells(3).symmetrize_odd_r();
        assert_eq!(a, b);
        assert_eq!(f.reflect_r().shift_z_cells(-5), f.shift_z_cells(-5).reflect_r());
    }
}
