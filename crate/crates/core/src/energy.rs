//! The energy `E = 1/2 |psi|^2_{X^s} - 2 V(psi)` on odd-in-`r` fields, the
//! cut-off map, the ansatz `psi -> theta`, and projection onto the Nehari
//! manifold `{E'(psi) psi = 0}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{half_plane_weight, Grid, ScalarField};
use crate::nonlinearity::Nonlin;
use crate::spectral::{FracParams, Spectral};

/// Default relative tolerance of the Nehari projection.
pub const NEHARI_TOL: f64 = 1e-10;

const MAX_BRACKET_STEPS: usize = 60;

/// Wave speed `c` and cut-off level `k`, both positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWave")]
pub struct WaveParams {
    c: f64,
    k: f64,
}

#[derive(Deserialize)]
struct RawWave {
    c: f64,
    k: f64,
}

impl TryFrom<RawWave> for WaveParams {
    type Error = Error;
    fn try_from(raw: RawWave) -> Result<Self> {
        WaveParams::new(raw.c, raw.k)
    }
}

impl WaveParams {
    pub fn new(c: f64, k: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("wave speed c = {c} must be positive")));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("cut-off k = {k} must be positive")));
        }
        Ok(WaveParams { c, k })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `c r + k`.
    pub fn offset(&self, r: f64) -> f64 {
        self.c * r + self.k
    }
}

#[derive(Debug, Clone)]
pub struct NehariResult {
    /// The scalar `t` with `t psi` on the manifold.
    pub t: f64,
    /// `t psi`.
    pub field: ScalarField,
    /// `g(t) / |psi|^2`.
    pub g_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NehariBounds {
    pub xs_norm_sq: f64,
    pub energy: f64,
    /// `|psi|^2 / E`.
    pub ratio: f64,
    /// `E'(psi) psi / |psi|^2`.
    pub nehari_residual: f64,
    /// `E >= mu / (2 (mu + 1)) |psi|^2`.
    pub mu_bound_holds: bool,
    /// `E >= (mu - 1) / (2 (mu + 1)) |psi|^2`, which follows from
    /// `(mu + 1) F(xi) <= xi f(xi)`.
    pub shifted_bound_holds: bool,
    /// `|psi|^2 <= (1 + 1/mu) E`.
    pub stated_ratio_holds: bool,
    pub beta_witness_positive: bool,
}

/// Everything needed to evaluate `E` and its derivatives on one grid.
#[derive(Debug, Clone)]
pub struct Functional {
    spectral: Spectral,
    s: FracParams,
    wave: WaveParams,
    nonlin: Nonlin,
}

impl Functional {
    pub fn new(grid: Grid, s: FracParams, wave: WaveParams, nonlin: Nonlin) -> Self {
        Functional {
            spectral: Spectral::new(grid),
            s,
            wave,
            nonlin,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.spectral.grid()
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn s(&self) -> FracParams {
        self.s
    }

    pub fn wave(&self) -> WaveParams {
        self.wave
    }

    pub fn nonlin(&self) -> &Nonlin {
        &self.nonlin
    }

    /// Calls `visit(index, offset c r + k, quadrature weight)` for every cell
    /// of the closed half-plane `r >= 0`.
    fn for_half_plane(&self, mut visit: impl FnMut(usize, f64, f64)) {
        let grid = *self.grid();
        let n = grid.n();
        for ir in grid.center()..n {
            let w = half_plane_weight(&grid, ir);
            let a = self.wave.offset(grid.coord(ir));
            for iz in 0..n {
                visit(grid.index(ir, iz), a, w);
            }
        }
    }

    /// Odd extension of `(psi - c r - k)_+` from the half-plane.
    pub fn t_map(&self, psi: &ScalarField) -> ScalarField {
        self.signed_profile(psi, |xi| xi.max(0.0))
    }

    /// `theta = f(psi - c r - k)` on `r >= 0`, `-f(-psi + c r - k)` on `r < 0`.
    pub fn theta_from_psi(&self, psi: &ScalarField) -> ScalarField {
        self.signed_profile(psi, |xi| self.nonlin.f(xi))
    }

    fn signed_profile(&self, psi: &ScalarField, g: impl Fn(f64) -> f64) -> ScalarField {
        let grid = *psi.grid();
        let n = grid.n();
        let c = grid.center();
        let mut out = ScalarField::zeros(grid);
        for ir in 0..n {
            let r = grid.coord(ir);
            let src = psi.line(ir);
            let dst = out.line_mut(ir);
            if ir >= c {
                let a = self.wave.offset(r);
                for (d, &v) in dst.iter_mut().zip(src) {
                    *d = g(v - a);
                }
            } else {
                for (d, &v) in dst.iter_mut().zip(src) {
                    *d = -g(-v + self.wave.c * r - self.wave.k);
                }
            }
        }
        out
    }

    /// `V(psi) = int_{r >= 0} F(psi - c r - k)`.
    pub fn potential(&self, psi: &ScalarField) -> f64 {
        let values = psi.values();
        let mut sum = 0.0;
        self.for_half_plane(|i, a, w| {
            if w > 0.0 {
                sum += w * self.nonlin.antiderivative(values[i] - a);
            }
        });
        sum * self.grid().cell_area()
    }

    pub fn energy(&self, psi: &ScalarField) -> f64 {
        0.5 * self.spectral.xs_norm_sq(psi, self.s) - 2.0 * self.potential(psi)
    }

    /// `E'(psi) h = <psi, h>_{X^s} - 2 int_{r >= 0} f(psi - c r - k) h`.
    pub fn euler_lagrange_pairing(&self, psi: &ScalarField, h: &ScalarField) -> f64 {
        let (p, hv) = (psi.values(), h.values());
        let mut sum = 0.0;
        self.for_half_plane(|i, a, w| {
            if w > 0.0 {
                sum += w * self.nonlin.f(p[i] - a) * hv[i];
            }
        });
        self.spectral.xs_inner(psi, h, self.s) - 2.0 * sum * self.grid().cell_area()
    }

    /// `E(new) - E(old)` without cancellation between the two energies.
    pub fn energy_diff(&self, old: &ScalarField, new: &ScalarField) -> f64 {
        let quad = 0.5 * self.spectral.xs_inner(&new.sub(old), &new.add(old), self.s);
        let (o, nv) = (old.values(), new.values());
        let mut sum = 0.0;
        self.for_half_plane(|i, a, w| {
            if w > 0.0 {
                sum += w * self.nonlin.antiderivative_diff(o[i] - a, nv[i] - a);
            }
        });
        quad - 2.0 * sum * self.grid().cell_area()
    }

    fn ray(&self, psi: &ScalarField) -> Ray<'_> {
        let values = psi.values();
        let mut cells = Vec::new();
        self.for_half_plane(|i, a, w| {
            if w > 0.0 && values[i] > 0.0 {
                cells.push((values[i], a, w));
            }
        });
        Ray {
            nonlin: &self.nonlin,
            norm_sq: self.spectral.xs_norm_sq(psi, self.s),
            area: self.grid().cell_area(),
            cells,
        }
    }

    /// `g(t) = E'(t psi)(t psi) / t^2`. Satisfies `t g(t) = d/dt E(t psi)`.
    pub fn g_eval(&self, t: f64, psi: &ScalarField) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
        }
        Ok(self.ray(psi).g(t))
    }

    /// Finds the unique `t > 0` with `t psi` on the Nehari manifold.
    pub fn nehari_project(&self, psi: &ScalarField, tol: f64) -> Result<NehariResult> {
        self.nehari_project_from(psi, tol, 1.0)
    }

    /// As [`Functional::nehari_project`], starting the search at `t0`.
    pub fn nehari_project_from(&self, psi: &ScalarField, tol: f64, t0: f64) -> Result<NehariResult> {
        let ray = self.ray(psi);
        if ray.cells.is_empty() {
            return Err(Error::NotAdmissible(
                "psi has no positive values on the half-plane r > 0".into(),
            ));
        }
        if !(ray.norm_sq > 0.0) {
            return Err(Error::NotAdmissible("psi has zero X^s norm".into()));
        }
        let target = tol * ray.norm_sq;
        let t0 = if t0 > 0.0 && t0.is_finite() { t0 } else { 1.0 };

        // bracket lo < t < hi with g(lo) > 0 >= g(hi)
        let g0 = ray.g(t0);
        let (mut lo, mut hi) = (t0, t0);
        let mut steps = 0;
        if g0 > 0.0 {
            loop {
                hi *= 2.0;
                steps += 1;
                if ray.g(hi) <= 0.0 {
                    break;
                }
                if steps >= MAX_BRACKET_STEPS {
                    return Err(Error::NotAdmissible(format!(
                        "g stays positive up to t = {hi:e}"
                    )));
                }
                lo = hi;
            }
        } else {
            loop {
                lo *= 0.5;
                steps += 1;
                if ray.g(lo) > 0.0 {
                    break;
                }
                if steps >= MAX_BRACKET_STEPS {
                    return Err(Error::NotAdmissible(format!(
                        "g stays non-positive down to t = {lo:e}"
                    )));
                }
                hi = lo;
            }
        }

        // safeguarded Newton on the bracket
        let mut t = if t0 > lo && t0 < hi { t0 } else { 0.5 * (lo + hi) };
        let mut gt = ray.g(t);
        for _ in 0..200 {
            if gt.abs() <= target {
                break;
            }
            if gt > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
            let slope = ray.g_prime(t);
            let newton = t - gt / slope;
            t = if slope < 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            gt = ray.g(t);
        }
        Ok(NehariResult {
            t,
            field: psi.scaled(t),
            g_residual: gt / ray.norm_sq,
        })
    }

    /// Energy lower bounds for a field lying on the manifold.
    pub fn nehari_bounds_check(&self, psi: &ScalarField, tol: f64) -> Result<NehariBounds> {
        let norm_sq = self.spectral.xs_norm_sq(psi, self.s);
        if !(norm_sq > 0.0) {
            return Err(Error::NotOnNehari { residual: f64::NAN });
        }
        let residual = self.euler_lagrange_pairing(psi, psi) / norm_sq;
        if residual.abs() > tol {
            return Err(Error::NotOnNehari { residual });
        }
        let energy = self.energy(psi);
        let mu = self.nonlin.mu();
        let slack = tol * norm_sq;
        Ok(NehariBounds {
            xs_norm_sq: norm_sq,
            energy,
            ratio: norm_sq / energy,
            nehari_residual: residual,
            mu_bound_holds: energy >= mu / (2.0 * (mu + 1.0)) * norm_sq - slack,
            shifted_bound_holds: energy >= (mu - 1.0) / (2.0 * (mu + 1.0)) * norm_sq - slack,
            stated_ratio_holds: norm_sq <= (1.0 + 1.0 / mu) * energy + slack,
            beta_witness_positive: norm_sq > 0.0,
        })
    }
}

/// `psi` restricted to the cells that can reach the support of `f` along the
/// ray `t psi`.
struct Ray<'a> {
    nonlin: &'a Nonlin,
    norm_sq: f64,
    area: f64,
    cells: Vec<(f64, f64, f64)>,
}

impl Ray<'_> {
    fn g(&self, t: f64) -> f64 {
        let sum: f64 = self
            .cells
            .iter()
            .map(|&(v, a, w)| w * self.nonlin.f(t * v - a) * v)
            .sum();
        self.norm_sq - 2.0 / t * sum * self.area
    }

    fn g_prime(&self, t: f64) -> f64 {
        let (mut s0, mut s1) = (0.0, 0.0);
        for &(v, a, w) in &self.cells {
            let xi = t * v - a;
            s0 += w * self.nonlin.f(xi) * v;
            s1 += w * self.nonlin.f_prime(xi) * v * v;
        }
        (2.0 / (t * t) * s0 - 2.0 / t * s1) * self.area
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rearrange::{polarize, steiner};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn functional(n: usize, l: f64) -> Functional {
        let s = FracParams::new(0.5).unwrap();
        Functional::new(
            Grid::new(n, l).unwrap(),
            s,
            WaveParams::new(1.0, 0.5).unwrap(),
            Nonlin::new(2.0, 1.5, s).unwrap(),
        )
    }

    /// Odd sum of a few Gaussian bumps, some positive on `r > 0`.
    fn random_admissible(grid: Grid, rng: &mut ChaCha8Rng) -> ScalarField {
        let l = grid.half_width();
        let bumps: Vec<(f64, f64, f64, f64)> = (0..4)
            .map(|i| {
                let amp = if i == 0 { rng.gen_range(1.0..4.0) } else { rng.gen_range(-2.0..3.0) };
                (
                    amp,
                    rng.gen_range(0.1 * l..0.6 * l),
                    rng.gen_range(-0.5 * l..0.5 * l),
                    rng.gen_range(0.08 * l..0.2 * l),
                )
            })
            .collect();
        ScalarField::from_fn(grid, |r, z| {
            bumps
                .iter()
                .map(|&(a, r0, z0, w)| {
                    let e = |rr: f64| (-((rr - r0).powi(2) + (z - z0).powi(2)) / (w * w)).exp();
                    a * (e(r) - e(-r))
                })
                .sum()
        })
        .symmetrize_odd_r()
    }

    #[test]
    fn wave_params_validation() {
        assert!(WaveParams::new(0.0, 1.0).is_err());
        assert!(WaveParams::new(1.0, -1.0).is_err());
        let w: WaveParams = serde_json::from_str(r#"{"c":1.0,"k":0.5}"#).unwrap();
        assert_eq!(w.offset(2.0), 2.5);
        assert!(serde_json::from_str::<WaveParams>(r#"{"c":-1.0,"k":0.5}"#).is_err());
    }

    #[test]
    fn t_map_and_theta_basics() {
        let fun = functional(32, 4.0);
        let g = *fun.grid();
        let zero = ScalarField::zeros(g);
        assert!(fun.t_map(&zero).is_zero());
        assert!(fun.theta_from_psi(&zero).is_zero());
        // psi = 2k + c r on a patch of the half-plane, odd extension elsewhere
        let patch = |r: f64, z: f64| r.abs() > 0.5 && r.abs() < 1.5 && z.abs() < 1.0;
        let psi = ScalarField::from_fn(g, |r, z| {
            if patch(r, z) {
                r.signum() * (1.0 + r.abs())
            } else {
                0.0
            }
        });
        let t = fun.t_map(&psi);
        for ir in 0..g.n() {
            for iz in 0..g.n() {
                let (r, z) = (g.coord(ir), g.coord(iz));
                let expected = if patch(r, z) { 0.5 * r.signum() } else { 0.0 };
                assert!((t.get(ir, iz) - expected).abs() < 1e-15);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let psi = random_admissible(g, &mut rng);
        let t = fun.t_map(&psi);
        let theta = fun.theta_from_psi(&psi);
        assert_eq!(t.reflect_r().add(&t).max_abs(), 0.0);
        assert_eq!(theta.reflect_r().add(&theta).max_abs(), 0.0);
        for i in 0..g.len() {
            if t.values()[i] == 0.0 {
                assert_eq!(theta.values()[i], 0.0);
            }
        }
    }

    #[test]
    fn energy_of_trivial_and_negative_fields() {
        let fun = functional(32, 4.0);
        let g = *fun.grid();
        let zero = ScalarField::zeros(g);
        assert_eq!(fun.potential(&zero), 0.0);
        assert_eq!(fun.energy(&zero), 0.0);
        let neg = ScalarField::from_fn(g, |r, z| -r * (-(r * r + z * z)).exp());
        let norm = fun.spectral().xs_norm_sq(&neg, fun.s());
        assert_eq!(fun.potential(&neg), 0.0);
        assert!((fun.energy(&neg) - 0.5 * norm).abs() < 1e-14 * norm);
        assert!((fun.euler_lagrange_pairing(&neg, &neg) - norm).abs() < 1e-14 * norm);
        assert!(matches!(
            fun.nehari_project(&neg, NEHARI_TOL),
            Err(Error::NotAdmissible(_))
        ));
    }

    #[test]
    fn pairing_matches_finite_differences() {
        let fun = functional(32, 4.0);
        let g = *fun.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let psi = random_admissible(g, &mut rng);
            let h = random_admissible(g, &mut rng);
            let eps = 1e-5;
            let fd = (fun.energy(&psi.axpy(eps, &h)) - fun.energy(&psi.axpy(-eps, &h))) / (2.0 * eps);
            let exact = fun.euler_lagrange_pairing(&psi, &h);
            assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "{fd} vs {exact}");
        }
    }

    #[test]
    fn energy_diff_agrees_with_direct_difference() {
        let fun = functional(32, 4.0);
        let g = *fun.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_admissible(g, &mut rng);
        let b = random_admissible(g, &mut rng);
        let direct = fun.energy(&b) - fun.energy(&a);
        assert!((fun.energy_diff(&a, &b) - direct).abs() < 1e-10 * fun.energy(&a).abs().max(1.0));
        assert_eq!(fun.energy_diff(&a, &a), 0.0);
    }

    #[test]
    fn ray_derivative_is_t_times_g() {
        let fun = functional(32, 4.0);
        let g = *fun.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..5 {
            let psi = random_admissible(g, &mut rng);
            let t: f64 = rng.gen_range(0.5..3.0);
            let eps = 1e-5 * t;
            let fd = (fun.energy(&psi.scaled(t + eps)) - fun.energy(&psi.scaled(t - eps))) / (2.0 * eps);
            let tg = t * fun.g_eval(t, &psi).unwrap();
            assert!((fd - tg).abs() < 1e-6 * tg.abs().max(1.0));
        }
    }

    #[test]
    fn g_is_decreasing_and_eventually_negative() {
        let fun = functional(32, 4.0);
        let g = *fun.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = random_admissible(g, &mut rng);
        let norm = fun.spectral().xs_norm_sq(&psi, fun.s());
        assert_eq!(fun.g_eval(1e-3, &psi).unwrap(), norm);
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let t = 0.05 * 1.2f64.powi(i);
            let v = fun.g_eval(t, &psi).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        assert!(prev < 0.0);
        assert!(fun.g_eval(0.0, &psi).is_err());
    }

    #[test]
    fn projection_lands_on_manifold_and_scales() {
        let fun = functional(32, 4.0);
        let g = *fun.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let psi = random_admissible(g, &mut rng);
        let res = fun.nehari_project(&psi, NEHARI_TOL).unwrap();
        assert!(res.g_residual.abs() <= NEHARI_TOL);
        let pairing = fun.euler_lagrange_pairing(&res.field, &res.field);
        assert!(pairing.abs() <= 1e-9 * fun.spectral().xs_norm_sq(&res.field, fun.s()));
        for lambda in [0.5, 2.0, 10.0] {
            let t = fun.nehari_project(&psi.scaled(lambda), NEHARI_TOL).unwrap().t;
            assert!((t - res.t / lambda).abs() < 1e-8 * res.t / lambda);
        }
        let e_star = fun.energy(&res.field);
        for i in 0..100 {
            let tau = res.t * 10f64.powf(-1.0 + 2.0 * i as f64 / 99.0);
            assert!(fun.energy(&psi.scaled(tau)) <= e_star + 1e-12 * e_star.abs());
        }
        let bounds = fun.nehari_bounds_check(&res.field, 1e-8).unwrap();
        assert!(bounds.shifted_bound_holds && bounds.beta_witness_positive);
        assert!(bounds.energy > 0.0);
        assert!(fun.nehari_bounds_check(&ScalarField::zeros(g), 1e-8).is_err());
    }

    #[test]
    fn potential_is_invariant_under_steiner() {
        let fun = functional(32, 4.0);
        let g = *fun.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let psi = polarize(&random_admissible(g, &mut rng));
        let v = fun.potential(&psi);
        let v_sharp = fun.potential(&steiner(&psi).unwrap());
        assert!(v > 0.0);
        assert!((v - v_sharp).abs() < 1e-12 * v);
    }
}
