//! The vorticity profile `f(xi) = xi^nu exp(-1/xi)` for `xi > 0` (zero
//! otherwise), its derivative, its antiderivative `F`, and an audit of the
//! structural hypotheses the existence theory puts on `f`.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::FracParams;

/// Below this argument `f` is exactly zero.
pub const UNDERFLOW_CUTOFF: f64 = 1e-12;

const TABLE_LO: f64 = 1e-2;
const TABLE_HI: f64 = 1e6;
const TABLE_LOG_STEP: f64 = 1e-3;

/// Parameters `(nu, mu)` of the nonlinearity.
#[derive(Debug, Clone)]
pub struct Nonlin {
    nu: f64,
    mu: f64,
    s: FracParams,
    table: Arc<AntiderivativeTable>,
}

impl Nonlin {
    /// Requires `1 < mu < nu < (1 + s) / (1 - s)`.
    pub fn new(nu: f64, mu: f64, s: FracParams) -> Result<Self> {
        let nu_max = growth_exponent_bound(s);
        if !(nu > 1.0 && nu < nu_max) {
            return Err(Error::InvalidParameter(format!(
                "nu = {nu} must lie in (1, (1+s)/(1-s)) = (1, {nu_max})"
            )));
        }
        if !(mu > 1.0 && mu < nu) {
            return Err(Error::InvalidParameter(format!(
                "mu = {mu} must lie in (1, nu) = (1, {nu})"
            )));
        }
        Ok(Nonlin {
            nu,
            mu,
            s,
            table: shared_table(nu),
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn frac(&self) -> FracParams {
        self.s
    }

    pub fn f(&self, xi: f64) -> f64 {
        profile(self.nu, xi)
    }

    pub fn f_prime(&self, xi: f64) -> f64 {
        if xi < UNDERFLOW_CUTOFF {
            return 0.0;
        }
        (self.nu * xi.powf(self.nu - 1.0) + xi.powf(self.nu - 2.0)) * (-1.0 / xi).exp()
    }

    /// `F(xi) = int_0^xi f`.
    pub fn antiderivative(&self, xi: f64) -> f64 {
        self.table.eval(xi)
    }

    /// `F(b) - F(a)`, accurate relative to the difference when `a` and `b`
    /// are close.
    pub fn antiderivative_diff(&self, a: f64, b: f64) -> f64 {
        let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        if hi <= 0.0 {
            return 0.0;
        }
        let lo = lo.max(0.0);
        let width = hi - lo;
        if width == 0.0 {
            return 0.0;
        }
        // e^{-1/xi} varies on the scale xi^2, xi^nu on the scale xi
        let scale = hi.min(hi * hi);
        if width <= 0.05 * scale {
            sign * gauss_legendre(&|x| self.f(x), lo, hi)
        } else {
            sign * (self.antiderivative(hi) - self.antiderivative(lo))
        }
    }

    /// Samples the structural hypotheses on `samples` log-spaced points of
    /// `[1e-6, 1e6]`. Failures are reported, not raised.
    pub fn check_hypotheses(&self, s: FracParams, samples: usize) -> Result<HypothesisReport> {
        if samples < 100 {
            return Err(Error::InvalidParameter(format!(
                "at least 100 samples required, got {samples}"
            )));
        }
        let xs: Vec<f64> = (0..samples)
            .map(|i| {
                let t = i as f64 / (samples - 1) as f64;
                10f64.powf(-6.0 + 12.0 * t)
            })
            .collect();
        let (nu, mu) = (self.nu, self.mu);

        // Log forms avoid the underflow of exp(-1/xi) near the origin:
        // ln f = nu ln xi - 1/xi, xi f'/f = nu + 1/xi.
        let vanishes_below = [-10.0, -1.0, -1e-3, 0.0]
            .iter()
            .all(|&x| self.f(x) == 0.0 && self.f_prime(x) == 0.0);
        let log_f_min = xs
            .iter()
            .map(|&x| nu * x.ln() - 1.0 / x)
            .fold(f64::INFINITY, f64::min);
        let direct_positive = xs
            .iter()
            .filter(|&&x| (nu * x.ln() - 1.0 / x) > f64::MIN_POSITIVE.ln() + 1.0)
            .all(|&x| self.f(x) > 0.0);
        let support = HypothesisCheck {
            name: "smooth, zero on (-inf, 0], positive on (0, inf)".into(),
            passed: vanishes_below && log_f_min.is_finite() && direct_positive,
            worst_margin: log_f_min,
            detail: "worst margin is min ln f over the samples (finite means f > 0)".into(),
        };

        let nu_max = growth_exponent_bound(s);
        let growth_margin = xs.iter().map(|&x| 1.0 / x).fold(f64::INFINITY, f64::min);
        let direct_growth = xs
            .iter()
            .filter(|&&x| self.f(x) > 0.0)
            .all(|&x| self.f(x) <= x.powf(nu) * (1.0 + 1e-14));
        let growth = HypothesisCheck {
            name: format!("f(xi) <= C xi^nu with C = 1, nu in (1, {nu_max})"),
            passed: nu > 1.0 && nu < nu_max && growth_margin > 0.0 && direct_growth,
            worst_margin: growth_margin.min(nu - 1.0).min(nu_max - nu),
            detail: "margin is min of ln(xi^nu / f) and the distance of nu to the interval ends".into(),
        };

        let ar_margin = xs
            .iter()
            .map(|&x| nu + 1.0 / x - mu)
            .fold(f64::INFINITY, f64::min);
        let direct_ar = xs
            .iter()
            .filter(|&&x| self.f(x) > 0.0)
            .all(|&x| mu * self.f(x) <= x * self.f_prime(x) * (1.0 + 1e-14));
        let monotone_quotient = HypothesisCheck {
            name: "mu f(xi) <= xi f'(xi) with mu in (1, nu)".into(),
            passed: mu > 1.0 && mu < nu && ar_margin > 0.0 && direct_ar,
            worst_margin: ar_margin.min(mu - 1.0),
            detail: "margin is min of nu + 1/xi - mu over the samples".into(),
        };

        let checks = vec![support, growth, monotone_quotient];
        Ok(HypothesisReport {
            nu,
            mu,
            s: s.s(),
            samples,
            all_passed: checks.iter().all(|c| c.passed),
            checks,
        })
    }
}

/// `(1 + s) / (1 - s)`.
pub fn growth_exponent_bound(s: FracParams) -> f64 {
    (1.0 + s.s()) / (1.0 - s.s())
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub worst_margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub nu: f64,
    pub mu: f64,
    pub s: f64,
    pub samples: usize,
    pub all_passed: bool,
    pub checks: Vec<HypothesisCheck>,
}

fn profile(nu: f64, xi: f64) -> f64 {
    if xi < UNDERFLOW_CUTOFF {
        0.0
    } else {
        xi.powf(nu) * (-1.0 / xi).exp()
    }
}

fn profile_prime(nu: f64, xi: f64) -> f64 {
    if xi < UNDERFLOW_CUTOFF {
        0.0
    } else {
        (nu * xi.powf(nu - 1.0) + xi.powf(nu - 2.0)) * (-1.0 / xi).exp()
    }
}

/// Tables are shared between all `Nonlin` values with the same `nu`.
fn shared_table(nu: f64) -> Arc<AntiderivativeTable> {
    static CACHE: OnceLock<std::sync::Mutex<Vec<Arc<AntiderivativeTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut tables = cache.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = tables.iter().find(|t| t.nu == nu) {
        return Arc::clone(t);
    }
    let table = Arc::new(AntiderivativeTable::build(nu));
    tables.push(Arc::clone(&table));
    table
}

/// `F` on log-spaced nodes of `[TABLE_LO, TABLE_HI]`, interpolated by quintic
/// Hermite polynomials matching `F`, `f` and `f'` at both ends of each cell.
#[derive(Debug)]
struct AntiderivativeTable {
    nu: f64,
    log_lo: f64,
    log_step: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl AntiderivativeTable {
    fn build(nu: f64) -> Self {
        let log_lo = TABLE_LO.ln();
        let count = ((TABLE_HI.ln() - log_lo) / TABLE_LOG_STEP).ceil() as usize + 1;
        let log_step = (TABLE_HI.ln() - log_lo) / (count - 1) as f64;
        let nodes: Vec<f64> = (0..count)
            .map(|i| (log_lo + i as f64 * log_step).exp())
            .collect();
        let f = |x: f64| profile(nu, x);
        let mut values = Vec::with_capacity(count);
        let start = adaptive_simpson(&f, 0.0, TABLE_LO, 1e-14 * TABLE_LO * f(TABLE_LO));
        values.push(start);
        let mut acc = start;
        for w in nodes.windows(2) {
            acc += gauss_legendre(&f, w[0], w[1]);
            values.push(acc);
        }
        AntiderivativeTable {
            nu,
            log_lo,
            log_step,
            nodes,
            values,
        }
    }

    fn eval(&self, xi: f64) -> f64 {
        if xi < UNDERFLOW_CUTOFF {
            return 0.0;
        }
        let f = |x: f64| profile(self.nu, x);
        let last = self.nodes.len() - 1;
        if xi < self.nodes[0] {
            let total = adaptive_simpson(&f, 0.0, xi, 1e-13 * xi * f(xi));
            return total;
        }
        if xi >= self.nodes[last] {
            let extra = adaptive_simpson(&f, self.nodes[last], xi, 1e-13 * xi * f(xi));
            return self.values[last] + extra;
        }
        let mut i = ((xi.ln() - self.log_lo) / self.log_step) as usize;
        i = i.min(last - 1);
        while i > 0 && self.nodes[i] > xi {
            i -= 1;
        }
        while i + 1 < last && self.nodes[i + 1] <= xi {
            i += 1;
        }
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let width = x1 - x0;
        let t = (xi - x0) / width;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 0.5 * t3 - t4 + 0.5 * t5;
        let nu = self.nu;
        self.values[i] * h0
            + width * profile(nu, x0) * h1
            + width * width * profile_prime(nu, x0) * h2
            + self.values[i + 1] * h3
            + width * profile(nu, x1) * h4
            + width * width * profile_prime(nu, x1) * h5
    }
}

// 10-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_21,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_35,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

pub(crate) fn gauss_legendre(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let sum: f64 = GL_NODES
        .iter()
        .zip(GL_WEIGHTS.iter())
        .map(|(&x, &w)| w * (f(mid - half * x) + f(mid + half * x)))
        .sum();
    half * sum
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let tol = if tol > 0.0 { tol } else { f64::MIN_POSITIVE };
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> FracParams {
        FracParams::new(0.5).unwrap()
    }

    fn default_nonlin() -> Nonlin {
        Nonlin::new(2.0, 1.5, half()).unwrap()
    }

    #[test]
    fn f_values() {
        let p = default_nonlin();
        assert_eq!(p.f(-1.0), 0.0);
        assert_eq!(p.f(0.0), 0.0);
        assert!((p.f(1.0) - 0.367_879_44).abs() < 1e-8);
        assert!((p.f(1.0) - (-1f64).exp()).abs() < 1e-16);
        assert!((p.f(2.0) - 2.426_122_64).abs() < 1e-8);
        assert_eq!(p.f(1e-13), 0.0);
        assert_eq!(p.f(1e-5), 0.0);
    }

    #[test]
    fn f_prime_values() {
        let p = default_nonlin();
        assert_eq!(p.f_prime(-0.5), 0.0);
        assert!((p.f_prime(1.0) - 3.0 * (-1f64).exp()).abs() < 1e-15);
        let (x, step) = (1.7, 1e-5);
        let fd = (p.f(x + step) - p.f(x - step)) / (2.0 * step);
        assert!((p.f_prime(x) - fd).abs() < 1e-8);
    }

    /// Composite Simpson with a fixed panel count.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut sum = f(a) + f(b);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(a + i as f64 * h);
        }
        sum * h / 3.0
    }

    /// Romberg extrapolation of the trapezoid rule.
    fn romberg(f: impl Fn(f64) -> f64, a: f64, b: f64, levels: usize) -> f64 {
        let mut table = vec![vec![0.0; levels]; levels];
        let mut h = b - a;
        table[0][0] = 0.5 * h * (f(a) + f(b));
        for i in 1..levels {
            h *= 0.5;
            let count = 1usize << (i - 1);
            let mid: f64 = (0..count).map(|k| f(a + (2 * k + 1) as f64 * h)).sum();
            table[i][0] = 0.5 * table[i - 1][0] + h * mid;
            for j in 1..=i {
                let factor = 4f64.powi(j as i32);
                table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
            }
        }
        table[levels - 1][levels - 1]
    }

    #[test]
    fn antiderivative_at_one_matches_two_independent_rules() {
        let g = |t: f64| if t <= 0.0 { 0.0 } else { t * t * (-1.0 / t).exp() };
        let a = simpson(g, 0.0, 1.0, 200_000);
        let b = romberg(g, 0.0, 1.0, 18);
        assert!((a - b).abs() < 1e-10 * a);
        let p = default_nonlin();
        assert!((p.antiderivative(1.0) - a).abs() < 1e-10 * a);
        // 30-digit reference: 0.08606249132456072825...
        assert!((p.antiderivative(1.0) - 0.086_062_491_324_560_73).abs() < 1e-12);
    }

    #[test]
    fn antiderivative_basic_properties() {
        let p = default_nonlin();
        assert_eq!(p.antiderivative(0.0), 0.0);
        assert_eq!(p.antiderivative(-3.0), 0.0);
        for x in [0.5, 1.0, 2.0, 5.0] {
            assert!(p.antiderivative(x) <= x.powf(3.0) / 3.0);
        }
        // strictly increasing across the table, including its ends
        let mut prev = p.antiderivative(0.05);
        let mut x = 0.05;
        while x < 2e6 {
            x *= 1.000_37;
            let v = p.antiderivative(x);
            assert!(v > prev, "F not increasing at {x}");
            prev = v;
        }
    }

    #[test]
    fn antiderivative_accuracy_across_ranges() {
        for &(nu, x, reference) in &[
            (2.0, 2.0, 1.321_942_606_866_784_5),
            (1.5, 2.0, 1.072_465_825_753_447_1),
            (2.5, 2.0, 1.654_184_358_266_347_0),
            (2.0, 0.02, 2.861_203_592_700_350_7e-29),
        ] {
            let p = Nonlin::new(nu, 1.2, FracParams::new(0.6).unwrap()).unwrap();
            let v = p.antiderivative(x);
            assert!((v - reference).abs() < 1e-10 * reference, "nu={nu} x={x}: {v} vs {reference}");
        }
        // derivative of the interpolant reproduces f
        let p = default_nonlin();
        for x in [0.03f64, 0.3, 1.234, 17.0, 900.0] {
            let step = 1e-4 * x * x.min(1.0);
            let fd = (p.antiderivative(x + step) - p.antiderivative(x - step)) / (2.0 * step);
            assert!((fd - p.f(x)).abs() < 1e-7 * p.f(x), "x = {x}: fd {fd:e} f {:e} F {:e}", p.f(x), p.antiderivative(x));
        }
    }

    #[test]
    fn antiderivative_diff_is_consistent() {
        let p = default_nonlin();
        for &(a, b) in &[(1.0, 1.0 + 1e-9), (3.0, 2.999), (-1.0, 0.7), (0.2, 5.0), (-2.0, -1.0)] {
            let direct = p.antiderivative(b) - p.antiderivative(a);
            let diff = p.antiderivative_diff(a, b);
            assert!((diff - direct).abs() <= 1e-12 * p.antiderivative(a.max(b).max(0.0)) + 1e-300);
        }
        let b = 1.0 + 1e-12;
        let tiny = p.antiderivative_diff(1.0, b);
        assert!((tiny - (b - 1.0) * p.f(1.0)).abs() < 1e-24);
    }

    #[test]
    fn constructor_enforces_exponent_ranges() {
        assert!(Nonlin::new(2.0, 2.5, half()).is_err());
        assert!(Nonlin::new(3.5, 1.5, half()).is_err());
        assert!(Nonlin::new(3.0, 1.5, half()).is_err());
        assert!(Nonlin::new(2.0, 1.0, half()).is_err());
        assert!(Nonlin::new(2.9, 1.1, half()).is_ok());
    }

    #[test]
    fn hypotheses_pass_for_defaults() {
        let report = default_nonlin().check_hypotheses(half(), 400).unwrap();
        assert!(report.all_passed, "{report:?}");
        assert!(default_nonlin().check_hypotheses(half(), 10).is_err());
    }

    #[test]
    fn structural_properties_on_samples() {
        let p = default_nonlin();
        let xs: Vec<f64> = (0..400).map(|i| 10f64.powf(-1.3 + 5.0 * i as f64 / 399.0)).collect();
        // f / xi^mu non-decreasing
        for w in xs.windows(2) {
            let q = |x: f64| p.f(x) / x.powf(p.mu());
            assert!(q(w[1]) >= q(w[0]));
        }
        // f / (xi + xi0) increasing and unbounded
        for xi0 in [0.1, 1.0, 10.0] {
            let q = |x: f64| p.f(x) / (x + xi0);
            for w in xs.windows(2) {
                assert!(q(w[1]) > q(w[0]));
            }
            assert!(q(*xs.last().unwrap()) > 100.0 * q(1.0));
        }
        // mu F <= xi f - F
        for &x in &xs {
            let big_f = p.antiderivative(x);
            assert!(p.mu() * big_f <= x * p.f(x) - big_f + 1e-14 * x * p.f(x));
        }
    }
}
