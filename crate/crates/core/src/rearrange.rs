//! Polarization and Steiner rearrangement in `z`, and a brute-force discrete
//! Gagliardo seminorm used to check that both operators do not increase it.

use crate::error::{Error, Result};
use crate::grid::ScalarField;

/// Largest grid accepted by [`gagliardo_sq`]; the sum costs `O(n^4)`.
pub const GAGLIARDO_MAX_N: usize = 64;

/// Relative slack used to decide whether a field is non-negative on `r >= 0`.
pub const POLARIZED_SLACK: f64 = 1e-12;

/// Pointwise max with the `r`-mirror on `r > 0`, min on `r < 0`.
///
/// The `r = 0` line and the unpaired `r = -L` line are left alone.
pub fn polarize(field: &ScalarField) -> ScalarField {
    let grid = *field.grid();
    let n = grid.n();
    let c = grid.center();
    let mut out = field.clone();
    for ir in 1..n {
        if ir == c {
            continue;
        }
        let mirror = field.line(grid.mirror(ir));
        let take_max = ir > c;
        let line = out.line_mut(ir);
        for (v, &m) in line.iter_mut().zip(mirror) {
            *v = if take_max { v.max(m) } else { v.min(m) };
        }
    }
    out
}

/// Order in which sorted values are laid out along a `z`-line: the `z = 0`
/// index first, then `+1, -1, +2, -2, ...`, ending on index 0.
pub(crate) fn center_out_order(n: usize) -> Vec<usize> {
    let c = n / 2;
    let mut order = Vec::with_capacity(n);
    order.push(c);
    for d in 1..c {
        order.push(c + d);
        order.push(c - d);
    }
    order.push(0);
    order
}

/// Symmetric-decreasing rearrangement of every `z`-line with `r > 0`,
/// followed by odd reflection onto `r < 0`.
///
/// Expects a polarized field (odd in `r`, non-negative for `r >= 0`).
pub fn steiner(field: &ScalarField) -> Result<ScalarField> {
    let grid = *field.grid();
    let n = grid.n();
    let c = grid.center();
    let floor = -POLARIZED_SLACK * field.max_abs();
    for ir in c..n {
        if let Some(&bad) = field.line(ir).iter().find(|&&v| v < floor) {
            return Err(Error::NotPolarized { value: bad });
        }
    }
    let order = center_out_order(n);
    let mut out = field.clone();
    let mut sorted = vec![0.0; n];
    for ir in c + 1..n {
        sorted.copy_from_slice(field.line(ir));
        // stable, so equal values keep their original z order
        sorted.sort_by(|a, b| b.total_cmp(a));
        let line = out.line_mut(ir);
        for (&v, &iz) in sorted.iter().zip(&order) {
            line[iz] = v;
        }
        let mirror = grid.mirror(ir);
        for iz in 0..n {
            let v = out.get(ir, iz);
            out.set(mirror, iz, -v);
        }
    }
    Ok(out)
}

/// Discrete Gagliardo functional
/// `sum_{x != y} |u(x) - u(y)|^p / |x - y|^{2 + s p} h^4` of the field
/// extended by zero to the whole lattice `hZ^2`.
///
/// Pairs with one point off the grid contribute `|u(x)|^p` times the
/// kernel summed over the exterior, which is evaluated through the
/// lattice constant `sum_{d != 0} |d|^{-(2 + s p)}`. The value is therefore
/// exactly invariant under whole-cell translations of a field whose support
/// stays on the grid.
pub fn gagliardo_sq(field: &ScalarField, s: f64, p: f64) -> Result<f64> {
    let grid = *field.grid();
    let n = grid.n();
    if n > GAGLIARDO_MAX_N {
        return Err(Error::GridTooLarge {
            n,
            cap: GAGLIARDO_MAX_N,
        });
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!("s = {s} must lie in (0, 1)")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p = {p} must be >= 1")));
    }
    let exponent = 2.0 + s * p;
    let h = grid.spacing();
    let scale = h.powf(2.0 - s * p);

    // kernel by index difference, offset so that (n-1, n-1) is the origin
    let width = 2 * n - 1;
    let mut kernel = vec![0.0; width * width];
    for a in 0..width {
        for b in 0..width {
            let (dr, dz) = (a as f64 - (n - 1) as f64, b as f64 - (n - 1) as f64);
            let d2 = dr * dr + dz * dz;
            if d2 > 0.0 {
                kernel[a * width + b] = d2.powf(-0.5 * exponent);
            }
        }
    }
    let lattice = lattice_zeta(exponent);

    let u = field.values();
    let powers: Vec<f64> = u.iter().map(|v| v.abs().powf(p)).collect();
    let mut pairs = 0.0;
    let mut exterior = 0.0;
    for ix in 0..n {
        for jx in 0..n {
            let ux = u[ix * n + jx];
            let mut row = 0.0;
            let mut interior_kernel = 0.0;
            for iy in 0..n {
                let a = ix + n - 1 - iy;
                let krow = &kernel[a * width..(a + 1) * width];
                let urow = &u[iy * n..(iy + 1) * n];
                for (jy, &uy) in urow.iter().enumerate() {
                    let k = krow[jx + n - 1 - jy];
                    row += (ux - uy).abs().powf(p) * k;
                    interior_kernel += k;
                }
            }
            pairs += row;
            exterior += powers[ix * n + jx] * (lattice - interior_kernel);
        }
    }
    Ok(scale * (pairs + 2.0 * exterior))
}

/// `sum_{d in Z^2, d != 0} |d|^{-a}` for `a > 2`: direct sum over a square,
/// plus the integral of `|x|^{-a}` outside it.
fn lattice_zeta(a: f64) -> f64 {
    const M: i64 = 200;
    let mut direct = 0.0;
    for i in -M..=M {
        for j in -M..=M {
            if i != 0 || j != 0 {
                direct += ((i * i + j * j) as f64).powf(-0.5 * a);
            }
        }
    }
    // outside the square [-(M + 1/2), M + 1/2]^2 in polar coordinates
    let edge = M as f64 + 0.5;
    let panels = 256;
    let step = std::f64::consts::FRAC_PI_4 / panels as f64;
    let angular: f64 = (0..=panels)
        .map(|i| {
            let w = if i == 0 || i == panels {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * (i as f64 * step).cos().powf(a - 2.0)
        })
        .sum::<f64>()
        * step
        / 3.0;
    direct + 8.0 * edge.powf(2.0 - a) / (a - 2.0) * angular
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_odd(grid: Grid, rng: &mut ChaCha8Rng) -> ScalarField {
        let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ScalarField::from_values(grid, values).unwrap().symmetrize_odd_r()
    }

    #[test]
    fn polarize_odd_gives_absolute_value() {
        let g = Grid::new(16, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_odd(g, &mut rng);
        let p = polarize(&f);
        for ir in g.center() + 1..g.n() {
            for iz in 0..g.n() {
                assert_eq!(p.get(ir, iz), f.get(ir, iz).abs());
            }
        }
        assert_eq!(p.reflect_r().add(&p).max_abs(), 0.0);
        assert_eq!(polarize(&p).values(), p.values());
    }

    #[test]
    fn polarize_fixes_nonnegative_odd_fields() {
        let g = Grid::new(16, 2.0).unwrap();
        let f = ScalarField::from_fn(g, |r, z| r * (-r * r - z * z).exp());
        assert_eq!(polarize(&f).values(), f.values());
    }

    #[test]
    fn center_out_order_is_a_permutation() {
        for n in [4, 8, 16] {
            let mut o = center_out_order(n);
            assert_eq!(o[0], n / 2);
            assert_eq!(o[1], n / 2 + 1);
            assert_eq!(o[2], n / 2 - 1);
            o.sort_unstable();
            assert_eq!(o, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn steiner_single_peak_moves_to_center() {
        let g = Grid::new(4, 1.0).unwrap();
        let mut f = ScalarField::zeros(g);
        f.set(3, 1, 3.0);
        f.set(1, 1, -3.0);
        let out = steiner(&f).unwrap();
        assert_eq!(out.line(3), &[0.0, 0.0, 3.0, 0.0]);
        assert_eq!(out.line(1), &[0.0, 0.0, -3.0, 0.0]);
    }

    #[test]
    fn steiner_preserves_line_multisets() {
        let g = Grid::new(16, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = polarize(&random_odd(g, &mut rng));
        let out = steiner(&f).unwrap();
        for ir in 0..g.n() {
            let mut a = f.line(ir).to_vec();
            let mut b = out.line(ir).to_vec();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            assert_eq!(a, b);
        }
        // normal form is a fixed point
        assert_eq!(steiner(&out).unwrap().values(), out.values());
    }

    #[test]
    fn steiner_rejects_unpolarized() {
        let g = Grid::new(8, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |r, _| -r);
        assert!(matches!(steiner(&f), Err(Error::NotPolarized { .. })));
    }

    #[test]
    fn gagliardo_basic_properties() {
        let g = Grid::new(16, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_odd(g, &mut rng);
        let zero = gagliardo_sq(&ScalarField::zeros(g), 0.5, 2.0).unwrap();
        assert_eq!(zero, 0.0);
        for p in [1.0, 2.0, 3.0] {
            let base = gagliardo_sq(&f, 0.4, p).unwrap();
            let scaled = gagliardo_sq(&f.scaled(-2.5), 0.4, p).unwrap();
            assert!((scaled - 2.5f64.powf(p) * base).abs() < 1e-11 * scaled);
        }
        assert!(matches!(
            gagliardo_sq(&ScalarField::zeros(Grid::new(128, 1.0).unwrap()), 0.5, 2.0),
            Err(Error::GridTooLarge { .. })
        ));
        assert!(gagliardo_sq(&f, 0.5, 0.5).is_err());
    }

    #[test]
    fn gagliardo_translation_invariance() {
        let g = Grid::new(32, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // random values supported in the inner quarter
        let f = ScalarField::from_fn(g, |r, z| {
            let v: f64 = rng.gen_range(-1.0..1.0);
            if r.abs() < 1.0 && z.abs() < 1.0 {
                v
            } else {
                0.0
            }
        });
        let base = gagliardo_sq(&f, 0.5, 2.0).unwrap();
        for cells in [-3, 1, 4] {
            let moved = gagliardo_sq(&f.shift_z_cells(cells), 0.5, 2.0).unwrap();
            assert!((moved - base).abs() < 1e-10 * base);
        }
    }

    #[test]
    fn lattice_constant_reference() {
        // sum over Z^2 \ 0 of |d|^{-3} = 4 zeta(3/2) beta(3/2) = 9.0336217...
        assert!((lattice_zeta(3.0) - 9.033_621_683_100_8).abs() < 1e-6);
    }
}
