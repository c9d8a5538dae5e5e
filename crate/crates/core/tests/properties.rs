use proptest::prelude::*;

use gsqg::io::{read_field, write_field};
use gsqg::rearrange::{polarize, steiner};
use gsqg::transport::evolve;
use gsqg::{FracParams, Grid, ScalarField, Spectral};

fn field(n: usize) -> impl Strategy<Value = ScalarField> {
    prop::collection::vec(-10.0f64..10.0, n * n)
        .prop_map(move |v| ScalarField::from_values(Grid::new(n, 3.0).unwrap(), v).unwrap())
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn field_dump_roundtrip(f in field(8), s in 0.01f64..0.99) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        write_field(&path, &f, s).unwrap();
        let (back, s_back) = read_field(&path).unwrap();
        prop_assert_eq!(s_back, s);
        prop_assert_eq!(back.values(), f.values());
    }

    #[test]
    fn rearrangements_keep_odd_symmetry_and_values(f in field(16)) {
        let odd = f.symmetrize_odd_r();
        let pol = polarize(&odd);
        let again = polarize(&pol);
        prop_assert_eq!(again.values(), pol.values());
        prop_assert!(pol.add(&pol.reflect_r()).max_abs() == 0.0);
        let sharp = steiner(&pol).unwrap();
        for ir in 0..16 {
            prop_assert_eq!(sorted(sharp.line(ir)), sorted(pol.line(ir)));
        }
        let twice = steiner(&sharp).unwrap();
        prop_assert_eq!(twice.values(), sharp.values());
    }

    #[test]
    fn fractional_laplacian_is_symmetric(a in field(16), b in field(16), s in 0.05f64..0.95) {
        let sp = Spectral::new(*a.grid());
        let s = FracParams::new(s).unwrap();
        let lhs = sp.frac_laplacian(&a, s).dot(&b);
        let rhs = a.dot(&sp.frac_laplacian(&b, s));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn evolution_keeps_mean_and_oddness(r0 in 0.5f64..1.5, z0 in -1.0f64..1.0, w in 0.3f64..0.6) {
        let g = Grid::new(32, 3.0).unwrap();
        let sp = Spectral::new(g);
        let blob = |r: f64, z: f64| (-((r - r0).powi(2) + (z - z0).powi(2)) / (w * w)).exp();
        let theta = ScalarField::from_fn(g, |r, z| blob(r, z) - blob(-r, z)).symmetrize_odd_r();
        let out = evolve(&sp, &theta, FracParams::new(0.5).unwrap(), 0.2, 0.01).unwrap();
        prop_assert!(out.mean().abs() <= 1e-14 * out.max_abs());
        prop_assert!(out.add(&out.reflect_r()).max_abs() <= 1e-12 * out.max_abs());
    }
}
