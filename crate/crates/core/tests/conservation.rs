use gsqg::transport::{cfl_limit, evolve};
use gsqg::{FracParams, Grid, ScalarField, Spectral};

#[test]
fn l2_norm_drift_over_unit_time() {
    let g = Grid::new(256, 8.0).unwrap();
    let sp = Spectral::new(g);
    let s = FracParams::new(0.5).unwrap();
    let blob = |r: f64, z: f64| (-((r - 1.0).powi(2) + z * z) / 0.5).exp();
    let theta = ScalarField::from_fn(g, |r, z| blob(r, z) - blob(-r, z)).symmetrize_odd_r();
    let dt = 0.5 * cfl_limit(&sp, &theta, s).unwrap();
    let out = evolve(&sp, &theta, s, 1.0, dt).unwrap();
    let drift = (out.l2_norm() - theta.l2_norm()).abs() / theta.l2_norm();
    assert!(drift < 1e-2, "drift {drift}");
}
