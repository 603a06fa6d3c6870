#[path = "support/dense.rs"]
mod dense;

use std::f64::consts::PI;

use dense::{d1, d2, log_spectral_radius, DenseGenerator};
use frontspeed::eigensolver::{principal_eigenvalue, propagate_period, EigenProblem};
use frontspeed::{CellGrid, FieldSpec};
use nalgebra::DVector;

#[test]
fn differentiation_matrices_are_exact_on_trig_polynomials() {
    let n = 16;
    let x: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
    let f = DVector::from_iterator(n, x.iter().map(|&x| (2.0 * PI * 3.0 * x).sin()));
    let df = d1(n) * &f;
    let ddf = d2(n) * &f;
    for j in 0..n {
        let s = 6.0 * PI;
        assert!((df[j] - s * (s * x[j]).cos()).abs() < 1e-10);
        assert!((ddf[j] + s * s * f[j]).abs() < 1e-9);
    }
    // Nyquist mode: D2 keeps −(πn)², D1 annihilates it.
    let nyq = DVector::from_iterator(n, (0..n).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }));
    let d2n = d2(n) * &nyq;
    let d1n = d1(n) * &nyq;
    for j in 0..n {
        assert!((d2n[j] + (PI * n as f64).powi(2) * nyq[j]).abs() < 1e-8);
        assert!(d1n[j].abs() < 1e-10);
    }
}

#[test]
fn period_map_matches_dense_exponential() {
    let grid = CellGrid::new(2, 32, 256).unwrap();
    let p = EigenProblem::new(FieldSpec::cellular(1.0), 1.0, &[1.0, 0.0], 0.5, grid).unwrap();
    let ones = vec![1.0; grid.len()];
    let ours = propagate_period(&p, &ones).unwrap();
    let dense = DenseGenerator::new(&p).period_map() * DVector::from_element(grid.len(), 1.0);
    let scale = dense.amax();
    let worst = ours
        .iter()
        .zip(dense.iter())
        .map(|(a, b)| (a - b).abs() / scale)
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "relative deviation {worst:e}");
}

#[test]
fn principal_eigenvalue_matches_dense_time_periodic_oracle() {
    let grid = CellGrid::new(2, 16, 128).unwrap();
    let field = FieldSpec::cellular(1.0).with_modulation(0.5, 1);
    let p = EigenProblem::new(field, 1.0, &[1.0, 0.0], 1.0, grid).unwrap();
    let mu = principal_eigenvalue(&p, 1e-11, 100).unwrap().mu;
    let oracle = log_spectral_radius(DenseGenerator::new(&p).period_map());
    assert!((mu - oracle).abs() <= 1e-5, "mu {mu} oracle {oracle}");
}
