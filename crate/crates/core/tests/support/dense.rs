//! Dense-matrix oracle for the period map: the generator of `L^λ` is
//! assembled explicitly from periodic spectral differentiation matrices
//! (closed-form cotangent entries) and the period map is a product of exact
//! matrix exponentials with coefficients frozen at Gauss nodes.

#![allow(dead_code)]

use std::f64::consts::PI;

use frontspeed::eigensolver::EigenProblem;
use nalgebra::DMatrix;

/// First-derivative matrix on `n` uniform nodes of the unit period.
pub fn d1(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let k = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            PI * sign / (PI * k / n as f64).tan()
        }
    })
}

/// Second-derivative matrix of the band-limited interpolant.
pub fn d2(n: usize) -> DMatrix<f64> {
    let scale = (2.0 * PI).powi(2);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            scale * (-((n * n) as f64) / 12.0 - 1.0 / 6.0)
        } else {
            let k = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            -scale * sign / (2.0 * (PI * k / n as f64).sin().powi(2))
        }
    })
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

pub struct DenseGenerator {
    lap: DMatrix<f64>,
    dx1: DMatrix<f64>,
    dx2: DMatrix<f64>,
    problem: EigenProblem,
}

impl DenseGenerator {
    pub fn new(problem: &EigenProblem) -> Self {
        let n = problem.grid.nx();
        let eye = DMatrix::<f64>::identity(n, n);
        let (d1, d2) = (d1(n), d2(n));
        // Node index i1 + n·i2: x₁ acts on the fast index.
        Self {
            lap: kron(&eye, &d2) + kron(&d2, &eye),
            dx1: kron(&eye, &d1),
            dx2: kron(&d1, &eye),
            problem: problem.clone(),
        }
    }

    pub fn at(&self, t: f64) -> DMatrix<f64> {
        let p = &self.problem;
        let grid = p.grid;
        let size = grid.len();
        let lam = p.lambda;
        let [k1, k2] = p.direction;
        let c0 = p.constant_rate();
        let mut a = self.lap.clone();
        for (row, x) in grid.points().enumerate() {
            let [b1, b2] = p.field.evaluate(x, t);
            let (v1, v2) = (b1 - 2.0 * lam * k1, b2 - 2.0 * lam * k2);
            for col in 0..size {
                a[(row, col)] += v1 * self.dx1[(row, col)] + v2 * self.dx2[(row, col)];
            }
            a[(row, row)] += c0 - lam * (b1 * k1 + b2 * k2);
        }
        a
    }

    /// Period map as a product of frozen-coefficient exponentials
    /// (fourth-order commutator-free Magnus at the two Gauss nodes per step).
    pub fn period_map(&self) -> DMatrix<f64> {
        let p = &self.problem;
        if p.field.is_steady() {
            return self.at(0.0).exp();
        }
        let steps = p.grid.nt();
        let dt = p.grid.dt();
        let s3 = 3f64.sqrt();
        let (c1, c2) = (0.5 - s3 / 6.0, 0.5 + s3 / 6.0);
        let (a1, a2) = ((3.0 - 2.0 * s3) / 12.0, (3.0 + 2.0 * s3) / 12.0);
        let size = p.grid.len();
        let mut map = DMatrix::<f64>::identity(size, size);
        for j in 0..steps {
            let t = j as f64 * dt;
            let g1 = self.at(t + c1 * dt);
            let g2 = self.at(t + c2 * dt);
            let first = ((&g1 * a2 + &g2 * a1) * dt).exp();
            let second = ((&g1 * a1 + &g2 * a2) * dt).exp();
            map = second * first * map;
        }
        map
    }
}

/// `ln` of the spectral radius of a dense matrix, via its Schur form.
pub fn log_spectral_radius(m: DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .ln()
}
