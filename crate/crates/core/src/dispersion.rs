//! The dispersion map `λ ↦ μ(λ)` and the speeds derived from it.
//!
//! `g(λ) = μ(λ)/λ` is strictly decreasing on `(0, λ*)` and increasing on
//! `(λ*, ∞)`, so `c* = min g` is found by golden-section search once a
//! three-point bracket is established. `μ` is only available through an
//! iterative eigensolve, which rules out derivative-based methods.

use std::io::Write;

use rayon::prelude::*;

use crate::eigensolver::{principal_eigenvalue, EigenProblem, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::error::{param, Error, Result};
use crate::fields::FieldSpec;
use crate::grid::CellGrid;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Everything but `λ` of an eigenproblem: the setting a speed is computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedProblem {
    base: EigenProblem,
    pub max_iter: usize,
}

impl SpeedProblem {
    pub fn new(
        field: FieldSpec,
        growth_rate: f64,
        direction: &[f64],
        grid: CellGrid,
    ) -> Result<Self> {
        Ok(Self {
            base: EigenProblem::new(field, growth_rate, direction, 0.0, grid)?,
            max_iter: DEFAULT_MAX_ITER,
        })
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    /// Shifted operator `L^λ − δ`.
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.base.delta = delta;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.base.epsilon = epsilon;
        self
    }

    /// Same setting, propagation direction reversed.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.base.direction = [-self.base.direction[0], -self.base.direction[1]];
        out
    }

    pub fn growth_rate(&self) -> f64 {
        self.base.growth_rate
    }

    pub fn grid(&self) -> CellGrid {
        self.base.grid
    }

    pub fn direction(&self) -> [f64; 2] {
        self.base.direction
    }

    pub fn eigenproblem(&self, lambda: f64) -> EigenProblem {
        self.base.with_lambda(lambda)
    }

    pub fn mu(&self, lambda: f64, tol: f64) -> Result<f64> {
        Ok(principal_eigenvalue(&self.eigenproblem(lambda), tol, self.max_iter)?.mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub lambda: f64,
    pub mu: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCurve {
    pub direction: [f64; 2],
    pub points: Vec<CurvePoint>,
    pub grid: CellGrid,
    pub tol: f64,
}

impl DispersionCurve {
    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }

    pub fn first_unconverged(&self) -> Option<f64> {
        self.points.iter().find(|p| !p.converged).map(|p| p.lambda)
    }

    /// `lambda,mu,mu_over_lambda,converged` rows after optional `#` comment lines.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "lambda,mu,mu_over_lambda,converged")?;
        for p in &self.points {
            let ratio = if p.lambda > 0.0 {
                p.mu / p.lambda
            } else {
                f64::INFINITY
            };
            writeln!(
                out,
                "{:.10e},{:.10e},{:.10e},{}",
                p.lambda, p.mu, ratio, p.converged
            )?;
        }
        Ok(())
    }
}

/// One eigensolve per `λ`, run concurrently; unconverged points are kept
/// with their last iterate and `converged = false`.
pub fn sample_curve(problem: &SpeedProblem, lambdas: &[f64], tol: f64) -> Result<DispersionCurve> {
    if lambdas.iter().any(|&l| !(l >= 0.0)) {
        return Err(param("lambdas", "must be nonnegative"));
    }
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(param("lambdas", "must be strictly increasing"));
    }
    let points = lambdas
        .par_iter()
        .map(|&lambda| {
            match principal_eigenvalue(&problem.eigenproblem(lambda), tol, problem.max_iter) {
                Ok(res) => Ok(CurvePoint {
                    lambda,
                    mu: res.mu,
                    converged: true,
                    iterations: res.iterations,
                }),
                Err(Error::NonConvergence {
                    iterations, last, ..
                }) => Ok(CurvePoint {
                    lambda,
                    mu: last,
                    converged: false,
                    iterations,
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DispersionCurve {
        direction: problem.direction(),
        points,
        grid: problem.grid(),
        tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    /// Largest `μ_mid − (μ_left + μ_right)/2` over midpoint triples; negative
    /// when every triple is strictly convex.
    pub worst_violation: f64,
    pub at_lambda: f64,
    pub triples: usize,
}

impl ConvexityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.worst_violation <= tol
    }
}

pub fn convexity_check(curve: &DispersionCurve) -> ConvexityReport {
    let mut report = ConvexityReport {
        worst_violation: f64::NEG_INFINITY,
        at_lambda: f64::NAN,
        triples: 0,
    };
    for w in curve.points.windows(3) {
        let (a, m, b) = (w[0], w[1], w[2]);
        let mid = 0.5 * (a.lambda + b.lambda);
        if (m.lambda - mid).abs() > 1e-9 * mid.abs().max(1.0) {
            continue;
        }
        report.triples += 1;
        let violation = m.mu - 0.5 * (a.mu + b.mu);
        if violation > report.worst_violation {
            report.worst_violation = violation;
            report.at_lambda = m.lambda;
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedResult {
    /// `min_λ (μ(λ)/λ + ελ)`; equals `c*` when `epsilon == 0`.
    pub c_star: f64,
    pub lambda_star: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub evaluations: usize,
    pub epsilon: f64,
    /// Absolute speed tolerance the search was run to.
    pub speed_tol: f64,
    pub eigen_tol: f64,
}

impl SpeedResult {
    pub fn c_star_eps(&self) -> Option<f64> {
        (self.epsilon > 0.0).then_some(self.c_star)
    }
}

/// `c* = inf_{λ>0} μ(λ)/λ`, with `λ*` located to relative accuracy `tol_c`.
pub fn minimal_speed(problem: &SpeedProblem, tol_c: f64) -> Result<SpeedResult> {
    regularized_minimal_speed(problem, 0.0, tol_c)
}

/// `inf_{λ>0} (μ(λ)/λ + ελ)`; the ε-term is realized by the eigenproblem's
/// `ε∂²` regularization, whose only spectral effect is `μ + ελ²`.
pub fn regularized_minimal_speed(
    problem: &SpeedProblem,
    epsilon: f64,
    tol_c: f64,
) -> Result<SpeedResult> {
    if !(epsilon >= 0.0) {
        return Err(param("epsilon", "must be nonnegative"));
    }
    if !(tol_c > 0.0) {
        return Err(param("tol_c", "must be positive"));
    }
    let r = problem.growth_rate();
    if !(r > 0.0) {
        return Err(param("growth_rate", "minimal speed needs f'(0) > 0"));
    }
    let scale = r.sqrt();
    let left_floor = 0.05 * scale;
    let eigen_tol = DEFAULT_TOL.min(0.01 * tol_c * left_floor);
    let regularized = problem.clone().with_epsilon(epsilon);
    let mut evaluations = 0usize;
    let mut g = |lambda: f64| -> Result<f64> {
        evaluations += 1;
        Ok(regularized.mu(lambda, eigen_tol)? / lambda)
    };

    let (mut a, mut m, mut b) = (0.1 * scale, scale, 10.0 * scale);
    let (mut ga, mut gm, mut gb) = (g(a)?, g(m)?, g(b)?);
    if gm >= ga && gm >= gb {
        return Err(Error::Structure(format!(
            "mu/lambda is not unimodal: g({a}) = {ga}, g({m}) = {gm}, g({b}) = {gb}"
        )));
    }
    while gm >= ga {
        (b, gb, m, gm) = (m, gm, a, ga);
        a *= 0.5;
        if a < left_floor {
            return Err(Error::Structure(format!(
                "mu/lambda still decreasing towards lambda = {a}; expected descent from the left edge"
            )));
        }
        ga = g(a)?;
    }
    while gm >= gb {
        (a, ga, m, gm) = (m, gm, b, gb);
        b *= 2.0;
        if b > 1e3 * scale {
            return Err(Error::Structure(format!(
                "mu/lambda still decreasing at lambda = {b}; quadratic growth not observed"
            )));
        }
        gb = g(b)?;
    }
    let _ = (ga, gb);

    let (mut best_l, mut best_g) = (m, gm);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    let mut iterations = 0;
    while b - a > tol_c * 0.5 * (a + b) {
        iterations += 1;
        if gc < gd {
            b = d;
            (d, gd) = (c, gc);
            c = b - INV_PHI * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            (c, gc) = (d, gd);
            d = a + INV_PHI * (b - a);
            gd = g(d)?;
        }
        for (l, v) in [(c, gc), (d, gd)] {
            if v < best_g {
                (best_l, best_g) = (l, v);
            }
        }
    }
    for (l, v) in [(c, gc), (d, gd)] {
        if v < best_g {
            (best_l, best_g) = (l, v);
        }
    }
    Ok(SpeedResult {
        c_star: best_g,
        lambda_star: best_l,
        bracket: (a, b),
        iterations,
        evaluations,
        epsilon,
        speed_tol: tol_c * best_g,
        eigen_tol,
    })
}

/// The decay rate `λ_c ∈ (0, λ*]` of the front moving at speed `c ≥ c*`:
/// the smaller root of `μ(λ) = cλ`.
pub fn lambda_for_speed(problem: &SpeedProblem, speed: &SpeedResult, c: f64) -> Result<f64> {
    if speed.epsilon != 0.0 {
        return Err(param("speed", "needs the unregularized minimal speed"));
    }
    let tangency = 10.0 * speed.speed_tol;
    if c < speed.c_star - tangency {
        return Err(Error::Ordering {
            speed: c,
            c_star: speed.c_star,
        });
    }
    if (c - speed.c_star).abs() <= tangency {
        return Ok(speed.lambda_star);
    }
    // h(0) = μ(0) = r > 0 and h(λ*) = λ*(c* − c) < 0.
    let (mut lo, mut hi) = (0.0, speed.lambda_star);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if problem.mu(mid, speed.eigen_tol)? - c * mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
