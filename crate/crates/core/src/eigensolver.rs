//! Principal eigenvalue `μ(λ)` of the periodic-parabolic operator
//!
//! ```text
//! L^λ Φ = ΔΦ + (b − 2λk)·∇Φ + ((1+ε)λ² − λ b·k + r − δ)Φ − Φ_t
//! ```
//!
//! on space-time periodic functions, computed from the one-period solution
//! map of `w_t = L^λ w + w_t`: its dominant eigenvalue is `e^μ` with a
//! positive eigenvector, so power iteration with sup-norm renormalization
//! converges from any positive start.
//!
//! Time stepping is the integrating-factor RK4 scheme in Fourier space. Every
//! constant-coefficient term (the Laplacian, the `−2λk·∇` drift and the
//! constant part of the zeroth-order coefficient) sits in the exact factor;
//! only `b·∇w − λ(b·k)w` is treated explicitly. Constant shifts of the
//! operator therefore scale the discrete period map exactly.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{param, Error, Result};
use crate::fields::{FieldSpec, GridSampler};
use crate::grid::CellGrid;
use crate::spectral::{periodic_derivative_1d, PeriodicSpectral};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenProblem {
    pub field: FieldSpec,
    /// `r = f'(0)`
    pub growth_rate: f64,
    pub direction: [f64; 2],
    pub lambda: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub grid: CellGrid,
}

impl EigenProblem {
    pub fn new(
        field: FieldSpec,
        growth_rate: f64,
        direction: &[f64],
        lambda: f64,
        grid: CellGrid,
    ) -> Result<Self> {
        if direction.len() != grid.dim() {
            return Err(param(
                "direction",
                format!(
                    "has {} components on a {}-D grid",
                    direction.len(),
                    grid.dim()
                ),
            ));
        }
        let mut k = [0.0; 2];
        k[..direction.len()].copy_from_slice(direction);
        let problem = Self {
            field,
            growth_rate,
            direction: k,
            lambda,
            epsilon: 0.0,
            delta: 0.0,
            grid,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.direction[0].hypot(self.direction[1]);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(param("direction", format!("not unit (|k| = {norm})")));
        }
        for (name, v) in [
            ("lambda", self.lambda),
            ("epsilon", self.epsilon),
            ("delta", self.delta),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(param(
                    name,
                    format!("must be finite and nonnegative, got {v}"),
                ));
            }
        }
        if !self.growth_rate.is_finite() {
            return Err(param("growth_rate", "must be finite"));
        }
        if self.grid.dim() == 1 && !self.field.is_zero() {
            return Err(param(
                "field",
                "only the zero field is admissible in one dimension",
            ));
        }
        self.field.validate()
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self {
            delta,
            ..self.clone()
        }
    }

    pub fn with_grid(&self, grid: CellGrid) -> Self {
        Self {
            grid,
            ..self.clone()
        }
    }

    /// Constant part of the zeroth-order coefficient, `(1+ε)λ² + r − δ`.
    pub fn constant_rate(&self) -> f64 {
        (1.0 + self.epsilon) * self.lambda * self.lambda + self.growth_rate - self.delta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub mu: f64,
    /// Eigenfunction at `t = 0` on the cell grid, normalized to max 1.
    pub phi: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl EigenResult {
    /// Writes `x1,x2,phi` rows (`x1,phi` in one dimension).
    pub fn write_csv<W: Write>(&self, grid: &CellGrid, mut out: W) -> Result<()> {
        if grid.dim() == 1 {
            writeln!(out, "x1,phi")?;
        } else {
            writeln!(out, "x1,x2,phi")?;
        }
        for (x, phi) in grid.points().zip(&self.phi) {
            if grid.dim() == 1 {
                writeln!(out, "{:.10e},{:.10e}", x[0], phi)?;
            } else {
                writeln!(out, "{:.10e},{:.10e},{:.10e}", x[0], x[1], phi)?;
            }
        }
        Ok(())
    }
}

/// The discrete one-period solution map of `w_t = L^λ w + w_t`.
pub struct PeriodMap {
    problem: EigenProblem,
    spectral: PeriodicSpectral,
    sampler: GridSampler,
    steps: usize,
    dt: f64,
    /// `e^{L dt/2}` and `e^{L dt}` for the constant-coefficient symbol `L`.
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    /// `i∂₁` and `i∂₂` symbols.
    d1: Vec<Complex64>,
    d2: Vec<Complex64>,
    advected: bool,
    spatial: Vec<Complex64>,
    grad: Vec<Complex64>,
}

impl PeriodMap {
    pub fn new(problem: &EigenProblem) -> Result<Self> {
        problem.validate()?;
        let grid = problem.grid;
        let spectral = PeriodicSpectral::new(&grid);
        let n = grid.len();
        let dt = grid.dt();
        let lam = problem.lambda;
        let [k1, k2] = problem.direction;
        let c0 = problem.constant_rate();
        let mut half = Vec::with_capacity(n);
        let mut full = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for i in 0..n {
            let s1 = spectral.deriv_symbol(i, 0);
            let s2 = if grid.dim() == 2 {
                spectral.deriv_symbol(i, 1)
            } else {
                0.0
            };
            let symbol = Complex64::new(
                c0 - spectral.laplacian_symbol(i),
                -2.0 * lam * (k1 * s1 + k2 * s2),
            );
            half.push((symbol * (0.5 * dt)).exp());
            full.push((symbol * dt).exp());
            d1.push(Complex64::new(0.0, s1));
            d2.push(Complex64::new(0.0, s2));
        }
        Ok(Self {
            problem: problem.clone(),
            sampler: GridSampler::new(&problem.field, &grid),
            spectral,
            steps: grid.nt(),
            dt,
            half,
            full,
            d1,
            d2,
            advected: !problem.field.is_zero(),
            spatial: vec![Complex64::default(); n],
            grad: vec![Complex64::default(); n],
        })
    }

    pub fn problem(&self) -> &EigenProblem {
        &self.problem
    }

    /// Fourier transform of `b·∇w − λ(b·k)w` for `ŵ = hat` at time `t`.
    fn explicit_terms(&mut self, hat: &[Complex64], t: f64, out: &mut [Complex64]) {
        if !self.advected {
            out.fill(Complex64::default());
            return;
        }
        let lam = self.problem.lambda;
        let [k1, k2] = self.problem.direction;
        self.spatial.copy_from_slice(hat);
        // One inverse transform yields both gradient components: the
        // derivatives are real, so ∂₁w + i∂₂w splits into re/im parts.
        for (((g, h), a), b) in self.grad.iter_mut().zip(hat).zip(&self.d1).zip(&self.d2) {
            *g = h * (a + Complex64::i() * b);
        }
        self.spectral.inverse(&mut self.spatial);
        self.spectral.inverse(&mut self.grad);
        let (scale, b1, b2) = self.sampler.at(t);
        for i in 0..out.len() {
            let w = self.spatial[i].re;
            let (g1, g2) = (self.grad[i].re, self.grad[i].im);
            let v = scale * (b1[i] * g1 + b2[i] * g2 - lam * (b1[i] * k1 + b2[i] * k2) * w);
            out[i] = Complex64::new(v, 0.0);
        }
        self.spectral.forward(out);
    }

    fn step(&mut self, hat: &mut [Complex64], t: f64, stages: &mut Stages) {
        let dt = self.dt;
        if !self.advected {
            for (h, e) in hat.iter_mut().zip(&self.full) {
                *h *= e;
            }
            return;
        }
        let Stages {
            n1,
            n2,
            n3,
            n4,
            tmp,
        } = stages;
        self.explicit_terms(hat, t, n1);
        for i in 0..hat.len() {
            tmp[i] = self.half[i] * (hat[i] + 0.5 * dt * n1[i]);
        }
        self.explicit_terms(tmp, t + 0.5 * dt, n2);
        for i in 0..hat.len() {
            tmp[i] = self.half[i] * hat[i] + 0.5 * dt * n2[i];
        }
        self.explicit_terms(tmp, t + 0.5 * dt, n3);
        for i in 0..hat.len() {
            tmp[i] = self.full[i] * hat[i] + dt * self.half[i] * n3[i];
        }
        self.explicit_terms(tmp, t + dt, n4);
        for i in 0..hat.len() {
            hat[i] = self.full[i] * hat[i]
                + dt / 6.0 * (self.full[i] * n1[i] + 2.0 * self.half[i] * (n2[i] + n3[i]) + n4[i]);
        }
    }

    /// Advances `v0` over one period without a positivity check.
    pub fn apply(&mut self, v0: &[f64]) -> Vec<f64> {
        self.run(v0, |_, _| {})
    }

    fn run(&mut self, v0: &[f64], mut visit: impl FnMut(usize, &[f64])) -> Vec<f64> {
        let n = self.problem.grid.len();
        assert_eq!(v0.len(), n, "state length does not match the cell grid");
        let mut hat = vec![Complex64::default(); n];
        PeriodicSpectral::real_to_complex(v0, &mut hat);
        self.spectral.forward(&mut hat);
        let mut stages = Stages::new(n);
        let mut slice = vec![Complex64::default(); n];
        let mut real = vec![0.0; n];
        for j in 0..self.steps {
            self.step(&mut hat, j as f64 * self.dt, &mut stages);
            if j + 1 < self.steps {
                slice.copy_from_slice(&hat);
                self.spectral.inverse(&mut slice);
                for (r, z) in real.iter_mut().zip(&slice) {
                    *r = z.re;
                }
                visit(j + 1, &real);
            }
        }
        self.spectral.inverse(&mut hat);
        hat.iter().map(|z| z.re).collect()
    }

    /// Advances `v0` over one period; fails if positivity is lost.
    pub fn propagate(&mut self, v0: &[f64]) -> Result<Vec<f64>> {
        let w = self.apply(v0);
        self.check_positive(&w)?;
        Ok(w)
    }

    /// All `n_t + 1` time slices `w(t_j)`, `t_j = j/n_t`, starting from `v0`.
    pub fn propagate_slices(&mut self, v0: &[f64]) -> Result<Vec<Vec<f64>>> {
        let mut slices = vec![v0.to_vec()];
        let last = self.run(v0, |_, w| slices.push(w.to_vec()));
        self.check_positive(&last)?;
        slices.push(last);
        Ok(slices)
    }

    fn check_positive(&self, w: &[f64]) -> Result<()> {
        let min = w.iter().copied().fold(f64::INFINITY, f64::min);
        if min <= 0.0 || !min.is_finite() {
            return Err(Error::StepSize {
                min,
                n_t: self.steps,
            });
        }
        Ok(())
    }
}

struct Stages {
    n1: Vec<Complex64>,
    n2: Vec<Complex64>,
    n3: Vec<Complex64>,
    n4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        let z = vec![Complex64::default(); n];
        Self {
            n1: z.clone(),
            n2: z.clone(),
            n3: z.clone(),
            n4: z.clone(),
            tmp: z,
        }
    }
}

pub fn propagate_period(problem: &EigenProblem, v0: &[f64]) -> Result<Vec<f64>> {
    if v0.iter().any(|&v| v <= 0.0) {
        return Err(Error::Domain(
            v0.iter().copied().fold(f64::INFINITY, f64::min),
        ));
    }
    PeriodMap::new(problem)?.propagate(v0)
}

pub fn principal_eigenvalue(
    problem: &EigenProblem,
    tol: f64,
    max_iter: usize,
) -> Result<EigenResult> {
    let start = vec![1.0; problem.grid.len()];
    principal_eigenvalue_from(problem, &start, tol, max_iter)
}

/// Power iteration on the period map from a positive starting vector.
pub fn principal_eigenvalue_from(
    problem: &EigenProblem,
    start: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<EigenResult> {
    if !(tol > 0.0) {
        return Err(param("tol", "must be positive"));
    }
    let sup = start.iter().copied().fold(0.0, f64::max);
    if start.iter().any(|&v| v <= 0.0) || sup <= 0.0 {
        return Err(Error::Domain(
            start.iter().copied().fold(f64::INFINITY, f64::min),
        ));
    }
    let mut map = PeriodMap::new(problem)?;
    let mut v: Vec<f64> = start.iter().map(|x| x / sup).collect();
    let mut previous = f64::NAN;
    for iteration in 1..=max_iter {
        let w = map.propagate(&v)?;
        let norm = w.iter().copied().fold(0.0, f64::max);
        let mu = norm.ln();
        v = w.into_iter().map(|x| x / norm).collect();
        let residual = (mu - previous).abs();
        if residual <= tol {
            return Ok(EigenResult {
                mu,
                phi: v,
                iterations: iteration,
                residual,
                converged: true,
            });
        }
        if iteration == max_iter {
            return Err(Error::NonConvergence {
                iterations: iteration,
                previous,
                last: mu,
            });
        }
        previous = mu;
    }
    Err(Error::NonConvergence {
        iterations: 0,
        previous: f64::NAN,
        last: f64::NAN,
    })
}

/// `|μ − λ² − r + λ⟨(b·k)Φ⟩/⟨Φ⟩|` with `⟨·⟩` the space-time mean over one
/// period, `Φ(t) = e^{−μt}·(period map applied to φ up to t)`.
pub fn integral_identity_residual(problem: &EigenProblem, result: &EigenResult) -> Result<f64> {
    if !result.converged {
        return Err(param("result", "eigen result did not converge"));
    }
    if problem.epsilon != 0.0 || problem.delta != 0.0 {
        return Err(param(
            "problem",
            "identity holds for epsilon = delta = 0 only",
        ));
    }
    let grid = problem.grid;
    let slices = PeriodMap::new(problem)?.propagate_slices(&result.phi)?;
    let mut sampler = GridSampler::new(&problem.field, &grid);
    let [k1, k2] = problem.direction;
    let (mut weighted, mut mass) = (0.0, 0.0);
    for (j, w) in slices.iter().take(grid.nt()).enumerate() {
        let t = j as f64 * grid.dt();
        let decay = (-result.mu * t).exp();
        let (scale, b1, b2) = sampler.at(t);
        for i in 0..w.len() {
            let phi = decay * w[i];
            weighted += scale * (b1[i] * k1 + b2[i] * k2) * phi;
            mass += phi;
        }
    }
    let lam = problem.lambda;
    let predicted = lam * lam + problem.growth_rate - lam * weighted / mass;
    Ok((result.mu - predicted).abs())
}

/// `max (L^λ ψ)/ψ` over space-time grid nodes for a positive periodic trial
/// `ψ` stored as `n_t` consecutive slices at `t_j = j/n_t`. Never below `μ(λ)`.
pub fn rayleigh_upper_bound(problem: &EigenProblem, psi: &[f64]) -> Result<f64> {
    problem.validate()?;
    let grid = problem.grid;
    let (n, nt) = (grid.len(), grid.nt());
    if psi.len() != n * nt {
        return Err(Error::Shape {
            expected: n * nt,
            actual: psi.len(),
        });
    }
    let min = psi.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::Domain(min));
    }
    // ψ_t node by node.
    let mut psi_t = vec![0.0; n * nt];
    let mut series = vec![0.0; nt];
    for i in 0..n {
        for (j, s) in series.iter_mut().enumerate() {
            *s = psi[j * n + i];
        }
        for (j, d) in periodic_derivative_1d(&series).into_iter().enumerate() {
            psi_t[j * n + i] = d;
        }
    }
    let mut spectral = PeriodicSpectral::new(&grid);
    let mut sampler = GridSampler::new(&problem.field, &grid);
    let mut grad = vec![vec![0.0; n]; grid.dim()];
    let mut lap = vec![0.0; n];
    let lam = problem.lambda;
    let [k1, k2] = problem.direction;
    let c0 = problem.constant_rate();
    let mut sup = f64::NEG_INFINITY;
    for j in 0..nt {
        let slice = &psi[j * n..(j + 1) * n];
        spectral.gradient(slice, &mut grad);
        spectral.laplacian(slice, &mut lap);
        let (scale, b1, b2) = sampler.at(j as f64 * grid.dt());
        for i in 0..n {
            let (v1, v2) = (scale * b1[i], scale * b2[i]);
            let g2 = if grid.dim() == 2 { grad[1][i] } else { 0.0 };
            let drift = (v1 - 2.0 * lam * k1) * grad[0][i] + (v2 - 2.0 * lam * k2) * g2;
            let lpsi =
                lap[i] + drift + (c0 - lam * (v1 * k1 + v2 * k2)) * slice[i] - psi_t[j * n + i];
            sup = sup.max(lpsi / slice[i]);
        }
    }
    Ok(sup)
}

/// Returns `(|μ_δ − (μ − δ)|, |μ^ε − (μ + ελ²)|)`.
pub fn shift_identities_check(
    problem: &EigenProblem,
    delta: f64,
    epsilon: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, f64)> {
    if !(delta >= 0.0 && epsilon >= 0.0) {
        return Err(param("shift", "delta and epsilon must be nonnegative"));
    }
    let base = problem.with_delta(0.0).with_epsilon(0.0);
    let mu = principal_eigenvalue(&base, tol, max_iter)?.mu;
    let mu_delta = principal_eigenvalue(&base.with_delta(delta), tol, max_iter)?.mu;
    let mu_eps = principal_eigenvalue(&base.with_epsilon(epsilon), tol, max_iter)?.mu;
    let lam2 = problem.lambda * problem.lambda;
    Ok((
        (mu_delta - (mu - delta)).abs(),
        (mu_eps - (mu + epsilon * lam2)).abs(),
    ))
}

/// A smooth positive space-time periodic function
/// `exp(Σ a_j cos(2π(p_j x₁ + q_j x₂ + s_j t) + φ_j))` with random low modes.
pub fn random_trial<R: Rng>(
    grid: &CellGrid,
    rng: &mut R,
    modes: usize,
    amplitude: f64,
) -> Vec<f64> {
    use std::f64::consts::PI;
    let terms: Vec<(f64, [f64; 3], f64)> = (0..modes)
        .map(|_| {
            let a = rng.gen_range(-amplitude..=amplitude);
            let p = rng.gen_range(-2i32..=2) as f64;
            let q = if grid.dim() == 2 {
                rng.gen_range(-2i32..=2) as f64
            } else {
                0.0
            };
            let s = rng.gen_range(-2i32..=2) as f64;
            (a, [p, q, s], rng.gen_range(0.0..2.0 * PI))
        })
        .collect();
    let mut out = Vec::with_capacity(grid.len() * grid.nt());
    for j in 0..grid.nt() {
        let t = j as f64 * grid.dt();
        for [x1, x2] in grid.points() {
            let exponent: f64 = terms
                .iter()
                .map(|(a, [p, q, s], ph)| a * (2.0 * PI * (p * x1 + q * x2 + s * t) + ph).cos())
                .sum();
            out.push(exponent.exp());
        }
    }
    out
}

/// Space-time trial built from a function of `(x, t)`.
pub fn trial_from_fn(grid: &CellGrid, f: impl Fn([f64; 2], f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len() * grid.nt());
    for j in 0..grid.nt() {
        let t = j as f64 * grid.dt();
        out.extend(grid.points().map(|x| f(x, t)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(nx: usize, nt: usize) -> CellGrid {
        CellGrid::new(2, nx, nt).unwrap()
    }

    fn cellular_problem(lambda: f64, nx: usize, nt: usize) -> EigenProblem {
        EigenProblem::new(
            FieldSpec::cellular(1.0),
            1.0,
            &[1.0, 0.0],
            lambda,
            grid(nx, nt),
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_problems() {
        let g = grid(16, 32);
        assert!(EigenProblem::new(FieldSpec::zero(), 1.0, &[2.0, 0.0], 1.0, g).is_err());
        assert!(EigenProblem::new(FieldSpec::zero(), 1.0, &[1.0, 0.0], -1.0, g).is_err());
        assert!(EigenProblem::new(FieldSpec::zero(), 1.0, &[1.0], 1.0, g).is_err());
        let g1 = CellGrid::new(1, 16, 32).unwrap();
        assert!(EigenProblem::new(FieldSpec::shear(1.0), 1.0, &[1.0], 1.0, g1).is_err());
        assert!(EigenProblem::new(FieldSpec::zero(), 1.0, &[1.0], 1.0, g1).is_ok());
    }

    #[test]
    fn heat_semigroup_fixes_constants() {
        let p = EigenProblem::new(FieldSpec::zero(), 0.0, &[1.0, 0.0], 0.0, grid(16, 32)).unwrap();
        for v in propagate_period(&p, &vec![1.0; 256]).unwrap() {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn constant_growth_without_flow() {
        let p = EigenProblem::new(FieldSpec::zero(), 1.0, &[1.0, 0.0], 1.0, grid(16, 32)).unwrap();
        let e2 = 2f64.exp();
        for v in propagate_period(&p, &vec![1.0; 256]).unwrap() {
            assert_abs_diff_eq!(v / e2, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn rejects_nonpositive_start() {
        let p = cellular_problem(0.5, 16, 32);
        let mut v = vec![1.0; 256];
        v[3] = 0.0;
        assert!(matches!(propagate_period(&p, &v), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_field_closed_form() {
        let p = EigenProblem::new(FieldSpec::zero(), 1.0, &[0.6, 0.8], 1.0, grid(16, 32)).unwrap();
        let res = principal_eigenvalue(&p, 1e-10, 50).unwrap();
        assert_abs_diff_eq!(res.mu, 2.0, epsilon = 1e-10);
        assert!(res.converged);
    }

    #[test]
    fn mu_at_zero_lambda_is_growth_rate() {
        for field in [
            FieldSpec::shear(1.0),
            FieldSpec::cellular(1.0).with_modulation(0.5, 1),
        ] {
            let p = EigenProblem::new(field, 1.0, &[1.0, 0.0], 0.0, grid(16, 64)).unwrap();
            let res = principal_eigenvalue(&p, 1e-10, 50).unwrap();
            assert_abs_diff_eq!(res.mu, 1.0, epsilon = 1e-9);
            for v in &res.phi {
                assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn non_convergence_reports_iterates() {
        let p = cellular_problem(1.0, 16, 32);
        match principal_eigenvalue(&p, 1e-9, 1) {
            Err(Error::NonConvergence {
                iterations: 1,
                last,
                ..
            }) => assert!(last.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn period_map_is_linear_under_positive_scaling() {
        let p = cellular_problem(0.8, 16, 64);
        let mut map = PeriodMap::new(&p).unwrap();
        let v: Vec<f64> = (0..256)
            .map(|i| 1.0 + 0.5 * (i as f64 * 0.1).sin())
            .collect();
        let base = map.apply(&v);
        let scaled: Vec<f64> = v.iter().map(|x| 3.7 * x).collect();
        for (a, b) in map.apply(&scaled).iter().zip(&base) {
            assert!((a - 3.7 * b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn eigenvector_independent_of_start() {
        let p = cellular_problem(1.0, 16, 64).with_grid(grid(16, 64));
        let reference = principal_eigenvalue(&p, 1e-12, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let start: Vec<f64> = (0..256).map(|_| rng.gen_range(0.1..2.0)).collect();
            let res = principal_eigenvalue_from(&p, &start, 1e-12, 100).unwrap();
            assert!(res.phi.iter().all(|&v| v > 0.0));
            let dev = res
                .phi
                .iter()
                .zip(&reference.phi)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(dev <= 1e-6, "sup deviation {dev}");
            assert_abs_diff_eq!(res.mu, reference.mu, epsilon = 1e-10);
        }
    }

    #[test]
    fn temporal_refinement_is_stable() {
        let p = cellular_problem(1.0, 16, 128);
        let a = principal_eigenvalue(&p, 1e-12, 100).unwrap().mu;
        let b = principal_eigenvalue(&p.with_grid(grid(16, 256)), 1e-12, 100)
            .unwrap()
            .mu;
        assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
    }

    #[test]
    fn identity_residuals() {
        let zero =
            EigenProblem::new(FieldSpec::zero(), 1.0, &[1.0, 0.0], 1.3, grid(16, 32)).unwrap();
        let res = principal_eigenvalue(&zero, 1e-12, 50).unwrap();
        assert!(integral_identity_residual(&zero, &res).unwrap() <= 1e-10);

        let shear =
            EigenProblem::new(FieldSpec::shear(1.0), 1.0, &[1.0, 0.0], 0.7, grid(32, 128)).unwrap();
        let res = principal_eigenvalue(&shear, 1e-12, 100).unwrap();
        // Advection strictly raises μ above λ² + r here, so the sign of the
        // b·k term matters.
        assert!(res.mu > 0.49 + 1.0 + 1e-3);
        let r = integral_identity_residual(&shear, &res).unwrap();
        assert!(r <= 1e-6, "shear residual {r}");
        let shifted = shear.with_delta(0.1);
        assert!(integral_identity_residual(&shifted, &res).is_err());
    }

    #[test]
    fn rayleigh_constant_trials() {
        let g = grid(16, 32);
        let ones = vec![1.0; g.len() * g.nt()];
        let zero = EigenProblem::new(FieldSpec::zero(), 1.0, &[1.0, 0.0], 1.0, g).unwrap();
        assert_abs_diff_eq!(
            rayleigh_upper_bound(&zero, &ones).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        let shear = EigenProblem::new(FieldSpec::shear(1.0), 1.0, &[1.0, 0.0], 1.0, g).unwrap();
        let bound = rayleigh_upper_bound(&shear, &ones).unwrap();
        assert_abs_diff_eq!(bound, 3.0, epsilon = 1e-12);
        let mu = principal_eigenvalue(&shear, 1e-10, 100).unwrap().mu;
        assert!(bound >= mu);
        let mut bad = ones.clone();
        bad[5] = -0.1;
        assert!(matches!(
            rayleigh_upper_bound(&shear, &bad),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rayleigh_bounds_mu_for_random_trials() {
        let p = cellular_problem(1.0, 16, 64).with_grid(grid(16, 64));
        let mu = principal_eigenvalue(&p, 1e-12, 100).unwrap().mu;
        let g = p.grid;
        let wobble = trial_from_fn(&g, |x, _| {
            1.0 + 0.1 * (2.0 * std::f64::consts::PI * x[0]).sin()
        });
        assert!(rayleigh_upper_bound(&p, &wobble).unwrap() >= mu - 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let psi = random_trial(&g, &mut rng, 4, 0.3);
            assert!(rayleigh_upper_bound(&p, &psi).unwrap() >= mu - 1e-8);
        }
    }

    #[test]
    fn shifts_are_exact() {
        let zero =
            EigenProblem::new(FieldSpec::zero(), 1.0, &[1.0, 0.0], 1.0, grid(16, 32)).unwrap();
        let (d, _) = shift_identities_check(&zero, 0.3, 0.0, 1e-9, 50).unwrap();
        assert!(d <= 2e-9);
        let p = cellular_problem(0.8, 16, 64);
        let (d, e) = shift_identities_check(&p, 0.3, 0.5, 1e-9, 100).unwrap();
        assert!(d <= 2e-9 && e <= 2e-9, "{d} {e}");
    }

    #[test]
    fn phi_csv_has_header_and_rows() {
        let g = grid(8, 16);
        let p = EigenProblem::new(FieldSpec::zero(), 1.0, &[1.0, 0.0], 0.5, g).unwrap();
        let res = principal_eigenvalue(&p, 1e-10, 20).unwrap();
        let mut buf = Vec::new();
        res.write_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x1,x2,phi\n"));
        assert_eq!(text.lines().count(), 65);
    }
}
