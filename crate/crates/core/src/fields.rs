//! Space-time periodic, divergence-free, mean-zero advection fields.
//!
//! The two-dimensional parametric fields come from a stream function
//! `ψ(x, t)` with `b = (∂ψ/∂x₂, −∂ψ/∂x₁)`, so they are solenoidal exactly.
//! Tabulated fields are sampled data with multilinear interpolation and can
//! violate both constraints; [`divergence_residual`] and [`mean_residual`]
//! measure by how much.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{param, Error, Result};
use crate::grid::CellGrid;
use crate::spectral::PeriodicSpectral;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    Zero,
    /// `b = (A·sin(2π m₂ x₂)·(1 + ε_t·sin(2π m_t t)), 0)`
    Shear,
    /// Stream function `(A/2π)·sin(2π m₁ x₁)·sin(2π m₂ x₂)·(1 + ε_t·sin(2π m_t t))`.
    Cellular,
    Tabulated(TabulatedField),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub amplitude: f64,
    pub modes: [u32; 2],
    pub temporal_depth: f64,
    pub temporal_freq: u32,
}

impl FieldSpec {
    pub fn zero() -> Self {
        Self {
            kind: FieldKind::Zero,
            amplitude: 0.0,
            modes: [1, 1],
            temporal_depth: 0.0,
            temporal_freq: 1,
        }
    }

    pub fn shear(amplitude: f64) -> Self {
        Self {
            kind: FieldKind::Shear,
            amplitude,
            ..Self::zero()
        }
    }

    pub fn cellular(amplitude: f64) -> Self {
        Self {
            kind: FieldKind::Cellular,
            amplitude,
            ..Self::zero()
        }
    }

    pub fn tabulated(table: TabulatedField) -> Self {
        Self {
            kind: FieldKind::Tabulated(table),
            amplitude: 1.0,
            ..Self::zero()
        }
    }

    pub fn with_modes(mut self, m1: u32, m2: u32) -> Self {
        self.modes = [m1, m2];
        self
    }

    /// Temporal modulation `1 + depth·sin(2π freq t)`.
    pub fn with_modulation(mut self, depth: f64, freq: u32) -> Self {
        self.temporal_depth = depth;
        self.temporal_freq = freq;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() {
            return Err(param("amplitude", "must be finite"));
        }
        if !(0.0..=1.0).contains(&self.temporal_depth) {
            return Err(param(
                "eps_t",
                format!("must lie in [0, 1], got {}", self.temporal_depth),
            ));
        }
        if matches!(self.kind, FieldKind::Shear | FieldKind::Cellular)
            && (self.modes[0] == 0 || self.modes[1] == 0)
        {
            return Err(param(
                "modes",
                "spatial frequencies must be positive integers",
            ));
        }
        if self.temporal_freq == 0 && self.temporal_depth != 0.0 {
            return Err(param(
                "m_t",
                "temporal frequency must be a positive integer",
            ));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        match self.kind {
            FieldKind::Zero => true,
            FieldKind::Shear | FieldKind::Cellular => self.amplitude == 0.0,
            FieldKind::Tabulated(ref t) => t.values.iter().all(|v| v[0] == 0.0 && v[1] == 0.0),
        }
    }

    /// True when `b` does not depend on `t`.
    pub fn is_steady(&self) -> bool {
        match self.kind {
            FieldKind::Zero => true,
            FieldKind::Shear | FieldKind::Cellular => self.temporal_depth == 0.0,
            FieldKind::Tabulated(ref t) => t.nt == 1,
        }
    }

    fn modulation(&self, t: f64) -> f64 {
        1.0 + self.temporal_depth * (2.0 * PI * self.temporal_freq as f64 * t).sin()
    }

    pub fn evaluate(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let [m1, m2] = [self.modes[0] as f64, self.modes[1] as f64];
        match &self.kind {
            FieldKind::Zero => [0.0, 0.0],
            FieldKind::Shear => {
                let a = self.amplitude * self.modulation(t);
                [a * (2.0 * PI * m2 * x[1]).sin(), 0.0]
            }
            FieldKind::Cellular => {
                let a = self.amplitude * self.modulation(t);
                let (s1, c1) = (2.0 * PI * m1 * x[0]).sin_cos();
                let (s2, c2) = (2.0 * PI * m2 * x[1]).sin_cos();
                [a * m2 * s1 * c2, -a * m1 * c1 * s2]
            }
            FieldKind::Tabulated(table) => table.interpolate(x, t),
        }
    }

    /// Largest |b| over a cell grid and its time samples.
    pub fn sup_norm(&self, grid: &CellGrid) -> f64 {
        let mut sup: f64 = 0.0;
        for j in 0..grid.nt() {
            let t = j as f64 * grid.dt();
            for x in grid.points() {
                let [b1, b2] = self.evaluate(x, t);
                sup = sup.max(b1.hypot(b2));
            }
        }
        sup
    }
}

/// Velocity samples on a uniform `n₁ × n₂ × n_t` lattice of the unit cell and period.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedField {
    n1: usize,
    n2: usize,
    nt: usize,
    /// Index `i1 + n1·(i2 + n2·it)`.
    values: Vec<[f64; 2]>,
}

impl TabulatedField {
    pub fn new(n1: usize, n2: usize, nt: usize, values: Vec<[f64; 2]>) -> Result<Self> {
        let expected = n1 * n2 * nt;
        if n1 == 0 || n2 == 0 || nt == 0 || values.len() != expected {
            return Err(Error::Shape {
                expected,
                actual: values.len(),
            });
        }
        Ok(Self { n1, n2, nt, values })
    }

    /// Samples a function on the lattice nodes `(i1/n1, i2/n2, it/nt)`.
    pub fn from_fn(n1: usize, n2: usize, nt: usize, f: impl Fn([f64; 2], f64) -> [f64; 2]) -> Self {
        let mut values = Vec::with_capacity(n1 * n2 * nt);
        for it in 0..nt {
            for i2 in 0..n2 {
                for i1 in 0..n1 {
                    let x = [i1 as f64 / n1 as f64, i2 as f64 / n2 as f64];
                    values.push(f(x, it as f64 / nt as f64));
                }
            }
        }
        Self { n1, n2, nt, values }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.nt)
    }

    /// Reads `x1,x2,t,b1,b2` rows. Coordinates must form a uniform lattice
    /// with nodes at `i/n` in each of the three directions.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            if record.len() != 5 {
                return Err(param(
                    "csv",
                    format!("expected 5 columns, found {}", record.len()),
                ));
            }
            let mut row = [0.0; 5];
            for (slot, field) in row.iter_mut().zip(record.iter()) {
                *slot = field
                    .parse()
                    .map_err(|_| param("csv", format!("not a number: {field:?}")))?;
            }
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn from_rows(rows: &[[f64; 5]]) -> Result<Self> {
        let axis_len = |col: usize| {
            let mut vals: Vec<f64> = rows.iter().map(|r| r[col]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            vals.len()
        };
        let (n1, n2, nt) = (axis_len(0), axis_len(1), axis_len(2));
        let expected = n1 * n2 * nt;
        if rows.len() != expected {
            return Err(Error::Shape {
                expected,
                actual: rows.len(),
            });
        }
        let mut values = vec![[f64::NAN; 2]; expected];
        for r in rows {
            let i1 = lattice_index(r[0], n1, "x1")?;
            let i2 = lattice_index(r[1], n2, "x2")?;
            let it = lattice_index(r[2], nt, "t")?;
            values[i1 + n1 * (i2 + n2 * it)] = [r[3], r[4]];
        }
        if values.iter().any(|v| v[0].is_nan()) {
            return Err(param("csv", "lattice has duplicate or missing nodes"));
        }
        Self::new(n1, n2, nt, values)
    }

    fn at(&self, i1: usize, i2: usize, it: usize) -> [f64; 2] {
        self.values[i1 % self.n1 + self.n1 * (i2 % self.n2 + self.n2 * (it % self.nt))]
    }

    /// Trilinear interpolation with periodic wraparound.
    pub fn interpolate(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let locate = |v: f64, n: usize| {
            let s = v.rem_euclid(1.0) * n as f64;
            let i = s.floor();
            ((i as usize) % n, s - i)
        };
        let (i1, w1) = locate(x[0], self.n1);
        let (i2, w2) = locate(x[1], self.n2);
        let (it, wt) = locate(t, self.nt);
        let mut out = [0.0; 2];
        for (dt, ft) in [(0, 1.0 - wt), (1, wt)] {
            for (d2, f2) in [(0, 1.0 - w2), (1, w2)] {
                for (d1, f1) in [(0, 1.0 - w1), (1, w1)] {
                    let weight = ft * f2 * f1;
                    if weight != 0.0 {
                        let v = self.at(i1 + d1, i2 + d2, it + dt);
                        out[0] += weight * v[0];
                        out[1] += weight * v[1];
                    }
                }
            }
        }
        out
    }
}

fn lattice_index(v: f64, n: usize, name: &'static str) -> Result<usize> {
    let s = v * n as f64;
    let i = s.round();
    if (s - i).abs() > 1e-6 || i < 0.0 || i as usize >= n {
        return Err(param(
            "csv",
            format!("{name} = {v} is not on a uniform 1/{n} lattice in [0, 1)"),
        ));
    }
    Ok(i as usize)
}

/// Velocity components sampled on the nodes of a cell grid at time `t`.
pub fn sample(spec: &FieldSpec, grid: &CellGrid, t: f64, b1: &mut [f64], b2: &mut [f64]) {
    for (i, x) in grid.points().enumerate() {
        let v = spec.evaluate(x, t);
        b1[i] = v[0];
        b2[i] = v[1];
    }
}

/// Velocity on a fixed cell grid, cached across time queries.
///
/// Parametric fields factor as `m(t)·B(x)`; only the scalar `m(t)` changes
/// between calls. Tabulated fields are resampled when `t` changes.
pub struct GridSampler {
    spec: FieldSpec,
    grid: CellGrid,
    b1: Vec<f64>,
    b2: Vec<f64>,
    separable: bool,
    last_t: f64,
}

impl GridSampler {
    pub fn new(spec: &FieldSpec, grid: &CellGrid) -> Self {
        let n = grid.len();
        let separable = !matches!(spec.kind, FieldKind::Tabulated(_));
        let mut sampler = Self {
            spec: spec.clone(),
            grid: *grid,
            b1: vec![0.0; n],
            b2: vec![0.0; n],
            separable,
            last_t: f64::NAN,
        };
        if separable {
            let mut unmodulated = spec.clone();
            unmodulated.temporal_depth = 0.0;
            sample(&unmodulated, grid, 0.0, &mut sampler.b1, &mut sampler.b2);
        }
        sampler
    }

    /// Returns `(scale, B₁, B₂)` with `b(x_i, t) = scale·(B₁[i], B₂[i])`.
    pub fn at(&mut self, t: f64) -> (f64, &[f64], &[f64]) {
        if self.separable {
            return (self.spec.modulation(t), &self.b1, &self.b2);
        }
        if t != self.last_t {
            sample(&self.spec, &self.grid, t, &mut self.b1, &mut self.b2);
            self.last_t = t;
        }
        (1.0, &self.b1, &self.b2)
    }
}

/// Max over grid nodes and time samples of the spectral divergence of `b`.
pub fn divergence_residual(spec: &FieldSpec, grid: &CellGrid) -> f64 {
    if grid.dim() == 1 || spec.is_zero() {
        return 0.0;
    }
    let n = grid.len();
    let mut sp = PeriodicSpectral::new(grid);
    let (mut b1, mut b2) = (vec![0.0; n], vec![0.0; n]);
    let mut hat1 = vec![Complex64::default(); n];
    let mut hat2 = vec![Complex64::default(); n];
    let steps = if spec.is_steady() { 1 } else { grid.nt() };
    let mut worst: f64 = 0.0;
    for j in 0..steps {
        sample(spec, grid, j as f64 * grid.dt(), &mut b1, &mut b2);
        PeriodicSpectral::real_to_complex(&b1, &mut hat1);
        PeriodicSpectral::real_to_complex(&b2, &mut hat2);
        sp.forward(&mut hat1);
        sp.forward(&mut hat2);
        for i in 0..n {
            let i1 = Complex64::new(0.0, sp.deriv_symbol(i, 0));
            let i2 = Complex64::new(0.0, sp.deriv_symbol(i, 1));
            hat1[i] = i1 * hat1[i] + i2 * hat2[i];
        }
        sp.inverse(&mut hat1);
        worst = hat1.iter().fold(worst, |m, z| m.max(z.re.abs()));
    }
    worst
}

/// Absolute space-time average of each velocity component.
pub fn mean_residual(spec: &FieldSpec, grid: &CellGrid) -> Vec<f64> {
    let mut sum = [0.0; 2];
    for j in 0..grid.nt() {
        let t = j as f64 * grid.dt();
        for x in grid.points() {
            let v = spec.evaluate(x, t);
            sum[0] += v[0];
            sum[1] += v[1];
        }
    }
    let count = (grid.len() * grid.nt()) as f64;
    sum.iter()
        .take(grid.dim())
        .map(|s| (s / count).abs())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_field_evaluates_to_zero() {
        assert_eq!(FieldSpec::zero().evaluate([0.3, 0.7], 0.4), [0.0, 0.0]);
    }

    #[test]
    fn shear_closed_form() {
        let b = FieldSpec::shear(1.0).evaluate([0.0, 0.25], 0.0);
        assert_abs_diff_eq!(b[0], 1.0, epsilon = 1e-15);
        assert_eq!(b[1], 0.0);
    }

    #[test]
    fn cellular_vanishes_at_cell_center() {
        let spec = FieldSpec::cellular(1.0);
        for t in [0.0, 0.3, 0.9] {
            let b = spec.evaluate([0.25, 0.25], t);
            assert_abs_diff_eq!(b[0], 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(b[1], 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn cellular_matches_stream_function_derivatives() {
        // Central differences of ψ as an independent check of b = (ψ_y, −ψ_x).
        let spec = FieldSpec::cellular(1.3)
            .with_modes(2, 1)
            .with_modulation(0.5, 2);
        let psi = |x: f64, y: f64, t: f64| {
            1.3 / (2.0 * PI)
                * (4.0 * PI * x).sin()
                * (2.0 * PI * y).sin()
                * (1.0 + 0.5 * (4.0 * PI * t).sin())
        };
        let h = 1e-5;
        for &(x, y, t) in &[(0.1, 0.2, 0.3), (0.77, 0.41, 0.05)] {
            let b = spec.evaluate([x, y], t);
            let psi_y = (psi(x, y + h, t) - psi(x, y - h, t)) / (2.0 * h);
            let psi_x = (psi(x + h, y, t) - psi(x - h, y, t)) / (2.0 * h);
            assert_abs_diff_eq!(b[0], psi_y, epsilon = 1e-8);
            assert_abs_diff_eq!(b[1], -psi_x, epsilon = 1e-8);
        }
    }

    #[test]
    fn divergence_of_zero_and_cellular() {
        let grid = CellGrid::new(2, 64, 16).unwrap();
        assert_eq!(divergence_residual(&FieldSpec::zero(), &grid), 0.0);
        let cell = FieldSpec::cellular(1.0);
        assert!(divergence_residual(&cell, &grid) <= 1e-10);
    }

    #[test]
    fn divergence_detects_compressible_perturbation() {
        // (sin(2πx₁)/2π, 0) added to a cellular field: analytic divergence cos(2πx₁).
        let cell = FieldSpec::cellular(1.0);
        let table = TabulatedField::from_fn(64, 64, 1, |x, t| {
            let b = cell.evaluate(x, t);
            [b[0] + (2.0 * PI * x[0]).sin() / (2.0 * PI), b[1]]
        });
        let grid = CellGrid::new(2, 64, 16).unwrap();
        let r = divergence_residual(&FieldSpec::tabulated(table), &grid);
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-9);

        // A non-periodic ramp x₁ has unit divergence away from the seam and a jump at it.
        let ramp = TabulatedField::from_fn(64, 64, 1, |x, _| [x[0], 0.0]);
        assert!(divergence_residual(&FieldSpec::tabulated(ramp), &grid) >= 1.0);
    }

    #[test]
    fn means() {
        let grid = CellGrid::new(2, 64, 16).unwrap();
        assert_eq!(mean_residual(&FieldSpec::zero(), &grid), vec![0.0, 0.0]);
        for m in mean_residual(&FieldSpec::shear(1.0), &grid) {
            assert!(m <= 1e-12);
        }
        let constant = TabulatedField::from_fn(8, 8, 2, |_, _| [0.3, 0.0]);
        let m = mean_residual(&FieldSpec::tabulated(constant), &grid);
        assert_abs_diff_eq!(m[0], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(m[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn tabulated_shape_error() {
        assert!(matches!(
            TabulatedField::new(4, 4, 2, vec![[0.0; 2]; 31]),
            Err(Error::Shape {
                expected: 32,
                actual: 31
            })
        ));
    }

    #[test]
    fn tabulated_mean_converges_under_refinement() {
        // Smooth mean-zero data sampled coarsely; the interpolated mean shrinks as the
        // evaluation grid refines against a fixed lattice of off-node samples.
        let f = |x: [f64; 2], _t: f64| [(2.0 * PI * (x[0] + 0.1)).sin().powi(3), 0.0];
        let table = FieldSpec::tabulated(TabulatedField::from_fn(12, 12, 1, f));
        let coarse = mean_residual(&table, &CellGrid::new(2, 8, 16).unwrap())[0];
        let fine = mean_residual(&table, &CellGrid::new(2, 64, 16).unwrap())[0];
        assert!(fine <= coarse + 1e-15, "coarse {coarse} fine {fine}");
    }

    #[test]
    fn interpolation_reproduces_nodes_and_wraps() {
        let table = TabulatedField::from_fn(8, 4, 2, |x, t| [x[0] + 10.0 * x[1], t]);
        assert_abs_diff_eq!(
            table.interpolate([0.25, 0.5], 0.0)[0],
            5.25,
            epsilon = 1e-12
        );
        let a = table.interpolate([0.3, 0.1], 0.2);
        let b = table.interpolate([2.3, -0.9], 3.2);
        assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-12);
        assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-12);
    }

    #[test]
    fn csv_lattice_round_trip() {
        let dir = std::env::temp_dir().join(format!("frontspeed-tab-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.csv");
        let mut text = String::from("x1,x2,t,b1,b2\n");
        for it in 0..2 {
            for i2 in 0..4 {
                for i1 in 0..4 {
                    let (x1, x2, t) = (i1 as f64 / 4.0, i2 as f64 / 4.0, it as f64 / 2.0);
                    text += &format!("{x1},{x2},{t},{},{}\n", x1 + t, -x2);
                }
            }
        }
        std::fs::write(&path, text).unwrap();
        let table = TabulatedField::from_csv(&path).unwrap();
        assert_eq!(table.shape(), (4, 4, 2));
        assert_eq!(table.interpolate([0.5, 0.25], 0.5), [1.0, -0.25]);
        std::fs::write(
            &path,
            "x1,x2,t,b1,b2\n0,0,0,1,1\n0.5,0,0,1,1\n0,0.5,0,1,1\n",
        )
        .unwrap();
        assert!(matches!(
            TabulatedField::from_csv(&path),
            Err(Error::Shape { .. })
        ));
    }
}
