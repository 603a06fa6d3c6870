//! Fourier transforms and differentiation on the periodic unit cell.
//!
//! Arrays use the node layout of [`CellGrid`]: the first coordinate varies
//! fastest. First-derivative symbols vanish on the Nyquist mode so that the
//! derivative of a real field stays real; the Laplacian keeps it.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::CellGrid;

pub struct PeriodicSpectral {
    dim: usize,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// 2π·(signed wavenumber) for first derivatives, Nyquist zeroed.
    deriv: Vec<f64>,
    /// (2π·wavenumber)² including Nyquist.
    second: Vec<f64>,
    column: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl PeriodicSpectral {
    pub fn new(grid: &CellGrid) -> Self {
        let n = grid.nx();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let (deriv, second) = wavenumbers(n);
        Self {
            dim: grid.dim(),
            n,
            forward,
            inverse,
            deriv,
            second,
            column: vec![Complex64::default(); n],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        let fft = Arc::clone(&self.forward);
        self.transform(fft.as_ref(), data);
    }

    /// Inverse transform in place, normalized so that `inverse(forward(x)) == x`.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        let fft = Arc::clone(&self.inverse);
        self.transform(fft.as_ref(), data);
        let scale = 1.0 / data.len() as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn transform(&mut self, fft: &dyn Fft<f64>, data: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(data.len(), self.len());
        fft.process_with_scratch(data, &mut self.scratch);
        if self.dim == 2 {
            for col in 0..n {
                for row in 0..n {
                    self.column[row] = data[row * n + col];
                }
                fft.process_with_scratch(&mut self.column, &mut self.scratch);
                for row in 0..n {
                    data[row * n + col] = self.column[row];
                }
            }
        }
    }

    /// Symbol of ∂/∂x_axis (imaginary part) at Fourier index `idx`.
    pub fn deriv_symbol(&self, idx: usize, axis: usize) -> f64 {
        match axis {
            0 => self.deriv[idx % self.n],
            _ => self.deriv[idx / self.n],
        }
    }

    /// |κ|² at Fourier index `idx`.
    pub fn laplacian_symbol(&self, idx: usize) -> f64 {
        match self.dim {
            1 => self.second[idx],
            _ => self.second[idx % self.n] + self.second[idx / self.n],
        }
    }

    pub fn real_to_complex(values: &[f64], out: &mut [Complex64]) {
        for (z, &v) in out.iter_mut().zip(values) {
            *z = Complex64::new(v, 0.0);
        }
    }

    /// Spectral gradient of a real field. `grad[axis]` receives ∂v/∂x_axis.
    pub fn gradient(&mut self, values: &[f64], grad: &mut [Vec<f64>]) {
        let mut hat: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut hat);
        let mut work = vec![Complex64::default(); hat.len()];
        for (axis, out) in grad.iter_mut().enumerate().take(self.dim) {
            for (i, (w, h)) in work.iter_mut().zip(&hat).enumerate() {
                *w = h * Complex64::new(0.0, self.deriv_symbol(i, axis));
            }
            self.inverse(&mut work);
            for (o, w) in out.iter_mut().zip(&work) {
                *o = w.re;
            }
        }
    }

    /// Spectral Laplacian of a real field.
    pub fn laplacian(&mut self, values: &[f64], out: &mut [f64]) {
        let mut hat: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut hat);
        for (i, h) in hat.iter_mut().enumerate() {
            *h *= -self.laplacian_symbol(i);
        }
        self.inverse(&mut hat);
        for (o, h) in out.iter_mut().zip(&hat) {
            *o = h.re;
        }
    }
}

fn wavenumbers(n: usize) -> (Vec<f64>, Vec<f64>) {
    let half = n / 2;
    let mut deriv = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for j in 0..n {
        let m = if j <= half {
            j as f64
        } else {
            j as f64 - n as f64
        };
        let kappa = 2.0 * PI * m;
        deriv.push(if j == half { 0.0 } else { kappa });
        second.push(kappa * kappa);
    }
    (deriv, second)
}

/// Spectral derivative of a periodic series sampled uniformly over one unit period.
pub fn periodic_derivative_1d(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut hat: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut hat);
    for (j, h) in hat.iter_mut().enumerate() {
        let m = if 2 * j < n {
            j as f64
        } else if 2 * j == n {
            0.0
        } else {
            j as f64 - n as f64
        };
        *h *= Complex64::new(0.0, 2.0 * PI * m / n as f64);
    }
    inv.process(&mut hat);
    hat.iter().map(|z| z.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_2d() {
        let grid = CellGrid::new(2, 16, 16).unwrap();
        let mut sp = PeriodicSpectral::new(&grid);
        let orig: Vec<Complex64> = (0..grid.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), 0.0))
            .collect();
        let mut data = orig.clone();
        sp.forward(&mut data);
        sp.inverse(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn differentiates_trig_polynomials_exactly() {
        let grid = CellGrid::new(2, 16, 16).unwrap();
        let mut sp = PeriodicSpectral::new(&grid);
        let v: Vec<f64> = grid
            .points()
            .map(|[x, y]| (2.0 * PI * x).sin() * (4.0 * PI * y).cos())
            .collect();
        let mut grad = vec![vec![0.0; grid.len()]; 2];
        sp.gradient(&v, &mut grad);
        let mut lap = vec![0.0; grid.len()];
        sp.laplacian(&v, &mut lap);
        for (i, [x, y]) in grid.points().enumerate() {
            let dx = 2.0 * PI * (2.0 * PI * x).cos() * (4.0 * PI * y).cos();
            let dy = -4.0 * PI * (2.0 * PI * x).sin() * (4.0 * PI * y).sin();
            assert!((grad[0][i] - dx).abs() < 1e-11);
            assert!((grad[1][i] - dy).abs() < 1e-11);
            assert!((lap[i] + 20.0 * PI * PI * v[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn time_derivative_of_sine() {
        let n = 32;
        let v: Vec<f64> = (0..n)
            .map(|j| (2.0 * PI * j as f64 / n as f64).sin())
            .collect();
        let d = periodic_derivative_1d(&v);
        for (j, dv) in d.iter().enumerate() {
            let exact = 2.0 * PI * (2.0 * PI * j as f64 / n as f64).cos();
            assert!((dv - exact).abs() < 1e-11);
        }
    }
}
