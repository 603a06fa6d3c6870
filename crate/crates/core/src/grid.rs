use crate::error::{param, Result};

/// Uniform discretization of the unit periodicity cell times one time period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellGrid {
    dim: usize,
    nx: usize,
    nt: usize,
}

impl CellGrid {
    pub fn new(dim: usize, nx: usize, nt: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(param(
                "dim",
                format!("spatial dimension must be 1 or 2, got {dim}"),
            ));
        }
        if nx < 8 || !nx.is_power_of_two() {
            return Err(param("nx", format!("need a power of two >= 8, got {nx}")));
        }
        if nt < 16 {
            return Err(param(
                "nt",
                format!("need at least 16 time steps, got {nt}"),
            ));
        }
        Ok(Self { dim, nx, nt })
    }

    /// Default resolution for two-dimensional problems: 64² nodes, 512 steps per period.
    pub fn default_2d() -> Self {
        Self {
            dim: 2,
            nx: 64,
            nt: 512,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn h(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.nt as f64
    }

    pub fn len(&self) -> usize {
        self.nx.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinates of node `idx`; the first coordinate varies fastest.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let h = self.h();
        match self.dim {
            1 => [idx as f64 * h, 0.0],
            _ => [(idx % self.nx) as f64 * h, (idx / self.nx) as f64 * h],
        }
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn with_resolution(&self, nx: usize, nt: usize) -> Result<Self> {
        Self::new(self.dim, nx, nt)
    }
}

impl std::fmt::Display for CellGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.dim == 1 {
            write!(f, "{}x{}", self.nx, self.nt)
        } else {
            write!(f, "{}^2x{}", self.nx, self.nt)
        }
    }
}
