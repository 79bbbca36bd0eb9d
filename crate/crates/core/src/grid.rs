//! Uniform 1-D grids, sampled `(rho, u)` fields, height fields and
//! trajectories with their diagnostic series.

use crate::characteristics::PhysState;
use thiserror::Error;

/// Boundary closure used by the stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Zero-gradient ghost cells; emulates the whole line for compactly
    /// supported deviations.
    Outflow,
}

/// Geometry of a uniform cell-centered grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub dx: f64,
    pub n_cells: usize,
    pub boundary: Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GridError {
    #[error("invalid grid: dx = {dx}, n_cells = {n_cells} (need dx > 0, n_cells >= 4)")]
    InvalidGrid { dx: f64, n_cells: usize },
    #[error("fields live on different grids")]
    GridMismatch,
}

impl GridSpec {
    pub fn new(x_min: f64, dx: f64, n_cells: usize, boundary: Boundary) -> Result<Self, GridError> {
        if !(dx > 0.0) || n_cells < 4 {
            return Err(GridError::InvalidGrid { dx, n_cells });
        }
        Ok(Self { x_min, dx, n_cells, boundary })
    }

    /// Center of cell `i`.
    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.dx * self.n_cells as f64
    }

    /// Resolve a (possibly out-of-range) cell index through the boundary.
    pub fn wrap(&self, i: isize) -> usize {
        let n = self.n_cells as isize;
        match self.boundary {
            Boundary::Periodic => (((i % n) + n) % n) as usize,
            Boundary::Outflow => i.clamp(0, n - 1) as usize,
        }
    }
}

/// Grid-sampled `(rho, u)` profile at one instant.
#[derive(Debug, Clone)]
pub struct Field1D {
    pub grid: GridSpec,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub time: f64,
}

impl Field1D {
    pub fn from_fn<F: Fn(f64) -> (f64, f64)>(grid: GridSpec, f: F) -> Self {
        let mut rho = Vec::with_capacity(grid.n_cells);
        let mut u = Vec::with_capacity(grid.n_cells);
        for i in 0..grid.n_cells {
            let (r, v) = f(grid.cell_center(i));
            rho.push(r);
            u.push(v);
        }
        Self { grid, rho, u, time: 0.0 }
    }

    pub fn constant(grid: GridSpec, state: PhysState) -> Self {
        Self {
            rho: vec![state.rho; grid.n_cells],
            u: vec![state.u; grid.n_cells],
            grid,
            time: 0.0,
        }
    }

    pub fn state(&self, i: usize) -> PhysState {
        PhysState::new(self.rho[i], self.u[i])
    }

    pub fn n_cells(&self) -> usize {
        self.grid.n_cells
    }

    /// Total mass `sum rho dx`.
    pub fn mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.grid.dx
    }

    /// Total slope `sum u dx`.
    pub fn total_u(&self) -> f64 {
        self.u.iter().sum::<f64>() * self.grid.dx
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Linear interpolation of `(rho, u)` at position `x` between cell
    /// centers, honoring the boundary closure.
    pub fn sample(&self, x: f64) -> (f64, f64) {
        let g = &self.grid;
        let s = (x - g.x_min) / g.dx - 0.5;
        let i0 = s.floor();
        let frac = s - i0;
        let a = g.wrap(i0 as isize);
        let b = g.wrap(i0 as isize + 1);
        (
            self.rho[a] * (1.0 - frac) + self.rho[b] * frac,
            self.u[a] * (1.0 - frac) + self.u[b] * frac,
        )
    }

    /// Resample onto another grid by linear interpolation.
    pub fn resample_to(&self, grid: GridSpec) -> Field1D {
        let mut out = Field1D::from_fn(grid, |x| self.sample(x));
        out.time = self.time;
        out
    }

    /// L1 distance `sum (|d rho| + |d u|) dx` between fields on a common grid.
    pub fn l1_distance(&self, other: &Field1D) -> Result<f64, GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        let mut acc = 0.0;
        for i in 0..self.n_cells() {
            acc += (self.rho[i] - other.rho[i]).abs() + (self.u[i] - other.u[i]).abs();
        }
        Ok(acc * self.grid.dx)
    }
}

/// Cell-centered deposition height profile.
#[derive(Debug, Clone)]
pub struct HeightField {
    pub grid: GridSpec,
    pub h: Vec<f64>,
    pub time: f64,
}

impl HeightField {
    pub fn from_fn<F: Fn(f64) -> f64>(grid: GridSpec, f: F) -> Self {
        let h = (0..grid.n_cells).map(|i| f(grid.cell_center(i))).collect();
        Self { grid, h, time: 0.0 }
    }

    /// Centered negative gradient `-D_x h`, the discrete slope field.
    pub fn negative_gradient(&self) -> Vec<f64> {
        let n = self.grid.n_cells;
        (0..n)
            .map(|i| {
                let hp = self.h[self.grid.wrap(i as isize + 1)];
                let hm = self.h[self.grid.wrap(i as isize - 1)];
                -(hp - hm) / (2.0 * self.grid.dx)
            })
            .collect()
    }
}

/// Per-snapshot diagnostics recorded along a run.
#[derive(Debug, Clone, Copy)]
pub struct DiagnosticRow {
    pub time: f64,
    /// Max of the Riemann invariant `w` over cells (NaN outside its domain).
    pub sup_w: f64,
    /// Max of the Riemann invariant `z` over cells (NaN outside its domain).
    pub sup_z: f64,
    pub mass: f64,
    pub total_u: f64,
    /// `sum S dx` for the canonical entropy (NaN once rho < 0).
    pub entropy_integral: f64,
}

/// Snapshots plus diagnostics from a time evolution.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Field1D>,
    pub diagnostics: Vec<DiagnosticRow>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|f| f.time).collect()
    }

    pub fn last(&self) -> &Field1D {
        self.snapshots.last().expect("trajectory has at least one snapshot")
    }
}
