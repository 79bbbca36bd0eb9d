//! Shared test fixtures: an exact simple-wave solution of the system.
//!
//! Initial data lying on a single level curve of the slow Riemann invariant
//! (`z = const`) evolve as a simple wave: each state rides unchanged along a
//! straight characteristic `x = xi + lambda(v0(xi)) t`, so the exact
//! pre-breaking solution is computable to machine precision by inverting
//! that relation. This gives an independent reference for solver accuracy,
//! invariant transport and entropy production.

use depolab::characteristics::{eigenvalues, riemann_z, PhysState};
use depolab::grid::{Boundary, Field1D, GridSpec};

pub struct SimpleWave {
    pub z_star: f64,
    amplitude: f64,
    mean_rho: f64,
}

impl SimpleWave {
    /// Wave riding on the curve through `(1, 0)`: `z* = -2 sqrt(2)`.
    pub fn standard() -> Self {
        SimpleWave {
            z_star: riemann_z(PhysState::new(1.0, 0.0)).unwrap(),
            amplitude: 0.15,
            mean_rho: 1.0,
        }
    }

    /// Slope that keeps `(rho, u)` on the `z = z*` curve; `z` is strictly
    /// increasing in `u`, so bisection is safe.
    pub fn u_of_rho(&self, rho: f64) -> f64 {
        let (mut lo, mut hi) = (-3.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if riemann_z(PhysState::new(rho, mid)).unwrap() < self.z_star {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn rho0(&self, x: f64) -> f64 {
        self.mean_rho + self.amplitude * (2.0 * std::f64::consts::PI * x).sin()
    }

    pub fn state0(&self, x: f64) -> PhysState {
        let rho = self.rho0(x.rem_euclid(1.0));
        PhysState::new(rho, self.u_of_rho(rho))
    }

    fn lambda0(&self, x: f64) -> f64 {
        eigenvalues(self.state0(x)).unwrap().1
    }

    /// Exact state at `(t, x)` on the unit-periodic domain (pre-breaking):
    /// bisect for the foot point `xi` of the characteristic through `(t, x)`.
    pub fn state(&self, t: f64, x: f64) -> PhysState {
        let (mut lo, mut hi) = (x - 2.0 * t - 1e-9, x - 0.25 * t + 1e-9);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mid + self.lambda0(mid) * t < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.state0(0.5 * (lo + hi))
    }

    /// Sample the exact solution on an `n`-cell unit-periodic grid.
    pub fn field(&self, n: usize, t: f64) -> Field1D {
        let grid = GridSpec::new(0.0, 1.0 / n as f64, n, Boundary::Periodic).unwrap();
        let mut f = Field1D::from_fn(grid, |x| {
            let p = self.state(t, x);
            (p.rho, p.u)
        });
        f.time = t;
        f
    }
}
