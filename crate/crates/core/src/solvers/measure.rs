//! Measurement utilities on trajectories: shock-front tracking and discrete
//! PDE residuals.

use super::{FluxModel, SolverError};
use crate::grid::{Boundary, Trajectory};
use crate::numerics::linear_fit;

/// Fraction of the global density range a cell-to-cell jump must reach to
/// count as the discontinuity.
const JUMP_FRACTION: f64 = 0.15;

/// Locate the dominant travelling discontinuity of a trajectory and fit its
/// speed by least squares on position vs time.
///
/// The front is placed at the steepest density gradient, refined to sub-cell
/// accuracy by linear interpolation of the crossing of the mid-level between
/// the two surrounding plateaus.
pub fn measure_shock_speed(traj: &Trajectory) -> Result<f64, SolverError> {
    let mut times = Vec::new();
    let mut positions = Vec::new();

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for f in &traj.snapshots {
        lo = lo.min(f.min_rho());
        hi = hi.max(f.rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    }
    let range = hi - lo;
    if !(range > 1e-12) {
        return Err(SolverError::NoShockFound);
    }

    for f in &traj.snapshots {
        let n = f.n_cells();
        let mut steepest = 0;
        let mut jump = 0.0;
        for i in 0..n - 1 {
            let d = (f.rho[i + 1] - f.rho[i]).abs();
            if d > jump {
                jump = d;
                steepest = i;
            }
        }
        if jump < JUMP_FRACTION * range {
            continue;
        }
        let window = (n / 10).clamp(2, 20);
        let far_l = steepest.saturating_sub(window);
        let far_r = (steepest + window).min(n - 1);
        let level = 0.5 * (f.rho[far_l] + f.rho[far_r]);
        // Nearest mid-level crossing around the steepest cell.
        let mut found = None;
        for off in 0..window as isize {
            for j in [steepest as isize - off, steepest as isize + off] {
                if j < 0 || j as usize >= n - 1 {
                    continue;
                }
                let j = j as usize;
                let (a, b) = (f.rho[j] - level, f.rho[j + 1] - level);
                if a == 0.0 || a * b < 0.0 {
                    let frac = a / (a - b);
                    found = Some(f.grid.cell_center(j) + frac * f.grid.dx);
                    break;
                }
            }
            if found.is_some() {
                break;
            }
        }
        if let Some(x) = found {
            times.push(f.time);
            positions.push(x);
        }
    }

    if times.len() < 2 {
        return Err(SolverError::NoShockFound);
    }

    // Unwrap positions that crossed a periodic boundary.
    if traj.snapshots[0].grid.boundary == Boundary::Periodic {
        let span = traj.snapshots[0].grid.dx * traj.snapshots[0].n_cells() as f64;
        let mut shift = 0.0;
        for k in 1..positions.len() {
            let d = positions[k] + shift - positions[k - 1];
            if d > span / 2.0 {
                shift -= span;
            } else if d < -span / 2.0 {
                shift += span;
            }
            positions[k] += shift;
        }
    }

    let (slope, _) = linear_fit(&times, &positions);
    Ok(slope)
}

/// L1 norm of the discrete PDE residual (forward in time, centered flux
/// difference in space) for every consecutive snapshot pair.
pub fn pde_residual_l1<M: FluxModel>(traj: &Trajectory, model: &M) -> Result<Vec<f64>, SolverError> {
    let mut out = Vec::new();
    for win in traj.snapshots.windows(2) {
        let (a, b) = (&win[0], &win[1]);
        let dt = b.time - a.time;
        let dx = a.grid.dx;
        let n = a.n_cells();
        let mut acc = 0.0;
        for i in 0..n {
            let ip = a.grid.wrap(i as isize + 1);
            let im = a.grid.wrap(i as isize - 1);
            let fp = model.flux(a.state(ip));
            let fm = model.flux(a.state(im));
            let r_rho = (b.rho[i] - a.rho[i]) / dt + (fp[0] - fm[0]) / (2.0 * dx);
            let r_u = (b.u[i] - a.u[i]) / dt + (fp[1] - fm[1]) / (2.0 * dx);
            acc += r_rho.abs() + r_u.abs();
        }
        out.push(acc * dx);
    }
    Ok(out)
}
