//! The two-parameter scale invariance of the system and deposition-height
//! reconstruction.
//!
//! For any `alpha > 0` and exponent `nu`,
//!
//! ```text
//! rho'(t, x) = alpha^(2(1-nu)) rho(alpha t, alpha^nu x)
//! u'(t, x)   = alpha^(1-nu)    u(alpha t, alpha^nu x)
//! ```
//!
//! maps solutions to solutions. `nu = 1` is the plain hyperbolic scaling;
//! `nu = 2/3` is the mass-preserving one, under which the height obeys
//! `h'(t, x) = alpha^(-1/3) h(alpha t, alpha^(2/3) x)`.

use super::{evolve::snapshot_diagnostics, SolverError};
use crate::grid::{Field1D, GridSpec, HeightField, Trajectory};

/// Apply the scaling transform to a whole trajectory. Sample points map onto
/// the rescaled grid exactly, so no interpolation error enters here; use
/// [`Field1D::resample_to`] when a common grid is needed for comparisons.
pub fn rescale(traj: &Trajectory, alpha: f64, nu: f64) -> Trajectory {
    assert!(alpha > 0.0, "scale must be positive");
    let space = alpha.powf(-nu);
    let c_rho = alpha.powf(2.0 * (1.0 - nu));
    let c_u = alpha.powf(1.0 - nu);

    let snapshots: Vec<Field1D> = traj
        .snapshots
        .iter()
        .map(|f| {
            let grid = GridSpec {
                x_min: f.grid.x_min * space,
                dx: f.grid.dx * space,
                n_cells: f.grid.n_cells,
                boundary: f.grid.boundary,
            };
            Field1D {
                grid,
                rho: f.rho.iter().map(|&r| c_rho * r).collect(),
                u: f.u.iter().map(|&u| c_u * u).collect(),
                time: f.time / alpha,
            }
        })
        .collect();
    let diagnostics = snapshots.iter().map(snapshot_diagnostics).collect();
    Trajectory { snapshots, diagnostics }
}

/// Advance the deposition height alongside a trajectory: `dh/dt = rho`
/// integrated with the trapezoid rule between snapshots.
///
/// `h0` must be consistent with the initial slope, `u = -D_x h0` within
/// `tol`; the drift of that identity stays `O(dx + dt)` over the run.
pub fn reconstruct_height(
    traj: &Trajectory,
    h0: &HeightField,
    tol: f64,
) -> Result<Vec<HeightField>, SolverError> {
    let first = traj.snapshots.first().expect("trajectory has at least one snapshot");
    if h0.grid != first.grid {
        return Err(SolverError::Grid(crate::grid::GridError::GridMismatch));
    }
    let grad = h0.negative_gradient();
    let max_err = first
        .u
        .iter()
        .zip(&grad)
        .map(|(u, g)| (u - g).abs())
        .fold(0.0_f64, f64::max);
    if max_err > tol {
        return Err(SolverError::InconsistentInitialHeight { max_err, tol });
    }

    let mut heights = Vec::with_capacity(traj.snapshots.len());
    let mut h = h0.clone();
    h.time = first.time;
    heights.push(h.clone());
    for win in traj.snapshots.windows(2) {
        let dt = win[1].time - win[0].time;
        for i in 0..h.h.len() {
            h.h[i] += 0.5 * dt * (win[0].rho[i] + win[1].rho[i]);
        }
        h.time = win[1].time;
        heights.push(h.clone());
    }
    Ok(heights)
}
