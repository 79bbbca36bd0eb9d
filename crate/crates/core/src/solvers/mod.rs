//! Time evolution of the conservation-law system: viscous finite differences,
//! inviscid finite-volume schemes (Lax-Friedrichs and HLL), the evolution
//! driver with maximum-principle monitors, shock-speed measurement, scaling
//! transforms and height reconstruction.

mod evolve;
mod measure;
mod scaling;

pub use evolve::{evolve, monitor_extrema, snapshot_diagnostics, EvolveConfig, Method};
pub use measure::{measure_shock_speed, pde_residual_l1};
pub use scaling::{reconstruct_height, rescale};

use crate::characteristics::PhysState;
use crate::grid::{Field1D, GridError};
use thiserror::Error;

/// Default CFL number for the hyperbolic time-step bound.
pub const CFL_DEFAULT: f64 = 0.45;

/// Tolerance below which a cell may sit under the hyperbolic boundary
/// before it counts as having left the domain.
const HYP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SolverError {
    #[error("dt = {dt} violates the stability bound {dt_max}")]
    CflViolation { dt: f64, dt_max: f64 },
    #[error("cell {index} left the hyperbolic domain (rho={rho}, u={u})")]
    NonHyperbolicCell { index: usize, rho: f64, u: f64 },
    #[error("cell {index} drifted below the physical domain (rho={rho})")]
    NonPhysicalState { index: usize, rho: f64 },
    #[error("no travelling discontinuity found in trajectory")]
    NoShockFound,
    #[error("initial height inconsistent with u(0,.): max |u + D_x h| = {max_err} > {tol}")]
    InconsistentInitialHeight { max_err: f64, tol: f64 },
    #[error("state outside the Riemann-invariant domain in cell {index}")]
    OutsideDomain { index: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Schemes for the inviscid update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    LaxFriedrichs,
    Hll,
}

/// A two-component flux closure `(rho, u) -> (J1, J2)` with signal-speed
/// bounds, so the same finite-volume kernels drive both the deposition
/// system and the full microscopic flux from the partition function.
pub trait FluxModel: Sync {
    fn flux(&self, p: PhysState) -> [f64; 2];
    /// `(slowest, fastest)` signal speeds at a state.
    fn wave_bounds(&self, p: PhysState) -> Result<(f64, f64), SolverError>;
}

/// The deposition system's fluxes `J1 = rho u`, `J2 = rho` with analytic
/// characteristic speeds.
#[derive(Debug, Clone, Copy, Default)]
pub struct DepositionFlux;

impl FluxModel for DepositionFlux {
    fn flux(&self, p: PhysState) -> [f64; 2] {
        let (a, b) = flux(p);
        [a, b]
    }

    fn wave_bounds(&self, p: PhysState) -> Result<(f64, f64), SolverError> {
        let disc = p.discriminant();
        if disc < -HYP_SLACK {
            return Err(SolverError::NonHyperbolicCell { index: usize::MAX, rho: p.rho, u: p.u });
        }
        let q = disc.max(0.0).sqrt();
        Ok((-0.5 * (q - p.u), 0.5 * (q + p.u)))
    }
}

/// Physical flux of the system: `(rho u, rho)`.
pub fn flux(p: PhysState) -> (f64, f64) {
    (p.rho * p.u, p.rho)
}

/// Largest signal speed over all cells.
pub fn max_signal_speed<M: FluxModel>(f: &Field1D, model: &M) -> Result<f64, SolverError> {
    let mut speed = 0.0_f64;
    for i in 0..f.n_cells() {
        let (lo, hi) = model.wave_bounds(f.state(i)).map_err(|e| at_cell(e, i))?;
        speed = speed.max(lo.abs()).max(hi.abs());
    }
    Ok(speed)
}

fn at_cell(e: SolverError, i: usize) -> SolverError {
    match e {
        SolverError::NonHyperbolicCell { rho, u, .. } => {
            SolverError::NonHyperbolicCell { index: i, rho, u }
        }
        other => other,
    }
}

/// Stability bound for the inviscid schemes, `cfl dx / max_speed`.
pub fn inviscid_dt_cap(f: &Field1D, cfl: f64) -> Result<f64, SolverError> {
    let speed = max_signal_speed(f, &DepositionFlux)?;
    Ok(if speed > 0.0 { cfl * f.grid.dx / speed } else { f64::INFINITY })
}

/// Stability bound for the viscous stepper,
/// `min(cfl dx / max_speed, 0.5 dx^2 / eps)`.
pub fn viscous_dt_cap(f: &Field1D, eps: f64, cfl: f64) -> Result<f64, SolverError> {
    let hyper = inviscid_dt_cap(f, cfl)?;
    Ok(if eps > 0.0 {
        hyper.min(0.5 * f.grid.dx * f.grid.dx / eps)
    } else {
        hyper
    })
}

fn check_hyperbolic(f: &Field1D) -> Result<(), SolverError> {
    for i in 0..f.n_cells() {
        let p = f.state(i);
        if p.discriminant() < -HYP_SLACK {
            return Err(SolverError::NonHyperbolicCell { index: i, rho: p.rho, u: p.u });
        }
    }
    Ok(())
}

/// Semi-discrete right-hand side of the viscous system
/// `d/dt v = -D_x J(v) + eps D_xx v` with centered differences.
fn viscous_rhs(f: &Field1D, eps: f64, out_rho: &mut [f64], out_u: &mut [f64]) {
    let n = f.n_cells();
    let dx = f.grid.dx;
    for i in 0..n {
        let ip = f.grid.wrap(i as isize + 1);
        let im = f.grid.wrap(i as isize - 1);
        let (j1p, j2p) = flux(f.state(ip));
        let (j1m, j2m) = flux(f.state(im));
        out_rho[i] = -(j1p - j1m) / (2.0 * dx)
            + eps * (f.rho[ip] - 2.0 * f.rho[i] + f.rho[im]) / (dx * dx);
        out_u[i] = -(j2p - j2m) / (2.0 * dx)
            + eps * (f.u[ip] - 2.0 * f.u[i] + f.u[im]) / (dx * dx);
    }
}

fn euler_step(f: &Field1D, dt: f64, rhs_rho: &[f64], rhs_u: &[f64]) -> Field1D {
    let mut out = f.clone();
    for i in 0..f.n_cells() {
        out.rho[i] = f.rho[i] + dt * rhs_rho[i];
        out.u[i] = f.u[i] + dt * rhs_u[i];
    }
    out.time = f.time + dt;
    out
}

/// One explicit step of the viscous system with two-stage (Heun)
/// time integration. Conservative in both components under periodic
/// boundaries.
pub fn step_viscous(f: &Field1D, eps: f64, dt: f64) -> Result<Field1D, SolverError> {
    assert!(eps >= 0.0, "viscosity must be non-negative");
    let cap = viscous_dt_cap(f, eps, CFL_DEFAULT)?;
    if dt > cap * (1.0 + 1e-12) {
        return Err(SolverError::CflViolation { dt, dt_max: cap });
    }
    let n = f.n_cells();
    let mut k = (vec![0.0; n], vec![0.0; n]);
    viscous_rhs(f, eps, &mut k.0, &mut k.1);
    let stage = euler_step(f, dt, &k.0, &k.1);
    viscous_rhs(&stage, eps, &mut k.0, &mut k.1);
    let full = euler_step(&stage, dt, &k.0, &k.1);
    let mut out = f.clone();
    for i in 0..n {
        out.rho[i] = 0.5 * (f.rho[i] + full.rho[i]);
        out.u[i] = 0.5 * (f.u[i] + full.u[i]);
    }
    out.time = f.time + dt;
    check_hyperbolic(&out)?;
    Ok(out)
}

fn hll_flux<M: FluxModel>(model: &M, l: PhysState, r: PhysState) -> Result<[f64; 2], SolverError> {
    let (sl_l, sr_l) = model.wave_bounds(l)?;
    let (sl_r, sr_r) = model.wave_bounds(r)?;
    let sl = sl_l.min(sl_r);
    let sr = sr_l.max(sr_r);
    let fl = model.flux(l);
    let fr = model.flux(r);
    if sl >= 0.0 {
        Ok(fl)
    } else if sr <= 0.0 {
        Ok(fr)
    } else {
        let inv = 1.0 / (sr - sl);
        Ok([
            (sr * fl[0] - sl * fr[0] + sl * sr * (r.rho - l.rho)) * inv,
            (sr * fl[1] - sl * fr[1] + sl * sr * (r.u - l.u)) * inv,
        ])
    }
}

fn flux_differenced_update<M: FluxModel, FF>(
    f: &Field1D,
    model: &M,
    dt: f64,
    numerical_flux: FF,
) -> Result<Field1D, SolverError>
where
    FF: Fn(&M, PhysState, PhysState) -> Result<[f64; 2], SolverError>,
{
    let n = f.n_cells();
    let dx = f.grid.dx;
    // Interface i holds the flux between cells i-1 and i; `wrap` closes the
    // ends for either boundary type.
    let mut fluxes = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let l = f.state(f.grid.wrap(i as isize - 1));
        let r = f.state(f.grid.wrap(i as isize));
        fluxes.push(numerical_flux(model, l, r).map_err(|e| at_cell(e, i.min(n - 1)))?);
    }
    let mut out = f.clone();
    for i in 0..n {
        out.rho[i] = f.rho[i] - dt / dx * (fluxes[i + 1][0] - fluxes[i][0]);
        out.u[i] = f.u[i] - dt / dx * (fluxes[i + 1][1] - fluxes[i][1]);
    }
    out.time = f.time + dt;
    Ok(out)
}

/// One conservative inviscid step with the chosen scheme and flux closure.
/// Lax-Friedrichs uses a single explicit Euler stage, HLL two Heun stages.
pub fn step_inviscid_model<M: FluxModel>(
    f: &Field1D,
    model: &M,
    scheme: Scheme,
    dt: f64,
) -> Result<Field1D, SolverError> {
    let speed = max_signal_speed(f, model)?;
    let cap = if speed > 0.0 { CFL_DEFAULT * f.grid.dx / speed } else { f64::INFINITY };
    if dt > cap * (1.0 + 1e-12) {
        return Err(SolverError::CflViolation { dt, dt_max: cap });
    }
    let out = match scheme {
        Scheme::LaxFriedrichs => {
            let lxf = |m: &M, l: PhysState, r: PhysState| -> Result<[f64; 2], SolverError> {
                let fl = m.flux(l);
                let fr = m.flux(r);
                let c = f.grid.dx / (2.0 * dt);
                Ok([
                    0.5 * (fl[0] + fr[0]) - c * (r.rho - l.rho),
                    0.5 * (fl[1] + fr[1]) - c * (r.u - l.u),
                ])
            };
            flux_differenced_update(f, model, dt, lxf)?
        }
        Scheme::Hll => {
            let stage = flux_differenced_update(f, model, dt, hll_flux)?;
            let full = flux_differenced_update(&stage, model, dt, hll_flux)?;
            let mut out = f.clone();
            for i in 0..f.n_cells() {
                out.rho[i] = 0.5 * (f.rho[i] + full.rho[i]);
                out.u[i] = 0.5 * (f.u[i] + full.u[i]);
            }
            out.time = f.time + dt;
            out
        }
    };
    check_hyperbolic(&out)?;
    Ok(out)
}

/// Inviscid step for the deposition system itself.
pub fn step_inviscid(f: &Field1D, scheme: Scheme, dt: f64) -> Result<Field1D, SolverError> {
    step_inviscid_model(f, &DepositionFlux, scheme, dt)
}
