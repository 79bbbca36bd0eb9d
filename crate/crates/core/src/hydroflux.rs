//! Macroscopic flux structure of the full hydrodynamic system
//!
//! ```text
//! d/dt rho + d/dx [ lambda(rho,u) (theta(rho,u) - 1/theta(rho,u)) ] = 0
//! d/dt u   + d/dx [ lambda(rho,u) (theta(rho,u) + 1/theta(rho,u)) ] = 0
//! ```
//!
//! where `(lambda, theta)` invert the thermodynamic map
//! `rho = lambda d log Z / d lambda`, `u = theta d log Z / d theta`. The map
//! is globally invertible: its Jacobian is the `(n, z)` covariance matrix
//! times `diag(1/lambda, 1/theta)`, and the covariance is positive definite.
//!
//! At low density and tilt the fluxes reduce to multiples of `(rho u, rho)`,
//! which is how the deposition system emerges as a second scaling limit.

use crate::bricklayer::{partition_function, BrickError, GibbsParams, PartitionValues};
use crate::characteristics::PhysState;
use crate::solvers::{FluxModel, SolverError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HydroError {
    #[error("Newton iteration for (fugacity, tilt) diverged at (rho={rho}, u={u}): residual {residual} after {iters} iterations")]
    NewtonDiverged { rho: f64, u: f64, residual: f64, iters: usize },
    #[error("macro state (rho={rho}, u={u}) outside the image domain")]
    OutsideImage { rho: f64, u: f64 },
    #[error(transparent)]
    Brick(#[from] BrickError),
}

/// Mean occupation and mean slope per site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroState {
    pub rho: f64,
    pub u: f64,
}

impl MacroState {
    pub fn new(rho: f64, u: f64) -> Self {
        Self { rho, u }
    }
}

/// Thermodynamic evaluator for one parity sector and rate parameter.
#[derive(Debug, Clone, Copy)]
pub struct ThermoTable {
    pub parity: u8,
    pub beta: f64,
    pub tol: f64,
}

impl ThermoTable {
    pub fn new(parity: u8, beta: f64) -> Self {
        Self { parity, beta, tol: 1e-12 }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn params(&self, fugacity: f64, tilt: f64) -> Result<GibbsParams, HydroError> {
        Ok(GibbsParams::new(fugacity, tilt, self.parity, self.beta)?)
    }

    pub fn partition(&self, fugacity: f64, tilt: f64) -> Result<PartitionValues, HydroError> {
        Ok(partition_function(&self.params(fugacity, tilt)?, self.tol)?)
    }

    /// `(rho, u)` as log-derivatives of the partition function.
    pub fn macro_from_fug(&self, fugacity: f64, tilt: f64) -> Result<MacroState, HydroError> {
        let gp = self.params(fugacity, tilt)?;
        let pv = partition_function(&gp, self.tol)?;
        Ok(MacroState::new(pv.mean_n(&gp), pv.mean_z(&gp)))
    }

    /// Invert the thermodynamic map by damped Newton iteration, seeded with
    /// the low-density expansion `(lambda, theta) ~ (rho, 1 + c u)`.
    pub fn fug_from_macro(&self, ms: MacroState, tol: f64) -> Result<(f64, f64), HydroError> {
        if !(ms.rho > 0.0) || !ms.rho.is_finite() || !ms.u.is_finite() {
            return Err(HydroError::OutsideImage { rho: ms.rho, u: ms.u });
        }
        let c = self.low_density_c();
        let mut lam = ms.rho.max(1e-12);
        let mut tilt = (1.0 + c * ms.u).clamp(0.05, 20.0);
        let mut residual = f64::INFINITY;
        let max_iters = 200;
        for iter in 0..max_iters {
            let gp = self.params(lam, tilt)?;
            let pv = partition_function(&gp, self.tol)?;
            let err = [pv.mean_n(&gp) - ms.rho, pv.mean_z(&gp) - ms.u];
            residual = err[0].abs().max(err[1].abs());
            if residual < tol * (1.0 + ms.rho.abs() + ms.u.abs()) {
                return Ok((lam, tilt));
            }
            // Jacobian of (rho, u) in (lambda, theta): covariance matrix
            // times diag(1/lambda, 1/theta).
            let j = [
                [pv.var_n(&gp) / lam, pv.cov_nz(&gp) / tilt],
                [pv.cov_nz(&gp) / lam, pv.var_z(&gp) / tilt],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            let step = [
                (j[1][1] * err[0] - j[0][1] * err[1]) / det,
                (j[0][0] * err[1] - j[1][0] * err[0]) / det,
            ];
            // Backtrack rather than leave the parameter domain.
            let mut damping = 1.0;
            let _ = iter;
            loop {
                let lam_new = lam - damping * step[0];
                let tilt_new = tilt - damping * step[1];
                if lam_new > 0.0 && tilt_new > 0.0 {
                    lam = lam_new;
                    tilt = tilt_new;
                    break;
                }
                damping *= 0.5;
                if damping < 1e-8 {
                    return Err(HydroError::NewtonDiverged {
                        rho: ms.rho,
                        u: ms.u,
                        residual,
                        iters: max_iters,
                    });
                }
            }
        }
        Err(HydroError::NewtonDiverged { rho: ms.rho, u: ms.u, residual, iters: max_iters })
    }

    /// Fluxes of the hydrodynamic system at a macro state:
    /// `J_rho = lambda (theta - 1/theta)`, `J_u = lambda (theta + 1/theta)`.
    pub fn macro_flux(&self, ms: MacroState) -> Result<(f64, f64), HydroError> {
        let (lam, tilt) = self.fug_from_macro(ms, 1e-12)?;
        Ok(flux_from_fug(lam, tilt))
    }

    /// The low-density constant `c`: slope of `theta(rho, u) - 1` in `u` at
    /// the origin,
    ///
    /// ```text
    /// c = Z_s(0, 1) / sum_(z = s mod 2) z (z - 1) exp(-beta z^2 / 2)
    /// ```
    ///
    /// (the log-derivative normalization; both series truncated with
    /// Gaussian tail bounds far below the working tolerance).
    pub fn low_density_c(&self) -> f64 {
        let mut denom = 0.0;
        let mut norm = 0.0;
        let mut z = self.parity as i64;
        loop {
            let pair = if z == 0 { 1.0 } else { 2.0 }; // z and -z together
            let gauss = (-self.beta * (z * z) as f64 / 2.0).exp();
            norm += pair * gauss;
            // z(z-1) + (-z)(-z-1) = 2 z^2.
            denom += if z == 0 { 0.0 } else { 2.0 * (z * z) as f64 * gauss };
            z += 2;
            if self.beta * (z * z) as f64 / 2.0 > 80.0 {
                break;
            }
        }
        norm / denom
    }

    /// Bare reciprocal `(d^2 Z / d theta^2 | _(lambda=0, theta=1))^(-1)`
    /// without the partition-function normalization; kept for reference
    /// alongside [`low_density_c`].
    pub fn low_density_c_bare(&self) -> f64 {
        let mut denom = 0.0;
        let mut z = self.parity as i64;
        loop {
            let gauss = (-self.beta * (z * z) as f64 / 2.0).exp();
            denom += if z == 0 { 0.0 } else { 2.0 * (z * z) as f64 * gauss };
            z += 2;
            if self.beta * (z * z) as f64 / 2.0 > 80.0 {
                break;
            }
        }
        1.0 / denom
    }

    /// Relative deviations of the rescaled hydrodynamic fluxes from the
    /// deposition targets `(rho u, rho)`:
    /// states are shrunk as `(alpha^(2/3) rho, alpha^(1/3) u)` and the
    /// fluxes renormalized by `(2 c alpha, 2 alpha^(2/3))`. Both deviations
    /// vanish as `alpha -> 0`.
    pub fn rescaled_flux_limit(
        &self,
        states: &[MacroState],
        alpha: f64,
    ) -> Result<(f64, f64), HydroError> {
        assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
        let c = self.low_density_c();
        let mut dev_rho = 0.0f64;
        let mut dev_u = 0.0f64;
        for ms in states {
            let scaled = MacroState::new(alpha.powf(2.0 / 3.0) * ms.rho, alpha.cbrt() * ms.u);
            let (j_rho, j_u) = self.macro_flux(scaled)?;
            let target_rho = ms.rho * ms.u;
            let target_u = ms.rho;
            dev_rho = dev_rho.max(
                (j_rho / (2.0 * c * alpha) - target_rho).abs() / target_rho.abs().max(1e-12),
            );
            dev_u = dev_u
                .max((j_u / (2.0 * alpha.powf(2.0 / 3.0)) - target_u).abs() / target_u.abs());
        }
        Ok((dev_rho, dev_u))
    }
}

/// Fluxes straight from the grand-canonical parameters.
pub fn flux_from_fug(fugacity: f64, tilt: f64) -> (f64, f64) {
    (fugacity * (tilt - 1.0 / tilt), fugacity * (tilt + 1.0 / tilt))
}

/// The hydrodynamic system as a flux closure for the finite-volume kernels,
/// with signal-speed bounds from a finite-difference flux Jacobian.
#[derive(Debug, Clone, Copy)]
pub struct HydroFluxModel {
    pub table: ThermoTable,
    /// Safety factor on the eigenvalue bounds.
    pub speed_margin: f64,
}

impl HydroFluxModel {
    pub fn new(table: ThermoTable) -> Self {
        Self { table, speed_margin: 1.1 }
    }

    fn try_flux(&self, p: PhysState) -> Result<[f64; 2], HydroError> {
        let (a, b) = self.table.macro_flux(MacroState::new(p.rho, p.u))?;
        Ok([a, b])
    }
}

impl FluxModel for HydroFluxModel {
    fn flux(&self, p: PhysState) -> [f64; 2] {
        self.try_flux(p).expect("hydro flux evaluation failed inside solver")
    }

    fn wave_bounds(&self, p: PhysState) -> Result<(f64, f64), SolverError> {
        let h = 1e-6 * (p.rho.abs() + p.u.abs()).max(1.0);
        let eval = |rho: f64, u: f64| -> Result<[f64; 2], SolverError> {
            self.try_flux(PhysState::new(rho, u)).map_err(|_| SolverError::NonHyperbolicCell {
                index: usize::MAX,
                rho,
                u,
            })
        };
        let fr_p = eval(p.rho + h, p.u)?;
        let fr_m = eval(p.rho - h, p.u)?;
        let fu_p = eval(p.rho, p.u + h)?;
        let fu_m = eval(p.rho, p.u - h)?;
        let a = (fr_p[0] - fr_m[0]) / (2.0 * h);
        let b = (fu_p[0] - fu_m[0]) / (2.0 * h);
        let c = (fr_p[1] - fr_m[1]) / (2.0 * h);
        let d = (fu_p[1] - fu_m[1]) / (2.0 * h);
        let mean = 0.5 * (a + d);
        let disc = 0.25 * (a - d) * (a - d) + b * c;
        if disc < 0.0 {
            return Err(SolverError::NonHyperbolicCell { index: usize::MAX, rho: p.rho, u: p.u });
        }
        let half = disc.sqrt();
        Ok((
            self.speed_margin * (mean - half) - 1e-12,
            self.speed_margin * (mean + half) + 1e-12,
        ))
    }
}
