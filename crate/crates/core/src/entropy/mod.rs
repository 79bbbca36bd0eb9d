//! Entropy/flux pairs `(S, F)` for the system: additional conserved
//! quantities of smooth solutions satisfying
//!
//! ```text
//! dF/drho = u dS/drho + dS/du,      dF/du = rho dS/drho
//! ```
//!
//! or, eliminating `F`, the second-order form
//! `rho S_rhorho - u S_rhou - S_uu = 0`. Entropy solutions dissipate every
//! convex pair: `dS/dt + dF/dx <= 0` distributionally, with the production
//! concentrating (negatively) at shocks.

mod similarity;

pub use similarity::{solve_similarity_ode, similarity_to_pair, SimilarityEntropy, Y_SINGULAR};

use crate::characteristics::PhysState;
use crate::grid::Field1D;
use crate::numerics::OdeError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("state (rho={rho}, u={u}) outside the domain of the entropy")]
    OutsideDomain { rho: f64, u: f64 },
    #[error("state (rho={rho}, u={u}) outside the validity region of the pair")]
    OutsideValidity { rho: f64, u: f64 },
    #[error("y interval [{lo}, {hi}] crosses a singular point +-2/sqrt(3) of the similarity equation")]
    SingularInterval { lo: f64, hi: f64 },
    #[error("y = {y} outside the solved interval [{lo}, {hi}]")]
    OutOfRange { y: f64, lo: f64, hi: f64 },
    #[error("snapshots out of order or on mismatched grids")]
    BadFieldSequence,
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Region of state space on which a pair's evaluators are meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Validity {
    All,
    /// Interior of the physical domain, `rho > 0`.
    PhysicalInterior,
    /// `rho > 0` and `y = u / sqrt(rho)` within the solved band.
    SimilarityBand { y_lo: f64, y_hi: f64 },
}

impl Validity {
    pub fn contains(&self, p: PhysState) -> bool {
        match *self {
            Validity::All => true,
            Validity::PhysicalInterior => p.rho > 0.0,
            Validity::SimilarityBand { y_lo, y_hi } => {
                p.rho > 0.0 && {
                    let y = p.u / p.rho.sqrt();
                    (y_lo..=y_hi).contains(&y)
                }
            }
        }
    }
}

type ScalarFn = Box<dyn Fn(PhysState) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(PhysState) -> [f64; 2] + Send + Sync>;
type HessFn = Box<dyn Fn(PhysState) -> [[f64; 2]; 2] + Send + Sync>;

/// An entropy/flux pair with its first two derivative evaluators.
pub struct EntropyPair {
    s: ScalarFn,
    f: ScalarFn,
    grad_s: GradFn,
    grad_f: GradFn,
    hess_s: HessFn,
    pub validity: Validity,
    pub convex: bool,
}

impl EntropyPair {
    pub fn from_parts(
        s: ScalarFn,
        f: ScalarFn,
        grad_s: GradFn,
        grad_f: GradFn,
        hess_s: HessFn,
        validity: Validity,
        convex: bool,
    ) -> Self {
        Self { s, f, grad_s, grad_f, hess_s, validity, convex }
    }

    fn check(&self, p: PhysState) -> Result<(), EntropyError> {
        if self.validity.contains(p) {
            Ok(())
        } else {
            Err(EntropyError::OutsideValidity { rho: p.rho, u: p.u })
        }
    }

    pub fn s(&self, p: PhysState) -> Result<f64, EntropyError> {
        self.check(p)?;
        Ok((self.s)(p))
    }

    pub fn f(&self, p: PhysState) -> Result<f64, EntropyError> {
        self.check(p)?;
        Ok((self.f)(p))
    }

    pub fn grad_s(&self, p: PhysState) -> Result<[f64; 2], EntropyError> {
        self.check(p)?;
        Ok((self.grad_s)(p))
    }

    pub fn grad_f(&self, p: PhysState) -> Result<[f64; 2], EntropyError> {
        self.check(p)?;
        Ok((self.grad_f)(p))
    }

    pub fn hess_s(&self, p: PhysState) -> Result<[[f64; 2]; 2], EntropyError> {
        self.check(p)?;
        Ok((self.hess_s)(p))
    }

    /// Residuals of the first-order entropy equations,
    /// `(F_rho - u S_rho - S_u, F_u - rho S_rho)`.
    pub fn first_order_residual(&self, p: PhysState) -> Result<[f64; 2], EntropyError> {
        let gs = self.grad_s(p)?;
        let gf = self.grad_f(p)?;
        Ok([
            gf[0] - (p.u * gs[0] + gs[1]),
            gf[1] - p.rho * gs[0],
        ])
    }

    /// Second-order residual `rho S_rhorho - u S_rhou - S_uu`, which is zero
    /// iff `S` admits a flux.
    pub fn entropy_residual(&self, p: PhysState) -> Result<f64, EntropyError> {
        if !(p.rho > 0.0) {
            return Err(EntropyError::OutsideDomain { rho: p.rho, u: p.u });
        }
        Ok(second_order_residual(self.hess_s(p)?, p))
    }
}

/// `rho S_rhorho - u S_rhou - S_uu` from a Hessian of `S` at `p`.
pub fn second_order_residual(hess: [[f64; 2]; 2], p: PhysState) -> f64 {
    p.rho * hess[0][0] - p.u * hess[0][1] - hess[1][1]
}

/// The canonical global convex pair
/// `S = rho log rho + u^2/2`, `F = u rho (log rho + 1)`,
/// defined (and bounded below) on the whole physical domain.
pub fn canonical_pair() -> EntropyPair {
    EntropyPair {
        s: Box::new(|p| p.rho * p.rho.ln() + 0.5 * p.u * p.u),
        f: Box::new(|p| p.u * p.rho * (p.rho.ln() + 1.0)),
        grad_s: Box::new(|p| [p.rho.ln() + 1.0, p.u]),
        grad_f: Box::new(|p| [p.u * (p.rho.ln() + 2.0), p.rho * (p.rho.ln() + 1.0)]),
        hess_s: Box::new(|p| [[1.0 / p.rho, 0.0], [0.0, 1.0]]),
        validity: Validity::PhysicalInterior,
        convex: true,
    }
}

/// The trivial pair `(S, F) = (rho, rho u)`: the first conservation law.
pub fn mass_pair() -> EntropyPair {
    EntropyPair {
        s: Box::new(|p| p.rho),
        f: Box::new(|p| p.rho * p.u),
        grad_s: Box::new(|_| [1.0, 0.0]),
        grad_f: Box::new(|p| [p.u, p.rho]),
        hess_s: Box::new(|_| [[0.0, 0.0], [0.0, 0.0]]),
        validity: Validity::All,
        convex: true,
    }
}

/// The trivial pair `(S, F) = (u, rho)`: the second conservation law.
pub fn slope_pair() -> EntropyPair {
    EntropyPair {
        s: Box::new(|p| p.u),
        f: Box::new(|p| p.rho),
        grad_s: Box::new(|_| [0.0, 1.0]),
        grad_f: Box::new(|_| [1.0, 0.0]),
        hess_s: Box::new(|_| [[0.0, 0.0], [0.0, 0.0]]),
        validity: Validity::All,
        convex: true,
    }
}

/// Discrete entropy production `D_t S + D_x F` (forward in time, centered in
/// space): one row of per-cell values for each consecutive snapshot pair.
///
/// For entropy solutions the positive part vanishes with the grid while the
/// production concentrates negatively at shocks.
pub fn entropy_production(
    fields: &[Field1D],
    pair: &EntropyPair,
) -> Result<Vec<Vec<f64>>, EntropyError> {
    let mut out = Vec::new();
    for win in fields.windows(2) {
        let (a, b) = (&win[0], &win[1]);
        if a.grid != b.grid || !(b.time > a.time) {
            return Err(EntropyError::BadFieldSequence);
        }
        let dt = b.time - a.time;
        let dx = a.grid.dx;
        let n = a.n_cells();
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            let here = pair.s(b.state(i))? - pair.s(a.state(i))?;
            let ip = a.grid.wrap(i as isize + 1);
            let im = a.grid.wrap(i as isize - 1);
            let flux = pair.f(a.state(ip))? - pair.f(a.state(im))?;
            row.push(here / dt + flux / (2.0 * dx));
        }
        out.push(row);
    }
    Ok(out)
}
