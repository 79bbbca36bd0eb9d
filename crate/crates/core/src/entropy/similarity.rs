//! Similarity entropies `S(rho, u) = rho^alpha phi(y)` with `y = u / sqrt(rho)`
//! (the exponent `-1/2` inside is the only one compatible with the entropy
//! equation). The profile solves
//!
//! ```text
//! 3 (y^2 - 4/3) phi'' + (5 - 8 alpha) y phi' + 4 alpha (alpha - 1) phi = 0
//! ```
//!
//! which degenerates at `y = +-2/sqrt(3)`; intervals are kept away from the
//! singular points by a margin.

use super::{EntropyError, EntropyPair, Validity};
use crate::characteristics::PhysState;
use crate::numerics::{hermite_cubic, integrate, rk45, sym2_eigenvalues};
use std::sync::Arc;

/// Singular points of the similarity equation sit at `+-Y_SINGULAR`.
pub const Y_SINGULAR: f64 = 1.154700538379251_5; // 2/sqrt(3)

/// Margin by which solved intervals must avoid the singular points.
pub const SINGULAR_MARGIN: f64 = 1e-3;

/// A similarity entropy profile: `phi` and `phi'` sampled on a `y`-grid.
#[derive(Debug, Clone)]
pub struct SimilarityEntropy {
    pub alpha: f64,
    pub ys: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_prime: Vec<f64>,
}

fn ode_rhs(alpha: f64) -> impl Fn(f64, [f64; 2]) -> [f64; 2] {
    move |y: f64, state: [f64; 2]| {
        let denom = 3.0 * (y * y - 4.0 / 3.0);
        let phi2 = -((5.0 - 8.0 * alpha) * y * state[1] + 4.0 * alpha * (alpha - 1.0) * state[0])
            / denom;
        [state[1], phi2]
    }
}

fn interval_ok(y_lo: f64, y_hi: f64) -> bool {
    let inner = y_lo > -Y_SINGULAR + SINGULAR_MARGIN && y_hi < Y_SINGULAR - SINGULAR_MARGIN;
    let right = y_lo >= Y_SINGULAR + SINGULAR_MARGIN;
    let left = y_hi <= -Y_SINGULAR - SINGULAR_MARGIN;
    inner || right || left
}

/// Integrate the similarity equation over `[y_lo, y_hi]` with data
/// `(phi0, dphi0)` posed at `y = 0` when the interval contains it, otherwise
/// at the interval endpoint nearest the origin.
pub fn solve_similarity_ode(
    alpha: f64,
    phi0: f64,
    dphi0: f64,
    y_lo: f64,
    y_hi: f64,
    step: f64,
) -> Result<SimilarityEntropy, EntropyError> {
    assert!(y_lo < y_hi && step > 0.0, "need y_lo < y_hi and step > 0");
    if !interval_ok(y_lo, y_hi) {
        return Err(EntropyError::SingularInterval { lo: y_lo, hi: y_hi });
    }
    let anchor = if y_lo <= 0.0 && 0.0 <= y_hi {
        0.0
    } else if y_lo > 0.0 {
        y_lo
    } else {
        y_hi
    };

    let mut nodes = vec![anchor];
    let mut y = anchor + step;
    while y < y_hi - 1e-12 * step.max(1.0) {
        nodes.push(y);
        y += step;
    }
    if y_hi > anchor {
        nodes.push(y_hi);
    }
    let mut left_nodes = Vec::new();
    let mut y = anchor - step;
    while y > y_lo + 1e-12 * step.max(1.0) {
        left_nodes.push(y);
        y -= step;
    }
    if y_lo < anchor {
        left_nodes.push(y_lo);
    }

    let f = ode_rhs(alpha);
    let n_total = nodes.len() + left_nodes.len();
    let mut ys = Vec::with_capacity(n_total);
    let mut phi = Vec::with_capacity(n_total);
    let mut psi = Vec::with_capacity(n_total);

    let mut state = [phi0, dphi0];
    let mut prev = anchor;
    for &target in &nodes {
        if target != prev {
            state = rk45(&f, prev, state, target, 1e-12, 1e-14)?;
        }
        ys.push(target);
        phi.push(state[0]);
        psi.push(state[1]);
        prev = target;
    }
    state = [phi0, dphi0];
    prev = anchor;
    for &target in &left_nodes {
        state = rk45(&f, prev, state, target, 1e-12, 1e-14)?;
        ys.insert(0, target);
        phi.insert(0, state[0]);
        psi.insert(0, state[1]);
        prev = target;
    }

    Ok(SimilarityEntropy { alpha, ys, phi, phi_prime: psi })
}

impl SimilarityEntropy {
    pub fn y_lo(&self) -> f64 {
        self.ys[0]
    }

    pub fn y_hi(&self) -> f64 {
        *self.ys.last().unwrap()
    }

    /// Evaluate `(phi, phi', phi'')` at `y` by cubic Hermite interpolation of
    /// the stored `(phi, phi')` samples. No use is made of the differential
    /// equation here, so downstream residual checks stay independent.
    pub fn eval(&self, y: f64) -> Result<(f64, f64, f64), EntropyError> {
        let (lo, hi) = (self.y_lo(), self.y_hi());
        let guard = 1e-9 * (hi - lo);
        if y < lo - guard || y > hi + guard {
            return Err(EntropyError::OutOfRange { y, lo, hi });
        }
        let y = y.clamp(lo, hi);
        let k = match self.ys.binary_search_by(|v| v.partial_cmp(&y).unwrap()) {
            Ok(k) => k.min(self.ys.len() - 2),
            Err(k) => k.saturating_sub(1).min(self.ys.len() - 2),
        };
        Ok(hermite_cubic(
            self.ys[k],
            self.ys[k + 1],
            self.phi[k],
            self.phi_prime[k],
            self.phi[k + 1],
            self.phi_prime[k + 1],
            y,
        ))
    }

    /// Weak-form defect of the similarity equation per grid interval
    /// (attributed to interval midpoints): the second-derivative term is
    /// integrated by parts so no division by the degenerate coefficient
    /// occurs, and the remaining integrals use Simpson on the interpolant.
    pub fn ode_residual_samples(&self) -> Vec<(f64, f64)> {
        let a = self.alpha;
        let mut out = Vec::with_capacity(self.ys.len().saturating_sub(1));
        for k in 0..self.ys.len() - 1 {
            let (y0, y1) = (self.ys[k], self.ys[k + 1]);
            let h = y1 - y0;
            let m = 0.5 * (y0 + y1);
            let (phi_m, psi_m, _) = hermite_cubic(
                y0,
                y1,
                self.phi[k],
                self.phi_prime[k],
                self.phi[k + 1],
                self.phi_prime[k + 1],
                m,
            );
            let g = |y: f64, phi: f64, psi: f64| {
                -(1.0 + 8.0 * a) * y * psi + 4.0 * a * (a - 1.0) * phi
            };
            let boundary = 3.0 * (y1 * y1 - 4.0 / 3.0) * self.phi_prime[k + 1]
                - 3.0 * (y0 * y0 - 4.0 / 3.0) * self.phi_prime[k];
            let integral = h / 6.0
                * (g(y0, self.phi[k], self.phi_prime[k])
                    + 4.0 * g(m, phi_m, psi_m)
                    + g(y1, self.phi[k + 1], self.phi_prime[k + 1]));
            out.push((m, (boundary + integral) / h));
        }
        out
    }

    pub fn ode_residual_max(&self) -> f64 {
        self.ode_residual_samples()
            .into_iter()
            .map(|(_, r)| r.abs())
            .fold(0.0, f64::max)
    }
}

/// Convert a similarity profile into a full entropy/flux pair.
///
/// Derivatives of `S` come from the profile; the flux is recovered by
/// quadrature of `F_u = rho S_rho` in `u` at fixed `rho`, from a baseline
/// along `y = y0` (`y0 = 0` when the band contains it) that integrates
/// `dF = F_rho drho + F_u du`, with `F = 0` pinned at `rho = 1` on the
/// baseline. The convexity flag is certified by Hessian sampling only.
pub fn similarity_to_pair(se: &SimilarityEntropy) -> Result<EntropyPair, EntropyError> {
    let se = Arc::new(se.clone());
    let alpha = se.alpha;
    let (y_lo, y_hi) = (se.y_lo(), se.y_hi());
    let y0 = 0.0_f64.clamp(y_lo, y_hi);

    let grad = {
        let se = Arc::clone(&se);
        move |p: PhysState| -> [f64; 2] {
            let y = p.u / p.rho.sqrt();
            let (phi, psi, _) = se.eval(y).expect("validity checked by caller");
            [
                p.rho.powf(alpha - 1.0) * (alpha * phi - 0.5 * y * psi),
                p.rho.powf(alpha - 0.5) * psi,
            ]
        }
    };

    // Baseline value F(rho, y0 sqrt(rho)) by path integration from rho = 1.
    let base = {
        let grad = grad.clone();
        move |rho: f64| -> f64 {
            let g = |r: f64| {
                let u0 = y0 * r.sqrt();
                let gs = grad(PhysState::new(r, u0));
                let f_rho = u0 * gs[0] + gs[1];
                let f_u = r * gs[0];
                f_rho + f_u * 0.5 * y0 / r.sqrt()
            };
            integrate(&g, 1.0, rho, 1e-10)
        }
    };

    let flux = {
        let grad = grad.clone();
        move |p: PhysState| -> f64 {
            let u_base = y0 * p.rho.sqrt();
            let g = |v: f64| p.rho * grad(PhysState::new(p.rho, v))[0];
            base(p.rho) + integrate(&g, u_base, p.u, 1e-10)
        }
    };

    let hess = {
        let se = Arc::clone(&se);
        move |p: PhysState| -> [[f64; 2]; 2] {
            let y = p.u / p.rho.sqrt();
            let (phi, psi, phi2) = se.eval(y).expect("validity checked by caller");
            let s_rr = p.rho.powf(alpha - 2.0)
                * (alpha * (alpha - 1.0) * phi - (alpha - 0.75) * y * psi + 0.25 * y * y * phi2);
            let s_ru = p.rho.powf(alpha - 1.5) * ((alpha - 0.5) * psi - 0.5 * y * phi2);
            let s_uu = p.rho.powf(alpha - 1.0) * phi2;
            [[s_rr, s_ru], [s_ru, s_uu]]
        }
    };

    // Advisory convexity certificate by sampling.
    let mut convex = true;
    let band = y_hi - y_lo;
    for i in 0..25 {
        let rho = 0.1 * (100.0_f64).powf(i as f64 / 24.0);
        for j in 0..25 {
            let y = y_lo + band * (0.01 + 0.98 * j as f64 / 24.0);
            let h = hess(PhysState::new(rho, y * rho.sqrt()));
            let scale = h.iter().flatten().fold(1.0_f64, |m, v| m.max(v.abs()));
            let (lo, _) = sym2_eigenvalues(h);
            if lo < -1e-6 * scale {
                convex = false;
            }
        }
    }

    let s_eval = {
        let se = Arc::clone(&se);
        move |p: PhysState| -> f64 {
            let y = p.u / p.rho.sqrt();
            let (phi, _, _) = se.eval(y).expect("validity checked by caller");
            p.rho.powf(alpha) * phi
        }
    };
    let grad_f = {
        let grad = grad.clone();
        move |p: PhysState| -> [f64; 2] {
            let gs = grad(p);
            [p.u * gs[0] + gs[1], p.rho * gs[0]]
        }
    };

    Ok(EntropyPair::from_parts(
        Box::new(s_eval),
        Box::new(flux),
        Box::new(grad.clone()),
        Box::new(grad_f),
        Box::new(hess),
        Validity::SimilarityBand { y_lo, y_hi },
        convex,
    ))
}
