//! Pointwise characteristic structure of the system
//!
//! ```text
//! d/dt rho + d/dx (rho u) = 0
//! d/dt u   + d/dx rho     = 0
//! ```
//!
//! The flux Jacobian is `[[u, rho], [1, 0]]` with eigenvalues
//! `lambda = (sqrt(u^2 + 4 rho) + u) / 2` and
//! `mu = -(sqrt(u^2 + 4 rho) - u) / 2`, so the system is strictly
//! hyperbolic wherever `u^2 + 4 rho > 0`. Everything in this module is a
//! pure function of the state.

use thiserror::Error;

/// Floating-point guard: radicands this far below zero are treated as zero.
pub const RADICAND_GUARD: f64 = -1e-14;

/// A point `(rho, u)` in state space. `rho` is the particle density and
/// `u` the negative height gradient (slope).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysState {
    pub rho: f64,
    pub u: f64,
}

impl PhysState {
    pub fn new(rho: f64, u: f64) -> Self {
        Self { rho, u }
    }

    /// Discriminant `u^2 + 4 rho` of the characteristic polynomial.
    pub fn discriminant(&self) -> f64 {
        self.u * self.u + 4.0 * self.rho
    }

    /// Strict hyperbolicity: `u^2 + 4 rho > 0`.
    pub fn in_hyperbolic(&self) -> bool {
        self.discriminant() > 0.0
    }

    /// Physical domain: `rho >= 0`.
    pub fn in_physical(&self) -> bool {
        self.rho >= 0.0
    }

    /// Mirror map `(rho, u) -> (rho, -u)`.
    pub fn mirror(&self) -> Self {
        Self { rho: self.rho, u: -self.u }
    }
}

/// Eigenvalues and (paper-normalized) eigenvectors of the flux Jacobian at
/// one state. Left vectors are rows, right vectors are columns:
/// `l = (lambda, rho)`, `r = (lambda, 1)^T`, `m = (mu, rho)`, `s = (mu, 1)^T`.
#[derive(Debug, Clone, Copy)]
pub struct CharData {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub left_plus: [f64; 2],
    pub left_minus: [f64; 2],
    pub right_plus: [f64; 2],
    pub right_minus: [f64; 2],
}

/// Where a state sits relative to the physical and hyperbolic domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainClass {
    /// `rho > 0`.
    PhysicalInterior,
    /// Vacuum line `rho = 0`, `u != 0`.
    PhysicalBoundary,
    /// `rho < 0` but still strictly hyperbolic.
    HyperbolicNonphysical,
    /// `u^2 + 4 rho <= 0` away from the origin.
    NonHyperbolic,
    /// The single point `(0, 0)` where strict hyperbolicity is lost.
    UmbilicPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum CharError {
    #[error("state (rho={rho}, u={u}) is not strictly hyperbolic (u^2+4rho = {disc})")]
    NotStrictlyHyperbolic { rho: f64, u: f64, disc: f64 },
    #[error("state (rho={rho}, u={u}) is outside the domain of {what}")]
    OutsideDomain { rho: f64, u: f64, what: &'static str },
}

fn guarded_sqrt(x: f64) -> Option<f64> {
    if x >= 0.0 {
        Some(x.sqrt())
    } else if x >= RADICAND_GUARD {
        Some(0.0)
    } else {
        None
    }
}

/// Characteristic speeds `(mu, lambda)` on the closure of the hyperbolic
/// domain; `None` when the discriminant is negative beyond the guard.
pub fn eigenvalues(p: PhysState) -> Option<(f64, f64)> {
    let q = guarded_sqrt(p.discriminant())?;
    Some((-0.5 * (q - p.u), 0.5 * (q + p.u)))
}

/// Full eigen-decomposition of the flux Jacobian `[[u, rho], [1, 0]]`.
pub fn char_decomposition(p: PhysState) -> Result<CharData, CharError> {
    let disc = p.discriminant();
    if disc <= 0.0 {
        return Err(CharError::NotStrictlyHyperbolic { rho: p.rho, u: p.u, disc });
    }
    let q = disc.sqrt();
    let lambda = 0.5 * (q + p.u);
    let mu = -0.5 * (q - p.u);
    Ok(CharData {
        lambda_plus: lambda,
        lambda_minus: mu,
        left_plus: [lambda, p.rho],
        left_minus: [mu, p.rho],
        right_plus: [lambda, 1.0],
        right_minus: [mu, 1.0],
    })
}

/// Riemann invariants
///
/// ```text
/// w = -sqrt(q - u) (q + 2u),   z = -sqrt(q + u) (q - 2u),   q = sqrt(u^2 + 4 rho)
/// ```
///
/// `w` is conserved along `dx/dt = lambda`, `z` along `dx/dt = mu`. Both are
/// defined on the physical domain; the mirror identity `w(rho, u) = z(rho, -u)`
/// holds exactly.
pub fn riemann_invariants(p: PhysState) -> Result<(f64, f64), CharError> {
    Ok((riemann_w(p)?, riemann_z(p)?))
}

/// The `w` invariant alone (domain `sqrt(u^2+4rho) - u >= 0`).
pub fn riemann_w(p: PhysState) -> Result<f64, CharError> {
    let q = guarded_sqrt(p.discriminant()).ok_or(CharError::NotStrictlyHyperbolic {
        rho: p.rho,
        u: p.u,
        disc: p.discriminant(),
    })?;
    let a = guarded_sqrt(q - p.u).ok_or(CharError::OutsideDomain {
        rho: p.rho,
        u: p.u,
        what: "w (needs sqrt(u^2+4rho) - u >= 0)",
    })?;
    Ok(-a * (q + 2.0 * p.u))
}

/// The `z` invariant alone (domain `sqrt(u^2+4rho) + u >= 0`).
pub fn riemann_z(p: PhysState) -> Result<f64, CharError> {
    let q = guarded_sqrt(p.discriminant()).ok_or(CharError::NotStrictlyHyperbolic {
        rho: p.rho,
        u: p.u,
        disc: p.discriminant(),
    })?;
    let b = guarded_sqrt(q + p.u).ok_or(CharError::OutsideDomain {
        rho: p.rho,
        u: p.u,
        what: "z (needs sqrt(u^2+4rho) + u >= 0)",
    })?;
    Ok(-b * (q - 2.0 * p.u))
}

/// Analytic gradients `(grad w, grad z)` with respect to `(rho, u)`.
///
/// `grad w` is parallel to the left eigenvector `l` and annihilates the
/// right eigenvector `s`; symmetrically for `grad z`.
pub fn riemann_gradients(p: PhysState) -> Result<([f64; 2], [f64; 2]), CharError> {
    if p.rho <= 0.0 {
        return Err(CharError::OutsideDomain {
            rho: p.rho,
            u: p.u,
            what: "riemann gradients (needs rho > 0)",
        });
    }
    let q = p.discriminant().sqrt();
    let a = (q - p.u).sqrt();
    let b = (q + p.u).sqrt();
    let grad_w = [-3.0 / a, -1.5 * a];
    let grad_z = [-3.0 / b, 1.5 * b];
    Ok((grad_w, grad_z))
}

/// Analytic Hessians of the Riemann invariants `(hess w, hess z)`.
///
/// Both are positive semi-definite with a vanishing determinant: each
/// invariant is convex with exactly one flat direction at every interior
/// point.
pub fn riemann_hessians(p: PhysState) -> Result<([[f64; 2]; 2], [[f64; 2]; 2]), CharError> {
    if p.rho <= 0.0 {
        return Err(CharError::OutsideDomain {
            rho: p.rho,
            u: p.u,
            what: "riemann hessians (needs rho > 0)",
        });
    }
    let q = p.discriminant().sqrt();
    let a = (q - p.u).sqrt();
    let b = (q + p.u).sqrt();
    let hess_w = [
        [3.0 / (q * a * a * a), -1.5 / (q * a)],
        [-1.5 / (q * a), 0.75 * a / q],
    ];
    let hess_z = [
        [3.0 / (q * b * b * b), 1.5 / (q * b)],
        [1.5 / (q * b), 0.75 * b / q],
    ];
    Ok((hess_w, hess_z))
}

/// Classify a state relative to the physical/hyperbolic domains.
pub fn domain_classify(p: PhysState) -> DomainClass {
    if p.rho == 0.0 && p.u == 0.0 {
        DomainClass::UmbilicPoint
    } else if p.rho > 0.0 {
        DomainClass::PhysicalInterior
    } else if p.rho == 0.0 {
        DomainClass::PhysicalBoundary
    } else if p.discriminant() > 0.0 {
        DomainClass::HyperbolicNonphysical
    } else {
        DomainClass::NonHyperbolic
    }
}

/// Genuine-nonlinearity measures: directional derivatives of the
/// characteristic speeds along their right eigenvectors,
/// `g_lambda = grad lambda . r = 2 lambda / (lambda - mu)` and
/// `g_mu = grad mu . s = 2 mu / (mu - lambda)`.
pub fn genuine_nonlinearity(p: PhysState) -> Result<(f64, f64), CharError> {
    let c = char_decomposition(p)?;
    let gap = c.lambda_plus - c.lambda_minus;
    Ok((2.0 * c.lambda_plus / gap, -2.0 * c.lambda_minus / gap))
}

/// Finite-difference versions of the genuine-nonlinearity measures, used as
/// an independent check of the closed forms.
///
/// Fourth-order directional stencil with the step tied to the spectral gap,
/// since the speeds lose smoothness at the hyperbolic boundary.
pub fn genuine_nonlinearity_fd(p: PhysState, h: f64) -> Result<(f64, f64), CharError> {
    let c = char_decomposition(p)?;
    let gap = (c.lambda_plus - c.lambda_minus).min(1.0);
    let step = h * (p.rho.abs() + p.u.abs()).max(1.0) * gap;
    let lam = |rho: f64, u: f64| {
        let d = (u * u + 4.0 * rho).max(0.0).sqrt();
        0.5 * (d + u)
    };
    let mu = |rho: f64, u: f64| {
        let d = (u * u + 4.0 * rho).max(0.0).sqrt();
        -0.5 * (d - u)
    };
    let d4 = |f: &dyn Fn(f64, f64) -> f64, dir: [f64; 2]| {
        let ev = |s: f64| f(p.rho + s * dir[0], p.u + s * dir[1]);
        (-ev(2.0 * step) + 8.0 * ev(step) - 8.0 * ev(-step) + ev(-2.0 * step)) / (12.0 * step)
    };
    Ok((d4(&lam, c.right_plus), d4(&mu, c.right_minus)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{central_gradient, sym2_eigenvalues};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
        a[0] * b[0] + a[1] * b[1]
    }

    /// l . grad J - lambda l, with grad J = [[u, rho], [1, 0]].
    fn eigen_residuals(p: PhysState, c: &CharData) -> f64 {
        let jac = [[p.u, p.rho], [1.0, 0.0]];
        let mut worst: f64 = 0.0;
        for (vec, val, left) in [
            (c.left_plus, c.lambda_plus, true),
            (c.left_minus, c.lambda_minus, true),
            (c.right_plus, c.lambda_plus, false),
            (c.right_minus, c.lambda_minus, false),
        ] {
            let prod = if left {
                [
                    vec[0] * jac[0][0] + vec[1] * jac[1][0],
                    vec[0] * jac[0][1] + vec[1] * jac[1][1],
                ]
            } else {
                [
                    jac[0][0] * vec[0] + jac[0][1] * vec[1],
                    jac[1][0] * vec[0] + jac[1][1] * vec[1],
                ]
            };
            worst = worst.max((prod[0] - val * vec[0]).abs());
            worst = worst.max((prod[1] - val * vec[1]).abs());
        }
        worst
    }

    #[test]
    fn decomposition_symmetric_point() {
        let c = char_decomposition(PhysState::new(1.0, 0.0)).unwrap();
        assert_eq!(c.lambda_plus, 1.0);
        assert_eq!(c.lambda_minus, -1.0);
        assert_eq!(c.right_plus, [1.0, 1.0]);
        assert_eq!(c.right_minus, [-1.0, 1.0]);
    }

    #[test]
    fn decomposition_generic_point() {
        // sqrt(1 + 8) = 3.
        let c = char_decomposition(PhysState::new(2.0, 1.0)).unwrap();
        assert!((c.lambda_plus - 2.0).abs() < 1e-15);
        assert!((c.lambda_minus + 1.0).abs() < 1e-15);
        assert!(eigen_residuals(PhysState::new(2.0, 1.0), &c) < 1e-12);
    }

    #[test]
    fn umbilic_point_rejected() {
        assert!(matches!(
            char_decomposition(PhysState::new(0.0, 0.0)),
            Err(CharError::NotStrictlyHyperbolic { .. })
        ));
    }

    #[test]
    fn invariants_reference_values() {
        let (w, z) = riemann_invariants(PhysState::new(1.0, 0.0)).unwrap();
        let expect = -2.0 * std::f64::consts::SQRT_2;
        assert!((w - expect).abs() < 1e-15);
        assert_eq!(w, z);

        // Vacuum boundary with u > 0: the w-radicand vanishes.
        let (w, z) = riemann_invariants(PhysState::new(0.0, 2.0)).unwrap();
        assert_eq!(w, 0.0);
        assert!((z - 4.0).abs() < 1e-15);

        let (w, z) = riemann_invariants(PhysState::new(2.0, 1.0)).unwrap();
        assert!((w + 5.0 * std::f64::consts::SQRT_2).abs() < 1e-14);
        assert!((z + 2.0).abs() < 1e-14);
    }

    #[test]
    fn mirror_identity_exact() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = PhysState::new(rng.random::<f64>() * 10.0, rng.random::<f64>() * 20.0 - 10.0);
            let w = riemann_w(p).unwrap();
            let z = riemann_z(p.mirror()).unwrap();
            assert_eq!(w, z, "mirror identity must be bit-exact at {:?}", p);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..500 {
            let p = PhysState::new(
                0.05 + rng.random::<f64>() * 9.0,
                rng.random::<f64>() * 10.0 - 5.0,
            );
            let (gw, gz) = riemann_gradients(p).unwrap();
            let fw = central_gradient(|r, u| riemann_w(PhysState::new(r, u)).unwrap(), p.rho, p.u, 1e-6);
            let fz = central_gradient(|r, u| riemann_z(PhysState::new(r, u)).unwrap(), p.rho, p.u, 1e-6);
            for k in 0..2 {
                assert!((gw[k] - fw[k]).abs() <= 1e-6 * gw[k].abs().max(1.0), "{:?}", p);
                assert!((gz[k] - fz[k]).abs() <= 1e-6 * gz[k].abs().max(1.0), "{:?}", p);
            }
        }
    }

    #[test]
    fn gradient_orthogonality() {
        // At (1,0): grad w . s = 0 with s = (-1, 1)^T, grad z . r = 0 with r = (1, 1)^T.
        let (gw, gz) = riemann_gradients(PhysState::new(1.0, 0.0)).unwrap();
        assert!(dot(gw, [-1.0, 1.0]).abs() < 1e-12);
        assert!(dot(gz, [1.0, 1.0]).abs() < 1e-12);
        // At (2,1): grad w parallel to (2,2), grad z parallel to (-1,2).
        let (gw, gz) = riemann_gradients(PhysState::new(2.0, 1.0)).unwrap();
        assert!((gw[0] * 2.0 - gw[1] * 2.0).abs() < 1e-12);
        assert!((gz[0] * 2.0 - gz[1] * (-1.0)).abs() < 1e-12);
    }

    #[test]
    fn hessians_psd_and_match_fd() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for _ in 0..300 {
            let p = PhysState::new(
                0.1 + rng.random::<f64>() * 5.0,
                rng.random::<f64>() * 4.0 - 2.0,
            );
            let (hw, hz) = riemann_hessians(p).unwrap();
            let (lo_w, _) = sym2_eigenvalues(hw);
            let (lo_z, _) = sym2_eigenvalues(hz);
            assert!(lo_w >= -1e-10 && lo_z >= -1e-10, "{:?}", p);

            let fd = crate::numerics::central_hessian(
                |r, u| riemann_w(PhysState::new(r, u)).unwrap(),
                p.rho,
                p.u,
                5e-4,
            );
            for i in 0..2 {
                for j in 0..2 {
                    assert!(
                        (hw[i][j] - fd[i][j]).abs() <= 2e-4 * hw[i][j].abs().max(1.0),
                        "hess mismatch at {:?}: {:?} vs {:?}",
                        p,
                        hw,
                        fd
                    );
                }
            }
        }
    }

    #[test]
    fn classify_all_variants() {
        assert_eq!(domain_classify(PhysState::new(1.0, 0.0)), DomainClass::PhysicalInterior);
        assert_eq!(domain_classify(PhysState::new(0.0, 2.0)), DomainClass::PhysicalBoundary);
        assert_eq!(
            domain_classify(PhysState::new(-0.2, 1.0)),
            DomainClass::HyperbolicNonphysical
        );
        assert_eq!(domain_classify(PhysState::new(-1.0, 0.0)), DomainClass::NonHyperbolic);
        assert_eq!(domain_classify(PhysState::new(0.0, 0.0)), DomainClass::UmbilicPoint);
    }

    #[test]
    fn genuine_nonlinearity_reference_values() {
        let (gl, gm) = genuine_nonlinearity(PhysState::new(1.0, 0.0)).unwrap();
        assert!((gl - 1.0).abs() < 1e-15 && (gm - 1.0).abs() < 1e-15);
        // Genuine nonlinearity of the slow field is lost on rho = 0, u >= 0.
        let (gl, gm) = genuine_nonlinearity(PhysState::new(0.0, 2.0)).unwrap();
        assert!((gl - 2.0).abs() < 1e-15 && gm.abs() < 1e-15);
        let (gl, gm) = genuine_nonlinearity(PhysState::new(2.0, 1.0)).unwrap();
        assert!((gl - 4.0 / 3.0).abs() < 1e-15 && (gm - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn genuine_nonlinearity_matches_fd() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..500 {
            let p = PhysState::new(
                1e-3 + rng.random::<f64>() * 10.0,
                rng.random::<f64>() * 20.0 - 10.0,
            );
            let (gl, gm) = genuine_nonlinearity(p).unwrap();
            let (fl, fm) = genuine_nonlinearity_fd(p, 1e-6).unwrap();
            assert!((gl - fl).abs() <= 1e-6 * gl.abs().max(1.0));
            assert!((gm - fm).abs() <= 1e-6 * gm.abs().max(1.0));
        }
    }

    #[test]
    fn speeds_signed_on_physical_domain() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        for _ in 0..10_000 {
            let p = PhysState::new(rng.random::<f64>() * 10.0, rng.random::<f64>() * 20.0 - 10.0);
            let (mu, lambda) = eigenvalues(p).unwrap();
            assert!(mu <= 0.0 && 0.0 <= lambda);
            if p.rho > 0.0 {
                assert!(mu < 0.0 && 0.0 < lambda);
            }
        }
    }

    #[test]
    fn eigen_residual_sweep() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..10_000 {
            let u = rng.random::<f64>() * 20.0 - 10.0;
            let rho_min = -u * u / 4.0;
            let p = PhysState::new(rho_min + 1e-3 + rng.random::<f64>() * 10.0, u);
            let c = char_decomposition(p).unwrap();
            assert!(eigen_residuals(p, &c) < 1e-10);
            assert!(dot(c.left_plus, c.right_minus).abs() < 1e-12);
            assert!(dot(c.left_minus, c.right_plus).abs() < 1e-12);
        }
    }
}
