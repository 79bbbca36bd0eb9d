//! Rankine-Hugoniot jump algebra and Lax stability classification.
//!
//! For a jump between `left` and `right` moving at speed `sigma` the jump
//! conditions read
//!
//! ```text
//! [rho u] = sigma [rho],    [rho] = sigma [u]        ([.] = right - left)
//! ```
//!
//! which pin the right state as `rho_r = sigma^2 - sigma u_l`,
//! `u_r = sigma - rho_l / sigma`. A notable feature of this system:
//! `rho_r` depends only on `(sigma, u_l)` and `u_r` only on
//! `(sigma, rho_l)`.

use crate::characteristics::{eigenvalues, PhysState};
use thiserror::Error;

/// Default relative tolerance on the RH residuals accepted by
/// [`classify_discontinuity`]; states measured from discrete solvers carry
/// discretization error.
pub const RH_CLASSIFY_TOL: f64 = 1e-8;

/// Lax stability classes of an RH discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShockClass {
    /// `mu(r) < sigma < min(mu(l), lambda(r))`; always has `sigma < 0` here.
    BackShock,
    /// `max(lambda(r), mu(l)) < sigma < lambda(l)`; always has `sigma > 0` here.
    FrontShock,
    /// Violates both sets of inequalities: physically not realisable.
    Unstable,
}

/// A classified discontinuity.
#[derive(Debug, Clone, Copy)]
pub struct ShockData {
    pub left: PhysState,
    pub right: PhysState,
    pub sigma: f64,
    pub classification: ShockClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ShockError {
    #[error("degenerate jump: rho or u equal on both sides")]
    DegenerateJump,
    #[error("sigma = 0 leaves the jump relations singular")]
    ZeroSpeed,
    #[error("no real propagation speed: u_right^2 + 4 rho_left = {disc} < 0")]
    NoRealSpeed { disc: f64 },
    #[error("states do not satisfy the Rankine-Hugoniot conditions (residuals {r1}, {r2})")]
    NotRankineHugoniot { r1: f64, r2: f64 },
    #[error("state outside the closure of the hyperbolic domain")]
    NotHyperbolic,
}

/// Rankine-Hugoniot residuals `([rho u] - sigma [rho], [rho] - sigma [u])`.
///
/// Both vanish iff `(left, right, sigma)` is an RH discontinuity. Errors on
/// jumps degenerate in either component, where the ratio forms of the
/// conditions lose meaning.
pub fn rh_residual(left: PhysState, right: PhysState, sigma: f64) -> Result<(f64, f64), ShockError> {
    if right.rho == left.rho || right.u == left.u {
        return Err(ShockError::DegenerateJump);
    }
    Ok(rh_residual_raw(left, right, sigma))
}

fn rh_residual_raw(left: PhysState, right: PhysState, sigma: f64) -> (f64, f64) {
    let jump_flux = right.rho * right.u - left.rho * left.u;
    let jump_rho = right.rho - left.rho;
    let jump_u = right.u - left.u;
    (jump_flux - sigma * jump_rho, jump_rho - sigma * jump_u)
}

/// Complete the jump: the right state determined by the left state and the
/// propagation speed, `(sigma^2 - sigma u_l, sigma - rho_l / sigma)`.
pub fn right_state_from_speed(left: PhysState, sigma: f64) -> Result<PhysState, ShockError> {
    if sigma == 0.0 {
        return Err(ShockError::ZeroSpeed);
    }
    Ok(PhysState::new(sigma * sigma - sigma * left.u, sigma - left.rho / sigma))
}

/// Candidate propagation speeds `(sigma_plus, sigma_minus)`: the two roots of
/// `sigma^2 - sigma u_r - rho_l = 0`. The caller selects the root with
/// vanishing [`rh_residual`].
pub fn shock_speeds(left: PhysState, right: PhysState) -> Result<(f64, f64), ShockError> {
    let disc = right.u * right.u + 4.0 * left.rho;
    if disc < 0.0 {
        return Err(ShockError::NoRealSpeed { disc });
    }
    let root = disc.sqrt();
    Ok((0.5 * (right.u + root), 0.5 * (right.u - root)))
}

/// Lax classification of an RH discontinuity, with the RH precondition
/// checked at relative tolerance `RH_CLASSIFY_TOL`.
///
/// The inequalities are strict; boundary equality cases (including
/// stationary contact-like jumps with `sigma = 0`) come back `Unstable`.
pub fn classify_discontinuity(
    left: PhysState,
    right: PhysState,
    sigma: f64,
) -> Result<ShockClass, ShockError> {
    let (r1, r2) = rh_residual_raw(left, right, sigma);
    let scale1 = (right.rho * right.u).abs().max((left.rho * left.u).abs());
    let scale2 = (right.rho - left.rho).abs().max(sigma.abs() * (right.u - left.u).abs());
    if r1.abs() > RH_CLASSIFY_TOL * scale1.max(1.0) || r2.abs() > RH_CLASSIFY_TOL * scale2.max(1.0) {
        return Err(ShockError::NotRankineHugoniot { r1, r2 });
    }
    let (mu_l, lambda_l) = eigenvalues(left).ok_or(ShockError::NotHyperbolic)?;
    let (mu_r, lambda_r) = eigenvalues(right).ok_or(ShockError::NotHyperbolic)?;
    if mu_r < sigma && sigma < mu_l.min(lambda_r) {
        Ok(ShockClass::BackShock)
    } else if lambda_r.max(mu_l) < sigma && sigma < lambda_l {
        Ok(ShockClass::FrontShock)
    } else {
        Ok(ShockClass::Unstable)
    }
}

/// Convenience wrapper bundling the classification into [`ShockData`].
pub fn shock_data(left: PhysState, right: PhysState, sigma: f64) -> Result<ShockData, ShockError> {
    Ok(ShockData {
        left,
        right,
        sigma,
        classification: classify_discontinuity(left, right, sigma)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    const FRONT_LEFT: PhysState = PhysState { rho: 2.0, u: 1.0 };
    const FRONT_RIGHT: PhysState = PhysState { rho: 0.75, u: 1.0 / 6.0 };

    #[test]
    fn residual_vanishes_on_rh_pair() {
        let (r1, r2) = rh_residual(FRONT_LEFT, FRONT_RIGHT, 1.5).unwrap();
        assert!(r1.abs() < 1e-15 && r2.abs() < 1e-15);
    }

    #[test]
    fn residual_degenerate_jump() {
        let p = PhysState::new(1.0, 0.0);
        assert_eq!(rh_residual(p, p, 0.7), Err(ShockError::DegenerateJump));
    }

    #[test]
    fn residual_nonzero_off_rh() {
        // [rho u] = 2, [rho] = 1, [u] = 1 at sigma = 0.
        let (r1, r2) = rh_residual(PhysState::new(1.0, 0.0), PhysState::new(2.0, 1.0), 0.0).unwrap();
        assert_eq!(r1, 2.0);
        assert_eq!(r2, 1.0);
    }

    #[test]
    fn right_state_examples() {
        let r = right_state_from_speed(PhysState::new(0.5, 0.0), 1.0).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-15 && (r.u - 0.5).abs() < 1e-15);

        let r = right_state_from_speed(FRONT_LEFT, 1.5).unwrap();
        assert!((r.rho - 0.75).abs() < 1e-15 && (r.u - 1.0 / 6.0).abs() < 1e-15);

        assert_eq!(
            right_state_from_speed(PhysState::new(1.0, 0.0), 0.0),
            Err(ShockError::ZeroSpeed)
        );
    }

    #[test]
    fn speed_candidates() {
        let (sp, sm) = shock_speeds(PhysState::new(0.5, 0.0), PhysState::new(1.0, 0.5)).unwrap();
        assert!((sp - 1.0).abs() < 1e-15 && (sm + 0.5).abs() < 1e-15);
        let (r1, r2) = rh_residual(PhysState::new(0.5, 0.0), PhysState::new(1.0, 0.5), sp).unwrap();
        assert!(r1.abs() < 1e-14 && r2.abs() < 1e-14);

        // Vacuum-degenerate case.
        let (sp, sm) = shock_speeds(PhysState::new(0.0, 0.0), PhysState::new(0.0, 0.7)).unwrap();
        assert!((sp - 0.7).abs() < 1e-15 && sm.abs() < 1e-15);

        // Quadratic roots (1/6 +- 17/6) / 2.
        let (sp, _) = shock_speeds(FRONT_LEFT, FRONT_RIGHT).unwrap();
        assert!((sp - 1.5).abs() < 1e-14);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            classify_discontinuity(FRONT_LEFT, FRONT_RIGHT, 1.5).unwrap(),
            ShockClass::FrontShock
        );
        // Mirror image (rho, u, x) -> (rho, -u, -x) of the previous jump.
        assert_eq!(
            classify_discontinuity(FRONT_RIGHT.mirror(), FRONT_LEFT.mirror(), -1.5).unwrap(),
            ShockClass::BackShock
        );
        // lambda(left) ~ 0.707 < sigma = 1: unstable.
        assert_eq!(
            classify_discontinuity(PhysState::new(0.5, 0.0), PhysState::new(1.0, 0.5), 1.0).unwrap(),
            ShockClass::Unstable
        );
    }

    #[test]
    fn classify_rejects_non_rh_data() {
        assert!(matches!(
            classify_discontinuity(PhysState::new(1.0, 0.0), PhysState::new(2.0, 1.0), 0.3),
            Err(ShockError::NotRankineHugoniot { .. })
        ));
    }

    #[test]
    fn stationary_vacuum_contact_is_unstable() {
        // sigma = 0 RH data only exist with [rho] = 0; on the vacuum line the
        // residuals vanish identically and the strict inequalities fail.
        let left = PhysState::new(0.0, 1.0);
        let right = PhysState::new(0.0, -1.0);
        assert_eq!(classify_discontinuity(left, right, 0.0).unwrap(), ShockClass::Unstable);
    }

    #[test]
    fn completed_jumps_satisfy_rh() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..10_000 {
            let left = PhysState::new(rng.random::<f64>() * 5.0, rng.random::<f64>() * 4.0 - 2.0);
            let mut sigma = rng.random::<f64>() * 6.0 - 3.0;
            if sigma.abs() < 1e-3 {
                sigma = 0.5;
            }
            let right = right_state_from_speed(left, sigma).unwrap();
            if right.rho == left.rho || right.u == left.u {
                continue;
            }
            let (r1, r2) = rh_residual(left, right, sigma).unwrap();
            let scale = (left.rho.abs() + left.u.abs() + sigma.abs()).max(1.0);
            assert!(r1.abs() < 1e-10 * scale && r2.abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn sign_law_and_mirror_covariance() {
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        let mut front = 0;
        let mut back = 0;
        for _ in 0..10_000 {
            let left = PhysState::new(0.05 + rng.random::<f64>() * 4.0, rng.random::<f64>() * 4.0 - 2.0);
            let sigma = rng.random::<f64>() * 6.0 - 3.0;
            if sigma.abs() < 1e-3 {
                continue;
            }
            let right = right_state_from_speed(left, sigma).unwrap();
            if !right.in_physical() {
                continue;
            }
            let class = classify_discontinuity(left, right, sigma).unwrap();
            match class {
                ShockClass::FrontShock => {
                    assert!(sigma > 0.0, "front shock with sigma = {sigma}");
                    front += 1;
                }
                ShockClass::BackShock => {
                    assert!(sigma < 0.0, "back shock with sigma = {sigma}");
                    back += 1;
                }
                ShockClass::Unstable => {}
            }
            let mirrored =
                classify_discontinuity(right.mirror(), left.mirror(), -sigma).unwrap();
            let expected = match class {
                ShockClass::BackShock => ShockClass::FrontShock,
                ShockClass::FrontShock => ShockClass::BackShock,
                ShockClass::Unstable => ShockClass::Unstable,
            };
            assert_eq!(mirrored, expected);
        }
        assert!(front > 100 && back > 100, "sampled {front} fronts, {back} backs");
    }

    #[test]
    fn jump_relations_ignore_unused_coordinate() {
        // rho_r is a function of (sigma, u_l) only; u_r of (sigma, rho_l) only.
        let a = right_state_from_speed(PhysState::new(2.0, 1.0), 1.5).unwrap();
        let b = right_state_from_speed(PhysState::new(9.9, 1.0), 1.5).unwrap();
        assert_eq!(a.rho, b.rho);
        let c = right_state_from_speed(PhysState::new(2.0, -7.3), 1.5).unwrap();
        assert_eq!(a.u, c.u);
    }
}
