//! Continuous-time Markov simulation of the bricklayer system on a ring.
//!
//! Sites `j` hold `n_j` walkers; edge `(j, j+1)` carries a brick column of
//! height `h_j` and the discrete slopes are `z_j = h_{j-1} - h_j`. Each
//! walker at `j` jumps right with rate `r(z_j)` and left with rate
//! `r(-z_j)`, laying a brick on the edge it crosses, so a right jump maps
//!
//! ```text
//! (n_j, z_j), (n_j+1, z_j+1)  ->  (n_j - 1, z_j - 1), (n_j+1 + 1, z_j+1 + 1)
//! ```
//!
//! The totals of `n` and `z` and the per-site parity of `n_j + z_j` are
//! conserved exactly. The rate family `r(z) = exp(beta (z - 1/2))`
//! satisfies the normalization `r(z) r(1-z) = 1` identically and makes the
//! equilibrium weights per site `lambda^n / n! theta^z exp(-beta z^2 / 2)`.

mod gibbs;
mod kmc;

pub use gibbs::{
    partition_function, sample_gibbs, sample_local_gibbs, site_probability,
    two_site_balance_residual, GibbsSampler, PartitionValues,
};
pub use kmc::{
    estimate_flux, estimate_flux_gibbs, kmc_step, simulate, FluxEstimate, Kmc, SimRecord,
    SimResult,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BrickError {
    #[error("no mobile particle left: total jump rate is zero")]
    FrozenState,
    #[error("series truncation failed to converge: {0}")]
    NonConvergent(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid rate table: {0}")]
    InvalidRateTable(String),
}

/// Jump rates of the dynamics. The exponential family is the workhorse; a
/// tabulated monotone family satisfying `r(z) r(1-z) = 1` within 1e-12 is
/// accepted for the dynamics as well.
#[derive(Debug, Clone)]
pub struct RateFunction {
    kind: RateKind,
}

#[derive(Debug, Clone)]
enum RateKind {
    Exponential { beta: f64 },
    /// Rates for `z = z_min .. z_min + values.len()`.
    Tabulated { z_min: i64, values: Vec<f64> },
}

impl RateFunction {
    /// `r(z) = exp(beta (z - 1/2))` with `R(z) = exp(beta z^2 / 2)` and
    /// `theta* = +infinity`.
    pub fn exponential(beta: f64) -> Self {
        assert!(beta > 0.0, "rate parameter must be positive");
        Self { kind: RateKind::Exponential { beta } }
    }

    /// A tabulated rate function on a window symmetric around `z = 1/2`
    /// (i.e. covering `1 - z` whenever it covers `z`).
    pub fn tabulated(z_min: i64, values: Vec<f64>) -> Result<Self, BrickError> {
        let z_max = z_min + values.len() as i64 - 1;
        if z_min + z_max != 1 {
            return Err(BrickError::InvalidRateTable(format!(
                "window [{z_min}, {z_max}] is not symmetric around 1/2"
            )));
        }
        let at = |z: i64| values[(z - z_min) as usize];
        for z in z_min..=z_max {
            if !(at(z) > 0.0) {
                return Err(BrickError::InvalidRateTable(format!("r({z}) = {} <= 0", at(z))));
            }
            if (at(z) * at(1 - z) - 1.0).abs() > 1e-12 {
                return Err(BrickError::InvalidRateTable(format!(
                    "r({z}) r({}) = {} != 1",
                    1 - z,
                    at(z) * at(1 - z)
                )));
            }
            if z > z_min && at(z) < at(z - 1) {
                return Err(BrickError::InvalidRateTable(format!("not monotone at z = {z}")));
            }
        }
        Ok(Self { kind: RateKind::Tabulated { z_min, values } })
    }

    /// Instantaneous jump rate `r(z)` per walker.
    pub fn rate(&self, z: i64) -> f64 {
        match &self.kind {
            RateKind::Exponential { beta } => (beta * (z as f64 - 0.5)).exp(),
            RateKind::Tabulated { z_min, values } => {
                let idx = z - z_min;
                assert!(
                    idx >= 0 && (idx as usize) < values.len(),
                    "z = {z} outside the tabulated window"
                );
                values[idx as usize]
            }
        }
    }

    /// `R(z) = prod_(k=1..|z|) r(k)`; `exp(beta z^2 / 2)` for the
    /// exponential family.
    pub fn big_r(&self, z: i64) -> f64 {
        match &self.kind {
            RateKind::Exponential { beta } => (beta * (z * z) as f64 / 2.0).exp(),
            RateKind::Tabulated { .. } => {
                (1..=z.abs()).map(|k| self.rate(k)).product()
            }
        }
    }

    /// `theta* = lim r(k)`, the upper end of the admissible tilt interval.
    pub fn theta_star(&self) -> f64 {
        match &self.kind {
            RateKind::Exponential { .. } => f64::INFINITY,
            RateKind::Tabulated { values, .. } => *values.last().unwrap(),
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match &self.kind {
            RateKind::Exponential { beta } => Some(*beta),
            RateKind::Tabulated { .. } => None,
        }
    }
}

/// Grand-canonical parameters of the equilibrium product measure
/// `mu(n, z) ~ lambda^n / n! theta^z / R(z)` on the parity class
/// `n + z = s mod 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsParams {
    pub fugacity: f64,
    pub tilt: f64,
    pub parity: u8,
    pub beta: f64,
}

impl GibbsParams {
    pub fn new(fugacity: f64, tilt: f64, parity: u8, beta: f64) -> Result<Self, BrickError> {
        if !(fugacity > 0.0) {
            return Err(BrickError::InvalidParams(format!("fugacity = {fugacity} must be > 0")));
        }
        if !(tilt > 0.0) || !tilt.is_finite() {
            return Err(BrickError::InvalidParams(format!("tilt = {tilt} must be in (0, inf)")));
        }
        if parity > 1 {
            return Err(BrickError::InvalidParams(format!("parity = {parity} must be 0 or 1")));
        }
        if !(beta > 0.0) {
            return Err(BrickError::InvalidParams(format!("beta = {beta} must be > 0")));
        }
        Ok(Self { fugacity, tilt, parity, beta })
    }
}

/// Which way a walker jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Right,
    Left,
}

/// Lattice state of the ring: occupations, slopes, optional brick heights,
/// frozen parity vector and the simulation clock.
#[derive(Debug, Clone, PartialEq)]
pub struct BrickState {
    pub n: Vec<u32>,
    pub z: Vec<i32>,
    /// Brick count above edge `(j, j+1)`; tracked only when the slopes sum
    /// to zero around the ring.
    pub h: Option<Vec<i64>>,
    pub s: Vec<u8>,
    pub time: f64,
}

impl BrickState {
    pub fn new(n: Vec<u32>, z: Vec<i32>) -> Self {
        assert!(n.len() >= 2 && n.len() == z.len(), "need matching site arrays, L >= 2");
        let s = n
            .iter()
            .zip(&z)
            .map(|(&n, &z)| ((n as i64 + z as i64).rem_euclid(2)) as u8)
            .collect();
        Self { n, z, h: None, s, time: 0.0 }
    }

    /// Build a state from explicit heights; slopes follow as
    /// `z_j = h_(j-1) - h_j` and sum to zero around the ring.
    pub fn with_heights(n: Vec<u32>, h: Vec<i64>) -> Self {
        assert!(n.len() >= 2 && n.len() == h.len());
        let len = h.len();
        let z: Vec<i32> = (0..len)
            .map(|j| (h[(j + len - 1) % len] - h[j]) as i32)
            .collect();
        let mut st = Self::new(n, z);
        st.h = Some(h);
        st
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.iter().all(|&v| v == 0)
    }

    pub fn total_n(&self) -> u64 {
        self.n.iter().map(|&v| v as u64).sum()
    }

    pub fn total_z(&self) -> i64 {
        self.z.iter().map(|&v| v as i64).sum()
    }

    /// Per-site parity invariant `n_j + z_j = s_j mod 2`.
    pub fn parity_ok(&self) -> bool {
        self.n
            .iter()
            .zip(&self.z)
            .zip(&self.s)
            .all(|((&n, &z), &s)| ((n as i64 + z as i64).rem_euclid(2)) as u8 == s)
    }

    /// Height/slope consistency when heights are tracked.
    pub fn heights_consistent(&self) -> bool {
        match &self.h {
            None => true,
            Some(h) => {
                let len = h.len();
                (0..len).all(|j| (h[(j + len - 1) % len] - h[j]) as i32 == self.z[j])
            }
        }
    }

    /// Apply the generator move for one walker jump from `site`; the brick
    /// lands on the crossed edge.
    pub fn apply_jump(&mut self, site: usize, dir: Direction) {
        debug_assert!(self.n[site] >= 1, "no walker to move at site {site}");
        let len = self.len();
        match dir {
            Direction::Right => {
                let dst = (site + 1) % len;
                self.n[site] -= 1;
                self.z[site] -= 1;
                self.n[dst] += 1;
                self.z[dst] += 1;
                if let Some(h) = &mut self.h {
                    h[site] += 1;
                }
            }
            Direction::Left => {
                let dst = (site + len - 1) % len;
                self.n[site] -= 1;
                self.z[site] += 1;
                self.n[dst] += 1;
                self.z[dst] -= 1;
                if let Some(h) = &mut self.h {
                    h[dst] += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_normalization_exact() {
        let rf = RateFunction::exponential(1.0);
        for z in -20..=20 {
            // Exact identity of the family; floating point leaves an ulp.
            assert!(
                (rf.rate(z) * rf.rate(1 - z) - 1.0).abs() < 1e-15,
                "r({z}) r({}) != 1",
                1 - z
            );
        }
        // r(0) r(1) = e^(-b/2) e^(b/2) = 1.
        assert!((rf.rate(0) - (-0.5_f64).exp()).abs() < 1e-15);
        assert!((rf.rate(3) - (2.5_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn big_r_matches_product() {
        let rf = RateFunction::exponential(0.7);
        for z in 0..=10 {
            let prod: f64 = (1..=z).map(|k| rf.rate(k)).product();
            assert!((rf.big_r(z) - prod).abs() <= 1e-12 * prod);
            assert_eq!(rf.big_r(z), rf.big_r(-z));
        }
        // R(z) = R(z-1) r(z) and R(z+1) r(-z).
        for z in -8..=8i64 {
            let lhs = rf.big_r(z);
            assert!((lhs - rf.big_r(z - 1) * rf.rate(z)).abs() <= 1e-12 * lhs);
            assert!((lhs - rf.big_r(z + 1) * rf.rate(-z)).abs() <= 1e-12 * lhs);
        }
    }

    #[test]
    fn tabulated_rates_validated() {
        let beta = 0.5f64;
        let good: Vec<f64> = (-6..=7).map(|z| (beta * (z as f64 - 0.5)).exp()).collect();
        let rf = RateFunction::tabulated(-6, good).unwrap();
        assert!((rf.rate(3) - (beta * 2.5).exp()).abs() < 1e-14);

        let bad: Vec<f64> = (-6..=7).map(|z| (beta * z as f64).exp()).collect();
        assert!(RateFunction::tabulated(-6, bad).is_err());
    }

    #[test]
    fn jumps_preserve_conserved_quantities() {
        let mut st = BrickState::with_heights(vec![3, 0, 1, 2], vec![5, 5, 4, 6]);
        let (n0, z0) = (st.total_n(), st.total_z());
        assert!(st.parity_ok() && st.heights_consistent());
        st.apply_jump(0, Direction::Right);
        st.apply_jump(2, Direction::Left);
        st.apply_jump(3, Direction::Left);
        assert_eq!(st.total_n(), n0);
        assert_eq!(st.total_z(), z0);
        assert!(st.parity_ok() && st.heights_consistent());
    }

    #[test]
    fn parity_recorded_from_initial_state() {
        let st = BrickState::new(vec![1, 2, 0, 3], vec![0, -1, 2, 1]);
        assert_eq!(st.s, vec![1, 1, 0, 0]);
    }
}
