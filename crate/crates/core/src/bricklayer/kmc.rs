//! Exact continuous-time (Gillespie) dynamics with a binary rate tree:
//! event selection and local rate updates cost `O(log L)`, so rings up to
//! millions of sites stay cheap per event.

use super::{BrickError, BrickState, Direction, GibbsParams, GibbsSampler, RateFunction};
use rand::Rng;

/// Sum tree over leaf rates supporting point updates and proportional
/// selection. Parents are recomputed from children on update, so no
/// incremental floating-point drift accumulates.
struct RateTree {
    size: usize,
    tree: Vec<f64>,
    n_leaves: usize,
}

impl RateTree {
    fn new(leaves: &[f64]) -> Self {
        let size = leaves.len().next_power_of_two().max(1);
        let mut tree = vec![0.0; 2 * size];
        tree[size..size + leaves.len()].copy_from_slice(leaves);
        for i in (1..size).rev() {
            tree[i] = tree[2 * i] + tree[2 * i + 1];
        }
        Self { size, tree, n_leaves: leaves.len() }
    }

    fn total(&self) -> f64 {
        self.tree[1]
    }

    fn get(&self, leaf: usize) -> f64 {
        self.tree[self.size + leaf]
    }

    fn update(&mut self, leaf: usize, value: f64) {
        let mut i = self.size + leaf;
        self.tree[i] = value;
        while i > 1 {
            i /= 2;
            self.tree[i] = self.tree[2 * i] + self.tree[2 * i + 1];
        }
    }

    /// Leaf index selected proportionally to its rate by `u` drawn uniform
    /// on `[0, total)`.
    fn select(&self, mut u: f64) -> usize {
        let mut i = 1;
        while i < self.size {
            let left = self.tree[2 * i];
            if u < left {
                i = 2 * i;
            } else {
                u -= left;
                i = 2 * i + 1;
            }
        }
        let mut leaf = i - self.size;
        if leaf >= self.n_leaves || self.get(leaf) == 0.0 {
            // Rounding pushed the walk onto an empty leaf; take the first
            // active one instead.
            leaf = (0..self.n_leaves).find(|&k| self.get(k) > 0.0).unwrap_or(0);
        }
        leaf
    }
}

/// A running realization: lattice state plus its rate tree.
///
/// Leaves `2j` and `2j + 1` hold the right/left jump rates
/// `n_j r(z_j)` and `n_j r(-z_j)` of site `j`. Per-site time integrals of
/// both rates are accumulated lazily for flux estimators and generator
/// identities.
pub struct Kmc<'a> {
    pub state: BrickState,
    rf: &'a RateFunction,
    tree: RateTree,
    events: u64,
    integral_plus: Vec<f64>,
    integral_minus: Vec<f64>,
    last_touch: Vec<f64>,
}

impl<'a> Kmc<'a> {
    pub fn new(state: BrickState, rf: &'a RateFunction) -> Self {
        let len = state.len();
        let mut leaves = vec![0.0; 2 * len];
        for j in 0..len {
            leaves[2 * j] = state.n[j] as f64 * rf.rate(state.z[j] as i64);
            leaves[2 * j + 1] = state.n[j] as f64 * rf.rate(-(state.z[j] as i64));
        }
        let t0 = state.time;
        Kmc {
            tree: RateTree::new(&leaves),
            rf,
            events: 0,
            integral_plus: vec![0.0; len],
            integral_minus: vec![0.0; len],
            last_touch: vec![t0; len],
            state,
        }
    }

    pub fn total_rate(&self) -> f64 {
        self.tree.total()
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    fn settle_site(&mut self, j: usize) {
        let dt = self.state.time - self.last_touch[j];
        if dt > 0.0 {
            self.integral_plus[j] += self.tree.get(2 * j) * dt;
            self.integral_minus[j] += self.tree.get(2 * j + 1) * dt;
            self.last_touch[j] = self.state.time;
        }
    }

    fn refresh_site(&mut self, j: usize) {
        self.settle_site(j);
        let n = self.state.n[j] as f64;
        let z = self.state.z[j] as i64;
        self.tree.update(2 * j, n * self.rf.rate(z));
        self.tree.update(2 * j + 1, n * self.rf.rate(-z));
    }

    /// One event: exponential waiting time at the total rate, site and
    /// direction proportional to `n_j r(+-z_j)`. Returns the elapsed time.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<f64, BrickError> {
        let total = self.total_rate();
        if !(total > 0.0) {
            return Err(BrickError::FrozenState);
        }
        let tau = -(1.0 - rng.random::<f64>()).ln() / total;
        let leaf = self.tree.select(rng.random::<f64>() * total);
        let site = leaf / 2;
        let dir = if leaf % 2 == 0 { Direction::Right } else { Direction::Left };
        self.state.time += tau;
        let neighbor = match dir {
            Direction::Right => (site + 1) % self.state.len(),
            Direction::Left => (site + self.state.len() - 1) % self.state.len(),
        };
        // Settle both sites' integrals at the post-waiting clock before the
        // rates change.
        self.state.apply_jump(site, dir);
        self.refresh_site(site);
        self.refresh_site(neighbor);
        self.events += 1;
        Ok(tau)
    }

    /// Advance to `t_end`. A frozen state simply coasts (zero events);
    /// memorylessness makes capping the last waiting time exact.
    pub fn run_until<R: Rng + ?Sized>(&mut self, t_end: f64, rng: &mut R) -> Result<(), BrickError> {
        while self.state.time < t_end {
            let total = self.total_rate();
            if !(total > 0.0) {
                self.state.time = t_end;
                break;
            }
            let tau = -(1.0 - rng.random::<f64>()).ln() / total;
            if self.state.time + tau > t_end {
                self.state.time = t_end;
                break;
            }
            let leaf = self.tree.select(rng.random::<f64>() * total);
            let site = leaf / 2;
            let dir = if leaf % 2 == 0 { Direction::Right } else { Direction::Left };
            self.state.time += tau;
            let neighbor = match dir {
                Direction::Right => (site + 1) % self.state.len(),
                Direction::Left => (site + self.state.len() - 1) % self.state.len(),
            };
            self.state.apply_jump(site, dir);
            self.refresh_site(site);
            self.refresh_site(neighbor);
            self.events += 1;
        }
        Ok(())
    }

    /// Per-site time integrals `(int n_j r(z_j) dt, int n_j r(-z_j) dt)`
    /// settled up to the current clock.
    pub fn flux_integrals(&mut self) -> (Vec<f64>, Vec<f64>) {
        for j in 0..self.state.len() {
            self.settle_site(j);
        }
        (self.integral_plus.clone(), self.integral_minus.clone())
    }
}

/// One public-facing event on a bare state (engine built on the fly; use
/// [`Kmc`] directly for long runs).
pub fn kmc_step<R: Rng + ?Sized>(
    state: &BrickState,
    rf: &RateFunction,
    rng: &mut R,
) -> Result<(BrickState, f64), BrickError> {
    let mut engine = Kmc::new(state.clone(), rf);
    let tau = engine.step(rng)?;
    Ok((engine.state, tau))
}

/// Snapshot of the lattice at one requested time.
#[derive(Debug, Clone)]
pub struct SimRecord {
    pub time: f64,
    pub n: Vec<u32>,
    pub z: Vec<i32>,
    pub h: Option<Vec<i64>>,
}

/// Output of [`simulate`].
#[derive(Debug)]
pub struct SimResult {
    pub records: Vec<SimRecord>,
    pub events: u64,
    /// Per-site `int n_j r(z_j) dt` over the whole run.
    pub flux_integral_plus: Vec<f64>,
    /// Per-site `int n_j r(-z_j) dt` over the whole run.
    pub flux_integral_minus: Vec<f64>,
    pub final_state: BrickState,
}

/// Run the event loop to `t_end`, recording profiles at the requested times
/// (monotone, within `[state.time, t_end]`).
pub fn simulate<R: Rng + ?Sized>(
    state: BrickState,
    rf: &RateFunction,
    t_end: f64,
    record_times: &[f64],
    rng: &mut R,
) -> Result<SimResult, BrickError> {
    assert!(t_end >= state.time, "t_end precedes the state clock");
    let mut engine = Kmc::new(state, rf);
    let mut records = Vec::with_capacity(record_times.len());
    for &t in record_times {
        assert!(t >= engine.state.time && t <= t_end, "record times must be sorted in range");
        engine.run_until(t, rng)?;
        records.push(SimRecord {
            time: engine.state.time,
            n: engine.state.n.clone(),
            z: engine.state.z.clone(),
            h: engine.state.h.clone(),
        });
    }
    engine.run_until(t_end, rng)?;
    let (plus, minus) = engine.flux_integrals();
    Ok(SimResult {
        records,
        events: engine.events(),
        flux_integral_plus: plus,
        flux_integral_minus: minus,
        final_state: engine.state,
    })
}

/// Monte Carlo estimate of the microscopic fluxes `<n r(z)>` and
/// `<n r(-z)>` with standard errors.
#[derive(Debug, Clone, Copy)]
pub struct FluxEstimate {
    pub plus: f64,
    pub plus_se: f64,
    pub minus: f64,
    pub minus_se: f64,
    pub samples: u64,
}

fn mean_se(sum: f64, sum_sq: f64, m: f64) -> (f64, f64) {
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0);
    (mean, (var / (m - 1.0)).sqrt())
}

/// Estimate the fluxes from a site ensemble (all sites of all given states).
/// At equilibrium `(lambda, theta)` they match `lambda theta^(+-1)`.
pub fn estimate_flux(states: &[BrickState], rf: &RateFunction) -> FluxEstimate {
    let mut m = 0.0;
    let (mut sp, mut sp2, mut sm, mut sm2) = (0.0, 0.0, 0.0, 0.0);
    for st in states {
        for j in 0..st.len() {
            let plus = st.n[j] as f64 * rf.rate(st.z[j] as i64);
            let minus = st.n[j] as f64 * rf.rate(-(st.z[j] as i64));
            sp += plus;
            sp2 += plus * plus;
            sm += minus;
            sm2 += minus * minus;
            m += 1.0;
        }
    }
    let (plus, plus_se) = mean_se(sp, sp2, m);
    let (minus, minus_se) = mean_se(sm, sm2, m);
    FluxEstimate { plus, plus_se, minus, minus_se, samples: m as u64 }
}

/// Estimate the fluxes from `m` i.i.d. single-site Gibbs draws.
pub fn estimate_flux_gibbs<R: Rng + ?Sized>(
    gp: &GibbsParams,
    rf: &RateFunction,
    m: usize,
    rng: &mut R,
) -> Result<FluxEstimate, BrickError> {
    let sampler = GibbsSampler::new(*gp)?;
    let (mut sp, mut sp2, mut sm, mut sm2) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..m {
        let (n, z) = sampler.sample_site(rng);
        let plus = n as f64 * rf.rate(z as i64);
        let minus = n as f64 * rf.rate(-(z as i64));
        sp += plus;
        sp2 += plus * plus;
        sm += minus;
        sm2 += minus * minus;
    }
    let (plus, plus_se) = mean_se(sp, sp2, m as f64);
    let (minus, minus_se) = mean_se(sm, sm2, m as f64);
    Ok(FluxEstimate { plus, plus_se, minus, minus_se, samples: m as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn frozen_state_reported() {
        let rf = RateFunction::exponential(1.0);
        let st = BrickState::new(vec![0, 0, 0, 0], vec![0, 0, 0, 0]);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        assert_eq!(kmc_step(&st, &rf, &mut rng).unwrap_err(), BrickError::FrozenState);
    }

    #[test]
    fn empty_lattice_simulation_is_constant() {
        let rf = RateFunction::exponential(1.0);
        let st = BrickState::new(vec![0, 0, 0, 0], vec![2, -2, 2, -2]);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let out = simulate(st.clone(), &rf, 5.0, &[1.0, 4.0], &mut rng).unwrap();
        assert_eq!(out.events, 0);
        assert_eq!(out.records[1].z, st.z);
        assert_eq!(out.final_state.time, 5.0);
    }

    #[test]
    fn single_particle_flat_wall_jump_rates() {
        // One walker on z = 0: both directions at rate r(0) = e^(-beta/2).
        let rf = RateFunction::exponential(1.0);
        let st = BrickState::new(vec![1, 0, 0, 0], vec![0, 0, 0, 0]);
        let engine = Kmc::new(st, &rf);
        let r0 = (-0.5f64).exp();
        assert!((engine.total_rate() - 2.0 * r0).abs() < 1e-14);
        // Jump direction is a fair coin; check empirically.
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let mut right = 0;
        let trials = 20_000;
        for _ in 0..trials {
            let st = BrickState::new(vec![1, 0, 0, 0], vec![0, 0, 0, 0]);
            let (next, _) = kmc_step(&st, &rf, &mut rng).unwrap();
            if next.n[1] == 1 {
                right += 1;
            }
        }
        let frac = right as f64 / trials as f64;
        assert!((frac - 0.5).abs() < 0.02, "right fraction {frac}");
    }

    #[test]
    fn long_run_conserves_everything_exactly() {
        let rf = RateFunction::exponential(1.0);
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let gp = GibbsParams::new(0.8, 1.2, 0, 1.0).unwrap();
        let st = crate::bricklayer::sample_gibbs(&gp, 32, &mut rng).unwrap();
        let (n0, z0, s0) = (st.total_n(), st.total_z(), st.s.clone());
        let mut engine = Kmc::new(st, &rf);
        for _ in 0..10_000 {
            engine.step(&mut rng).unwrap();
        }
        assert_eq!(engine.state.total_n(), n0);
        assert_eq!(engine.state.total_z(), z0);
        assert_eq!(engine.state.s, s0);
        assert!(engine.state.parity_ok());
    }

    #[test]
    fn heights_track_slopes_exactly() {
        let rf = RateFunction::exponential(0.8);
        let st = BrickState::with_heights(vec![2, 1, 3, 1, 0, 2], vec![4, 4, 5, 3, 4, 4]);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut engine = Kmc::new(st, &rf);
        for _ in 0..5_000 {
            engine.step(&mut rng).unwrap();
        }
        assert!(engine.state.heights_consistent());
    }

    #[test]
    fn flux_estimate_matches_identity() {
        // <n r(+-z)> = lambda theta^(+-1) at equilibrium.
        let gp = GibbsParams::new(0.8, 1.2, 0, 1.0).unwrap();
        let rf = RateFunction::exponential(1.0);
        let mut rng = ChaCha12Rng::seed_from_u64(101);
        let est = estimate_flux_gibbs(&gp, &rf, 100_000, &mut rng).unwrap();
        assert!(
            (est.plus - 0.96).abs() < 3.0 * est.plus_se,
            "plus {} +- {}",
            est.plus,
            est.plus_se
        );
        assert!(
            (est.minus - 0.8 / 1.2).abs() < 3.0 * est.minus_se,
            "minus {} +- {}",
            est.minus,
            est.minus_se
        );
    }

    #[test]
    fn dynkin_identity_within_monte_carlo_error() {
        // E[n_j(T) - n_j(0)] equals the expected time integral of
        // L n_j = (n_(j-1) r(z_(j-1)) - n_j r(-z_j)) - (n_j r(z_j) - n_(j+1) r(-z_(j+1))),
        // a discrete gradient of fluxes; both sides from the same runs.
        let rf = RateFunction::exponential(1.0);
        let len = 8usize;
        let t_end = 2.0;
        let replicas = 4000;
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let site = 3usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..replicas {
            // Deterministic inhomogeneous start: all walkers on site 0.
            let mut n = vec![0u32; len];
            n[0] = 6;
            let st = BrickState::new(n, vec![0; len]);
            let n_before = st.n[site] as f64;
            let mut engine = Kmc::new(st, &rf);
            engine.run_until(t_end, &mut rng).unwrap();
            let (plus, minus) = engine.flux_integrals();
            let lhs = engine.state.n[site] as f64 - n_before;
            let rhs = (plus[(site + len - 1) % len] - minus[site])
                - (plus[site] - minus[(site + 1) % len]);
            let martingale = lhs - rhs;
            sum += martingale;
            sum_sq += martingale * martingale;
        }
        let m = replicas as f64;
        let diff = sum / m;
        let var = (sum_sq / m - diff * diff).max(1e-12);
        let se = (var / m).sqrt();
        assert!(diff.abs() < 4.0 * se, "Dynkin defect {diff} vs se {se}");
    }
}
