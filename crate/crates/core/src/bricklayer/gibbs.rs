//! Equilibrium Gibbs measures: the single-site partition function
//!
//! ```text
//! Z_s(lambda, theta) = sum_(n + z = s mod 2) lambda^n / n! theta^z exp(-beta z^2 / 2)
//! ```
//!
//! its derivatives, exact product-measure samplers and the two-site balance
//! identity behind stationarity.

use super::{BrickError, BrickState, GibbsParams};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// Truncated partition sum and the derivative combinations needed for the
/// thermodynamic functions (`Z_ll` denotes `d^2 Z / d lambda^2` etc).
#[derive(Debug, Clone, Copy)]
pub struct PartitionValues {
    pub z: f64,
    pub dz_dlam: f64,
    pub dz_dtheta: f64,
    pub d2z_dlam2: f64,
    pub d2z_dlamdtheta: f64,
    pub d2z_dtheta2: f64,
}

impl PartitionValues {
    /// `<n> = lambda d log Z / d lambda`.
    pub fn mean_n(&self, gp: &GibbsParams) -> f64 {
        gp.fugacity * self.dz_dlam / self.z
    }

    /// `<z> = theta d log Z / d theta`.
    pub fn mean_z(&self, gp: &GibbsParams) -> f64 {
        gp.tilt * self.dz_dtheta / self.z
    }

    pub fn var_n(&self, gp: &GibbsParams) -> f64 {
        let lam = gp.fugacity;
        let mean = self.mean_n(gp);
        (lam * lam * self.d2z_dlam2 + lam * self.dz_dlam) / self.z - mean * mean
    }

    pub fn var_z(&self, gp: &GibbsParams) -> f64 {
        let tilt = gp.tilt;
        let mean = self.mean_z(gp);
        (tilt * tilt * self.d2z_dtheta2 + tilt * self.dz_dtheta) / self.z - mean * mean
    }

    pub fn cov_nz(&self, gp: &GibbsParams) -> f64 {
        gp.fugacity * gp.tilt * self.d2z_dlamdtheta / self.z - self.mean_n(gp) * self.mean_z(gp)
    }
}

/// Per-parity-class slope sums `(sum g, sum z g, sum z (z-1) g)` with
/// `g(z) = theta^z exp(-beta z^2 / 2)`, truncated with a geometric tail
/// bound below `tol`.
fn slope_sums(theta: f64, beta: f64, tol: f64) -> Result<[[f64; 3]; 2], BrickError> {
    let g = |z: i64| (z as f64 * theta.ln() - beta * (z * z) as f64 / 2.0).exp();
    let mut acc = [[0.0f64; 3]; 2];
    let push = |acc: &mut [[f64; 3]; 2], z: i64| {
        let w = g(z);
        let class = (z.rem_euclid(2)) as usize;
        acc[class][0] += w;
        acc[class][1] += z as f64 * w;
        acc[class][2] += (z * (z - 1)) as f64 * w;
    };
    push(&mut acc, 0);
    // Outward in both directions; once the term ratio drops under 1/2 the
    // remaining tail (with the quadratic weight) is below twice the next
    // term times its weight.
    for dir in [1i64, -1] {
        let mut z = dir;
        loop {
            push(&mut acc, z);
            let next = g(z + dir);
            let ratio = next / g(z);
            let weight = ((z.abs() + 2) * (z.abs() + 3)) as f64;
            if ratio < 0.5 && 2.0 * next * weight < tol {
                break;
            }
            z += dir;
            if z.abs() > 100_000 {
                return Err(BrickError::NonConvergent(format!(
                    "slope sum at theta = {theta}, beta = {beta}"
                )));
            }
        }
    }
    Ok(acc)
}

/// Evaluate `Z_s` and its first/second derivatives by a truncated double sum:
/// the `z`-tail is controlled by the Gaussian decay of `exp(-beta z^2/2)`,
/// the `n`-tail by the Poisson remainder bound.
pub fn partition_function(gp: &GibbsParams, tol: f64) -> Result<PartitionValues, BrickError> {
    assert!(tol > 0.0);
    let slope = slope_sums(gp.tilt, gp.beta, tol * 1e-3)?;
    let lam = gp.fugacity;

    let mut out = PartitionValues {
        z: 0.0,
        dz_dlam: 0.0,
        dz_dtheta: 0.0,
        d2z_dlam2: 0.0,
        d2z_dlamdtheta: 0.0,
        d2z_dtheta2: 0.0,
    };
    let slope_scale = slope[0][0].max(slope[1][0]).max(1.0);
    let mut term = 1.0f64; // lambda^n / n!
    let mut n = 0u64;
    loop {
        let class = ((gp.parity as u64 + n) % 2) as usize;
        let nf = n as f64;
        out.z += term * slope[class][0];
        out.dz_dlam += nf * term / lam * slope[class][0];
        out.dz_dtheta += term * slope[class][1] / gp.tilt;
        out.d2z_dlam2 += nf * (nf - 1.0) * term / (lam * lam) * slope[class][0];
        out.d2z_dlamdtheta += nf * term / lam * slope[class][1] / gp.tilt;
        out.d2z_dtheta2 += term * slope[class][2] / (gp.tilt * gp.tilt);

        // Poisson remainder: sum_(m > n) lambda^m / m! <= next / (1 - lambda/(n+2)).
        let next = term * lam / (n + 1) as f64;
        if lam < (n + 2) as f64 {
            let bound = next / (1.0 - lam / (n + 2) as f64);
            if bound * ((n + 2) * (n + 2)) as f64 * slope_scale < tol {
                break;
            }
        }
        term = next;
        n += 1;
        if n > 100_000 {
            return Err(BrickError::NonConvergent(format!("n-sum at lambda = {lam}")));
        }
    }
    Ok(out)
}

/// Exact single-site probability `mu_(s,lambda,theta)(n, z)`.
pub fn site_probability(gp: &GibbsParams, n: u64, z: i64, tol: f64) -> Result<f64, BrickError> {
    if (n as i64 + z).rem_euclid(2) as u8 != gp.parity {
        return Ok(0.0);
    }
    let pv = partition_function(gp, tol)?;
    let mut log_w = n as f64 * gp.fugacity.ln() + z as f64 * gp.tilt.ln()
        - gp.beta * (z * z) as f64 / 2.0;
    for k in 1..=n {
        log_w -= (k as f64).ln();
    }
    Ok(log_w.exp() / pv.z)
}

/// Exact sampler for the single-site measure: independent
/// Poisson x tilted-discrete-Gaussian proposals with parity rejection.
pub struct GibbsSampler {
    gp: GibbsParams,
    poisson: Poisson<f64>,
    z_lo: i64,
    cdf: Vec<f64>,
}

impl GibbsSampler {
    pub fn new(gp: GibbsParams) -> Result<Self, BrickError> {
        let poisson = Poisson::new(gp.fugacity)
            .map_err(|e| BrickError::InvalidParams(format!("poisson(lambda): {e}")))?;
        // Support of the tilted discrete Gaussian, padded until the tail
        // weight is negligible at f64 resolution.
        let center = gp.tilt.ln() / gp.beta;
        let half_width = (2.0 * 40.0 / gp.beta).sqrt() + 2.0;
        let z_lo = (center - half_width).floor() as i64;
        let z_hi = (center + half_width).ceil() as i64;
        let mut cdf = Vec::with_capacity((z_hi - z_lo + 1) as usize);
        let mut acc = 0.0;
        for z in z_lo..=z_hi {
            acc += (z as f64 * gp.tilt.ln() - gp.beta * (z * z) as f64 / 2.0).exp();
            cdf.push(acc);
        }
        Ok(Self { gp, poisson, z_lo, cdf })
    }

    fn sample_z<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u = rng.random::<f64>() * self.cdf.last().unwrap();
        let idx = self.cdf.partition_point(|&c| c < u);
        self.z_lo + idx.min(self.cdf.len() - 1) as i64
    }

    /// Draw one `(n, z)` site: proposals are exact marginals, the parity
    /// constraint is enforced by rejection (acceptance about one half).
    pub fn sample_site<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, i32) {
        loop {
            let n = self.poisson.sample(rng) as u64;
            let z = self.sample_z(rng);
            if ((n as i64 + z).rem_euclid(2)) as u8 == self.gp.parity {
                return (n as u32, z as i32);
            }
        }
    }
}

/// Draw an i.i.d. ring of `len` sites from `mu_(s,lambda,theta)`.
pub fn sample_gibbs<R: Rng + ?Sized>(
    gp: &GibbsParams,
    len: usize,
    rng: &mut R,
) -> Result<BrickState, BrickError> {
    assert!(len >= 2, "ring needs at least two sites");
    let sampler = GibbsSampler::new(*gp)?;
    let mut n = Vec::with_capacity(len);
    let mut z = Vec::with_capacity(len);
    for _ in 0..len {
        let (nj, zj) = sampler.sample_site(rng);
        n.push(nj);
        z.push(zj);
    }
    Ok(BrickState::new(n, z))
}

/// Draw a locally-equilibrated ring with site-dependent parameters, for
/// slowly varying macroscopic profiles.
pub fn sample_local_gibbs<R: Rng + ?Sized>(
    params: &[GibbsParams],
    rng: &mut R,
) -> Result<BrickState, BrickError> {
    assert!(params.len() >= 2);
    let mut n = Vec::with_capacity(params.len());
    let mut z = Vec::with_capacity(params.len());
    for gp in params {
        let sampler = GibbsSampler::new(*gp)?;
        let (nj, zj) = sampler.sample_site(rng);
        n.push(nj);
        z.push(zj);
    }
    Ok(BrickState::new(n, z))
}

/// Worst relative defect of the two-site stationarity identity
///
/// ```text
/// (n_a + 1) r(z_a + 1) mu(n_a+1, z_a+1) mu(n_b-1, z_b-1)
///     = n_b r(z_b) mu(n_a, z_a) mu(n_b, z_b)
/// ```
///
/// over the truncated range `n <= n_max`, `|z| <= z_max` (unnormalized
/// weights; the partition function cancels). This is the balance behind the
/// stationarity of the product measures for jumps `Theta_(j+)`.
pub fn two_site_balance_residual(gp: &GibbsParams, n_max: u64, z_max: i64) -> f64 {
    let rf = super::RateFunction::exponential(gp.beta);
    let log_fact = |n: u64| -> f64 { (1..=n).map(|k| (k as f64).ln()).sum() };
    let weight = |n: u64, z: i64| -> f64 {
        (n as f64 * gp.fugacity.ln() - log_fact(n) + z as f64 * gp.tilt.ln()
            - gp.beta * (z * z) as f64 / 2.0)
            .exp()
    };
    let mut worst = 0.0f64;
    for na in 0..=n_max {
        for za in -z_max..=z_max {
            if (na as i64 + za).rem_euclid(2) as u8 != gp.parity {
                continue;
            }
            for nb in 1..=n_max {
                for zb in -z_max..=z_max {
                    if (nb as i64 + zb).rem_euclid(2) as u8 != gp.parity {
                        continue;
                    }
                    let lhs = (na + 1) as f64
                        * rf.rate(za + 1)
                        * weight(na + 1, za + 1)
                        * weight(nb - 1, zb - 1);
                    let rhs = nb as f64 * rf.rate(zb) * weight(na, za) * weight(nb, zb);
                    let scale = lhs.abs().max(rhs.abs());
                    if scale > 0.0 {
                        worst = worst.max((lhs - rhs).abs() / scale);
                    }
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn gp() -> GibbsParams {
        GibbsParams::new(0.8, 1.2, 0, 1.0).unwrap()
    }

    /// Brute-force double sum, the independent oracle for the partition
    /// machinery.
    fn brute_z(gp: &GibbsParams, n_max: u64, z_max: i64) -> f64 {
        let mut acc = 0.0;
        let mut term = 1.0f64;
        for n in 0..=n_max {
            if n > 0 {
                term *= gp.fugacity / n as f64;
            }
            for z in -z_max..=z_max {
                if (n as i64 + z).rem_euclid(2) as u8 != gp.parity {
                    continue;
                }
                acc += term
                    * (z as f64 * gp.tilt.ln() - gp.beta * (z * z) as f64 / 2.0).exp();
            }
        }
        acc
    }

    #[test]
    fn matches_brute_force_sum() {
        let gp = gp();
        let pv = partition_function(&gp, 1e-12).unwrap();
        let brute = brute_z(&gp, 60, 40);
        assert!(
            (pv.z - brute).abs() <= 1e-12 * brute,
            "{} vs {brute}",
            pv.z
        );
        // Frozen from the same oracle.
        assert!((pv.z - 2.8429706192984434).abs() < 1e-12);
        assert!((pv.mean_n(&gp) - 0.7961046402088462).abs() < 1e-12);
        assert!((pv.mean_z(&gp) - 0.17738901191236872).abs() < 1e-12);
    }

    #[test]
    fn tilt_inversion_symmetry() {
        let a = partition_function(&GibbsParams::new(0.8, 1.2, 0, 1.0).unwrap(), 1e-13).unwrap();
        let b = partition_function(&GibbsParams::new(0.8, 1.0 / 1.2, 0, 1.0).unwrap(), 1e-13)
            .unwrap();
        assert!((a.z - b.z).abs() <= 1e-12 * a.z);
    }

    #[test]
    fn fugacity_zero_limit_keeps_even_slopes_only() {
        // As lambda -> 0 only n = 0 survives: Z -> sum over even z.
        let gp = GibbsParams::new(1e-12, 1.0, 0, 1.0).unwrap();
        let pv = partition_function(&gp, 1e-13).unwrap();
        let even: f64 = (-20i64..=20)
            .filter(|z| z % 2 == 0)
            .map(|z| (-(z * z) as f64 / 2.0).exp())
            .sum();
        assert!((pv.z - even).abs() < 1e-10);
    }

    #[test]
    fn measure_symmetry_under_tilt_inversion() {
        // mu_(s,lambda,theta)(n, z) = mu_(s,lambda,1/theta)(n, -z), exactly.
        let a = gp();
        let b = GibbsParams::new(0.8, 1.0 / 1.2, 0, 1.0).unwrap();
        for n in 0..6u64 {
            for z in -5i64..=5 {
                let pa = site_probability(&a, n, z, 1e-13).unwrap();
                let pb = site_probability(&b, n, -z, 1e-13).unwrap();
                assert!((pa - pb).abs() <= 1e-12 * pa.max(pb).max(1e-300));
            }
        }
    }

    #[test]
    fn sampler_respects_parity_and_mean() {
        let gp = gp();
        let sampler = GibbsSampler::new(gp).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2024);
        let m = 100_000;
        let mut sum_n = 0.0;
        let mut sum_n2 = 0.0;
        for _ in 0..m {
            let (n, z) = sampler.sample_site(&mut rng);
            assert_eq!((n as i64 + z as i64).rem_euclid(2) as u8, gp.parity);
            sum_n += n as f64;
            sum_n2 += (n as f64) * (n as f64);
        }
        let mean = sum_n / m as f64;
        let var = sum_n2 / m as f64 - mean * mean;
        let se = (var / m as f64).sqrt();
        let pv = partition_function(&gp, 1e-12).unwrap();
        let target = pv.mean_n(&gp);
        assert!(
            (mean - target).abs() < 3.0 * se,
            "mean {mean} vs {target} (se {se})"
        );
    }

    #[test]
    fn balance_identity_on_truncated_range() {
        let worst = two_site_balance_residual(&gp(), 15, 12);
        assert!(worst < 1e-10, "two-site balance residual {worst}");
    }

    #[test]
    fn local_sampler_matches_per_site_params() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let params: Vec<GibbsParams> = (0..64)
            .map(|j| GibbsParams::new(0.5 + 0.01 * j as f64, 1.0, 0, 1.0).unwrap())
            .collect();
        let st = sample_local_gibbs(&params, &mut rng).unwrap();
        assert_eq!(st.len(), 64);
        assert!(st.parity_ok());
    }
}
