//! `bricklayer`: lattice runs, flux estimation and the stationarity check.

use super::CmdError;
use crate::config::{BrickMode, BricklayerScenario, LatticeInit};
use crate::output::{fmt, write_manifest, CsvWriter};
use depolab::bricklayer::{
    estimate_flux_gibbs, sample_gibbs, simulate, BrickState, GibbsParams, GibbsSampler,
    RateFunction,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::HashMap;
use std::path::Path;

fn gibbs_params(s: &BricklayerScenario) -> Result<GibbsParams, CmdError> {
    Ok(GibbsParams::new(s.gibbs.fugacity, s.gibbs.tilt, s.gibbs.parity, s.gibbs.beta)?)
}

fn initial_state(
    s: &BricklayerScenario,
    gp: &GibbsParams,
    rng: &mut ChaCha12Rng,
) -> Result<BrickState, CmdError> {
    match &s.init {
        LatticeInit::Gibbs => Ok(sample_gibbs(gp, s.sites, rng)?),
        LatticeInit::Empty => Ok(BrickState::new(vec![0; s.sites], vec![0; s.sites])),
        LatticeInit::Explicit { n, z } => {
            if n.len() != s.sites || z.len() != s.sites {
                return Err(CmdError::Invalid(format!(
                    "explicit init arrays must have length {}",
                    s.sites
                )));
            }
            Ok(BrickState::new(n.clone(), z.clone()))
        }
    }
}

pub fn run(s: &BricklayerScenario, seed_override: Option<u64>, out_dir: &Path) -> Result<(), CmdError> {
    if s.sites < 2 {
        return Err(CmdError::Invalid(format!("need at least 2 sites, got {}", s.sites)));
    }
    let gp = gibbs_params(s)?;
    let rf = RateFunction::exponential(s.gibbs.beta);
    let seed = seed_override.unwrap_or(s.seed);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    std::fs::create_dir_all(out_dir)?;
    let config_json = serde_json::to_value(s).expect("scenario serializes");

    match &s.mode {
        BrickMode::Simulate { t_end, record_times } => {
            let state = initial_state(s, &gp, &mut rng)?;
            if state.is_empty() {
                return Err(CmdError::Domain(
                    "no mobile particle left: total jump rate is zero".into(),
                ));
            }
            let out = simulate(state, &rf, *t_end, record_times, &mut rng)?;
            let mut csv = CsvWriter::create(&out_dir.join("observables.csv"), "t,site,n,z,h")?;
            for rec in &out.records {
                for j in 0..rec.n.len() {
                    let h = rec.h.as_ref().map(|h| h[j].to_string()).unwrap_or_default();
                    csv.row(&[
                        fmt(rec.time),
                        j.to_string(),
                        rec.n[j].to_string(),
                        rec.z[j].to_string(),
                        h,
                    ])?;
                }
            }
            let path = csv.finish()?;
            let mean_plus: f64 =
                out.flux_integral_plus.iter().sum::<f64>() / (s.sites as f64 * t_end);
            let mean_minus: f64 =
                out.flux_integral_minus.iter().sum::<f64>() / (s.sites as f64 * t_end);
            write_manifest(
                out_dir,
                "bricklayer",
                config_json,
                Some(seed),
                &[&path],
                serde_json::json!({
                    "events": out.events,
                    "time_averaged_flux_plus": mean_plus,
                    "time_averaged_flux_minus": mean_minus,
                }),
            )?;
        }
        BrickMode::Flux { samples } => {
            let est = estimate_flux_gibbs(&gp, &rf, *samples, &mut rng)?;
            let mut csv = CsvWriter::create(
                &out_dir.join("flux.csv"),
                "lambda,theta,beta,flux_plus,flux_plus_se,flux_minus,flux_minus_se",
            )?;
            csv.row(&[
                fmt(gp.fugacity),
                fmt(gp.tilt),
                fmt(gp.beta),
                fmt(est.plus),
                fmt(est.plus_se),
                fmt(est.minus),
                fmt(est.minus_se),
            ])?;
            let path = csv.finish()?;
            println!(
                "flux_plus = {} +- {} (lambda*theta = {})",
                est.plus,
                est.plus_se,
                gp.fugacity * gp.tilt
            );
            write_manifest(
                out_dir,
                "bricklayer",
                config_json,
                Some(seed),
                &[&path],
                serde_json::json!({ "samples": est.samples }),
            )?;
        }
        BrickMode::Stationarity { t_end, replicas } => {
            let mut evolved: HashMap<(u32, i32), f64> = HashMap::new();
            let mut fresh: HashMap<(u32, i32), f64> = HashMap::new();
            let weight = 1.0 / (replicas * s.sites) as f64;
            for _ in 0..*replicas {
                let st = initial_state(s, &gp, &mut rng)?;
                if st.is_empty() {
                    return Err(CmdError::Domain(
                        "no mobile particle left: total jump rate is zero".into(),
                    ));
                }
                let out = simulate(st, &rf, *t_end, &[], &mut rng)?;
                for j in 0..s.sites {
                    *evolved
                        .entry((out.final_state.n[j], out.final_state.z[j]))
                        .or_default() += weight;
                }
            }
            let sampler = GibbsSampler::new(gp)?;
            for _ in 0..replicas * s.sites {
                let site = sampler.sample_site(&mut rng);
                *fresh.entry(site).or_default() += weight;
            }
            let mut keys: Vec<(u32, i32)> =
                evolved.keys().chain(fresh.keys()).cloned().collect();
            keys.sort_unstable();
            keys.dedup();
            let mut tv = 0.0;
            let mut csv = CsvWriter::create(
                &out_dir.join("stationarity.csv"),
                "n,z,p_evolved,p_fresh",
            )?;
            for k in keys {
                let a = evolved.get(&k).copied().unwrap_or(0.0);
                let b = fresh.get(&k).copied().unwrap_or(0.0);
                tv += 0.5 * (a - b).abs();
                csv.row(&[k.0.to_string(), k.1.to_string(), fmt(a), fmt(b)])?;
            }
            let path = csv.finish()?;
            println!("total-variation distance: {tv}");
            write_manifest(
                out_dir,
                "bricklayer",
                config_json,
                Some(seed),
                &[&path],
                serde_json::json!({
                    "tv_distance": tv,
                    "site_samples": replicas * s.sites,
                }),
            )?;
        }
    }
    Ok(())
}
