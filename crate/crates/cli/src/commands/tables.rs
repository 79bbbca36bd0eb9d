//! `hydro-table` and `entropy-scan`: parameter sweeps emitted as CSV.

use super::CmdError;
use crate::config::{EntropyScanScenario, HydroTableScenario, PairConfig, TableGrid};
use crate::output::{fmt, write_manifest, CsvWriter};
use depolab::characteristics::PhysState;
use depolab::entropy::{canonical_pair, similarity_to_pair, solve_similarity_ode, EntropyPair};
use depolab::hydroflux::{flux_from_fug, MacroState, ThermoTable};
use std::path::Path;

pub fn hydro_table(s: &HydroTableScenario, out_dir: &Path) -> Result<(), CmdError> {
    let table = ThermoTable::new(s.parity, s.beta);
    if s.parity > 1 {
        return Err(CmdError::Invalid(format!("parity {} must be 0 or 1", s.parity)));
    }
    if !(s.beta > 0.0) {
        return Err(CmdError::Invalid(format!("beta {} must be > 0", s.beta)));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut csv = CsvWriter::create(&out_dir.join("hydro_table.csv"), "lambda,theta,rho,u,J_rho,J_u")?;
    let mut rows = 0usize;
    match &s.grid {
        TableGrid::Fugacity { fugacity, tilt } => {
            for lam in fugacity.values().map_err(CmdError::Invalid)? {
                for th in tilt.values().map_err(CmdError::Invalid)? {
                    if !(lam > 0.0) || !(th > 0.0) {
                        return Err(CmdError::Invalid(
                            "fugacity and tilt ranges must stay positive".into(),
                        ));
                    }
                    let ms = table.macro_from_fug(lam, th)?;
                    let (j_rho, j_u) = flux_from_fug(lam, th);
                    csv.row(&[fmt(lam), fmt(th), fmt(ms.rho), fmt(ms.u), fmt(j_rho), fmt(j_u)])?;
                    rows += 1;
                }
            }
        }
        TableGrid::Macro { rho, u } => {
            for r in rho.values().map_err(CmdError::Invalid)? {
                for v in u.values().map_err(CmdError::Invalid)? {
                    let (lam, th) = table.fug_from_macro(MacroState::new(r, v), 1e-12)?;
                    let (j_rho, j_u) = flux_from_fug(lam, th);
                    csv.row(&[fmt(lam), fmt(th), fmt(r), fmt(v), fmt(j_rho), fmt(j_u)])?;
                    rows += 1;
                }
            }
        }
    }
    let path = csv.finish()?;
    write_manifest(
        out_dir,
        "hydro-table",
        serde_json::to_value(s).expect("scenario serializes"),
        None,
        &[&path],
        serde_json::json!({ "rows": rows }),
    )?;
    Ok(())
}

fn build_pair(cfg: &PairConfig) -> Result<(EntropyPair, Option<Vec<[f64; 4]>>), CmdError> {
    match cfg {
        PairConfig::Canonical => Ok((canonical_pair(), None)),
        PairConfig::Similarity { alpha, phi0, dphi0, y_min, y_max, step } => {
            let se = solve_similarity_ode(*alpha, *phi0, *dphi0, *y_min, *y_max, *step)?;
            let mut profile = Vec::new();
            for (y_mid, resid) in se.ode_residual_samples() {
                let (phi, dphi, _) = se.eval(y_mid)?;
                profile.push([y_mid, phi, dphi, resid]);
            }
            Ok((similarity_to_pair(&se)?, Some(profile)))
        }
    }
}

pub fn entropy_scan(s: &EntropyScanScenario, out_dir: &Path) -> Result<(), CmdError> {
    let (pair, profile) = build_pair(&s.pair)?;
    std::fs::create_dir_all(out_dir)?;
    let mut outputs = Vec::new();

    if let Some(profile) = profile {
        let mut csv =
            CsvWriter::create(&out_dir.join("similarity.csv"), "y,phi,phi_prime,ode_residual")?;
        for row in profile {
            csv.row(&[fmt(row[0]), fmt(row[1]), fmt(row[2]), fmt(row[3])])?;
        }
        outputs.push(csv.finish()?);
    }

    let mut csv = CsvWriter::create(&out_dir.join("pair_scan.csv"), "rho,u,S,F,eq_residual")?;
    let mut rows = 0usize;
    for rho in s.rho.values().map_err(CmdError::Invalid)? {
        for u in s.u.values().map_err(CmdError::Invalid)? {
            let p = PhysState::new(rho, u);
            if !pair.validity.contains(p) {
                continue;
            }
            let res = pair.first_order_residual(p)?;
            csv.row(&[
                fmt(rho),
                fmt(u),
                fmt(pair.s(p)?),
                fmt(pair.f(p)?),
                fmt(res[0].abs().max(res[1].abs())),
            ])?;
            rows += 1;
        }
    }
    outputs.push(csv.finish()?);

    let out_refs: Vec<&Path> = outputs.iter().map(|p| p.as_path()).collect();
    write_manifest(
        out_dir,
        "entropy-scan",
        serde_json::to_value(s).expect("scenario serializes"),
        None,
        &out_refs,
        serde_json::json!({ "rows": rows, "convex": pair.convex }),
    )?;
    Ok(())
}
