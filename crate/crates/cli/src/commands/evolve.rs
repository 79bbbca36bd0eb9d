//! `evolve`: run a scenario and emit snapshot + diagnostic CSVs.

use super::CmdError;
use crate::config::{EvolveScenario, MethodConfig};
use crate::output::{fmt, write_manifest, CsvWriter};
use depolab::characteristics::{riemann_w, riemann_z};
use depolab::solvers::{evolve, measure_shock_speed, EvolveConfig, Method};
use std::path::Path;

pub fn run(scenario: &EvolveScenario, out_dir: &Path) -> Result<(), CmdError> {
    let grid = scenario.grid.build().map_err(CmdError::Invalid)?;
    let f0 = scenario.initial.build(grid).map_err(CmdError::Invalid)?;
    let method = match scenario.method {
        MethodConfig::LaxFriedrichs => Method::LaxFriedrichs,
        MethodConfig::Hll => Method::Hll,
        MethodConfig::Viscous { eps } => {
            if !(eps >= 0.0) {
                return Err(CmdError::Invalid(format!("viscosity {eps} must be >= 0")));
            }
            Method::Viscous { eps }
        }
    };
    if !(scenario.t_end >= f0.time) {
        return Err(CmdError::Invalid(format!("t_end = {} precedes start", scenario.t_end)));
    }
    if !(scenario.cfl > 0.0 && scenario.cfl <= depolab::solvers::CFL_DEFAULT) {
        return Err(CmdError::Invalid(format!(
            "cfl = {} outside (0, {}]",
            scenario.cfl,
            depolab::solvers::CFL_DEFAULT
        )));
    }

    let cfg = EvolveConfig::new(method, scenario.t_end)
        .with_cfl(scenario.cfl)
        .with_stride(scenario.snapshot_stride);
    let traj = evolve(&f0, &cfg)?;

    std::fs::create_dir_all(out_dir)?;
    let mut snap = CsvWriter::create(&out_dir.join("snapshots.csv"), "t,x,rho,u,w,z")?;
    for f in &traj.snapshots {
        for i in 0..f.n_cells() {
            let p = f.state(i);
            let w = riemann_w(p).map(fmt).unwrap_or_else(|_| "nan".into());
            let z = riemann_z(p).map(fmt).unwrap_or_else(|_| "nan".into());
            snap.row(&[
                fmt(f.time),
                fmt(f.grid.cell_center(i)),
                fmt(p.rho),
                fmt(p.u),
                w,
                z,
            ])?;
        }
    }
    let snap_path = snap.finish()?;

    let mut diag = CsvWriter::create(
        &out_dir.join("diagnostics.csv"),
        "t,sup_w,sup_z,mass,total_u,entropy_integral",
    )?;
    for d in &traj.diagnostics {
        diag.row(&[
            fmt(d.time),
            fmt(d.sup_w),
            fmt(d.sup_z),
            fmt(d.mass),
            fmt(d.total_u),
            fmt(d.entropy_integral),
        ])?;
    }
    let diag_path = diag.finish()?;

    let mut results = serde_json::json!({
        "snapshots": traj.snapshots.len(),
        "final_time": traj.last().time,
    });
    if scenario.measure_shock {
        let speed = measure_shock_speed(&traj)?;
        println!("measured shock speed: {speed}");
        results["measured_shock_speed"] = serde_json::json!(speed);
    }

    write_manifest(
        out_dir,
        "evolve",
        serde_json::to_value(scenario).expect("scenario serializes"),
        None,
        &[&snap_path, &diag_path],
        results,
    )?;
    Ok(())
}
