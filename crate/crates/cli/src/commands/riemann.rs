//! `riemann`: complete a jump from (left, sigma) or (left, right), classify
//! it, and optionally confirm the speed with a numerical run.

use super::CmdError;
use crate::output;
use depolab::characteristics::PhysState;
use depolab::grid::{Boundary, Field1D, GridSpec};
use depolab::shocks::{
    classify_discontinuity, rh_residual, right_state_from_speed, shock_speeds, ShockClass,
};
use depolab::solvers::{evolve, measure_shock_speed, EvolveConfig, Method};
use std::path::Path;

pub struct RiemannArgs {
    pub left: PhysState,
    pub right: Option<PhysState>,
    pub sigma: Option<f64>,
    pub run: bool,
    pub cells: usize,
    pub t_end: f64,
}

pub fn parse_state(s: &str) -> Result<PhysState, CmdError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CmdError::Invalid(format!("state '{s}' must be 'rho,u'")));
    }
    let rho = parts[0].trim().parse::<f64>().map_err(|e| CmdError::Invalid(e.to_string()))?;
    let u = parts[1].trim().parse::<f64>().map_err(|e| CmdError::Invalid(e.to_string()))?;
    Ok(PhysState::new(rho, u))
}

fn class_name(c: ShockClass) -> &'static str {
    match c {
        ShockClass::BackShock => "BackShock",
        ShockClass::FrontShock => "FrontShock",
        ShockClass::Unstable => "Unstable",
    }
}

pub fn run(args: &RiemannArgs, out_dir: Option<&Path>) -> Result<(), CmdError> {
    let left = args.left;
    let (right, sigma) = match (args.right, args.sigma) {
        (Some(right), None) => {
            let (sp, sm) = shock_speeds(left, right)?;
            // Pick the candidate actually satisfying both jump conditions.
            let residual_norm = |s: f64| {
                rh_residual(left, right, s)
                    .map(|(a, b)| a.abs() + b.abs())
                    .unwrap_or(f64::INFINITY)
            };
            let sigma = if residual_norm(sp) <= residual_norm(sm) { sp } else { sm };
            (right, sigma)
        }
        (None, Some(sigma)) => (right_state_from_speed(left, sigma)?, sigma),
        _ => {
            return Err(CmdError::Invalid(
                "provide exactly one of --right or --sigma".into(),
            ))
        }
    };
    let (sp, sm) = shock_speeds(left, right)?;
    let class = classify_discontinuity(left, right, sigma)?;

    println!("left: rho={} u={}", left.rho, left.u);
    println!("right: rho={} u={}", right.rho, right.u);
    println!("sigma: {sigma}");
    println!("sigma candidates: {sp}, {sm}");
    println!("classification: {}", class_name(class));

    let mut measured = None;
    if args.run {
        let span = 2.0 * (sigma.abs() * args.t_end).max(0.25);
        let grid = GridSpec::new(
            -span / 2.0,
            span / args.cells as f64,
            args.cells,
            Boundary::Outflow,
        )
        .map_err(|e| CmdError::Invalid(e.to_string()))?;
        let f0 = Field1D::from_fn(grid, |x| {
            if x < 0.0 {
                (left.rho, left.u)
            } else {
                (right.rho, right.u)
            }
        });
        let stride = (args.cells / 40).max(1);
        let traj = evolve(&f0, &EvolveConfig::new(Method::Hll, args.t_end).with_stride(stride))?;
        let speed = measure_shock_speed(&traj)?;
        println!("measured speed: {speed} ({} cells, t = {})", args.cells, args.t_end);
        measured = Some(speed);
    }

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let report = serde_json::json!({
            "left": { "rho": left.rho, "u": left.u },
            "right": { "rho": right.rho, "u": right.u },
            "sigma": sigma,
            "sigma_candidates": [sp, sm],
            "classification": class_name(class),
            "measured_speed": measured,
        });
        let path = dir.join("report.json");
        std::fs::write(&path, serde_json::to_string_pretty(&report).unwrap())?;
        let _ = output::write_manifest(
            dir,
            "riemann",
            serde_json::json!({
                "left": [left.rho, left.u],
                "right": [right.rho, right.u],
                "sigma": sigma,
                "run": args.run,
                "cells": args.cells,
                "t_end": args.t_end,
            }),
            None,
            &[&path],
            serde_json::json!({ "classification": class_name(class) }),
        )?;
    }
    Ok(())
}
