
use clap::Args;
use rayon::prelude::*;
use randattr::chafee::{bifurcation_cell_with, decreasing_toward_critical, BifurcationRow, Gamma};
use randattr::tolerances;
use randattr::wiener::NoiseSeed;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::commands::extremal::ladder_options;
use crate::config::{check_aligned, Resolved, Seed};
use crate::exit::Failure;
use crate::model;
use crate::output::{CheckRecord, OutDir, Report};

#[derive(Debug, Clone, Args, Serialize)]
pub struct Flags {
    /// Values of nu, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    nu_list: Option<Vec<f64>>,
    /// Level of the cubic coefficient gamma.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma0: Option<f64>,
    /// Period T of gamma(t) = gamma0 (1 + a sin(2 pi t / T)); constant gamma when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_period: Option<f64>,
    /// Relative amplitude a of a periodic gamma (default 0.5 when a period is given).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_amp: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    /// Noise paths, comma separated (`zero` or seeds); `--seed` picks a single one.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    seeds: Option<Vec<Seed>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    modes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    /// Longest pullback time (default 160, or 640 for |nu - 1| <= 0.1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    cap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub nu_list: Vec<f64>,
    pub gamma0: f64,
    pub gamma_period: Option<f64>,
    pub gamma_amp: Option<f64>,
    pub alpha: f64,
    pub seeds: Vec<Seed>,
    pub tau: f64,
    pub modes: usize,
    pub dt: f64,
    pub cap: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            nu_list: vec![0.5, 0.9, 1.05, 1.1, 1.2, 1.4, 1.5, 2.0],
            gamma0: model::GAMMA0,
            gamma_period: None,
            gamma_amp: None,
            alpha: model::ALPHA,
            seeds: vec![Seed(NoiseSeed::Zero), Seed(NoiseSeed::Seed(7))],
            tau: 0.0,
            modes: model::MODES,
            dt: model::DT,
            cap: None,
        }
    }
}

/// Constant gamma unless a period or amplitude is given.
pub fn gamma_of(level: f64, period: Option<f64>, amp: Option<f64>) -> Gamma {
    match (period, amp) {
        (None, None) => Gamma::Constant { level },
        _ => model::gamma(level, amp.unwrap_or(0.5), period.unwrap_or(model::PERIOD)),
    }
}

/// The seed list, or the single `--seed` when given.
pub fn seed_list(cfg_seed: Option<Seed>, seeds: &[Seed]) -> Result<Vec<NoiseSeed>, Failure> {
    let list: Vec<NoiseSeed> = match cfg_seed {
        Some(s) => vec![s.0],
        None => seeds.iter().map(|s| s.0).collect(),
    };
    if list.is_empty() {
        return Err(Failure::config("`seeds` is empty"));
    }
    Ok(list)
}

pub fn run(cfg: &Resolved<Params>, out: &OutDir, report: &mut Report) -> Result<(), Failure> {
    let p = &cfg.params;
    if p.nu_list.is_empty() {
        return Err(Failure::config("`nu_list` is empty"));
    }
    check_aligned("tau", p.tau, p.dt)?;
    let base = model::chafee(p.nu_list[0], gamma_of(p.gamma0, p.gamma_period, p.gamma_amp), p.alpha, p.modes, p.dt)?;
    let tol = cfg.common.tol()?;
    let mut cells = Vec::new();
    for &nu in &p.nu_list {
        let c = model::chafee(nu, base.gamma, p.alpha, p.modes, p.dt)?;
        let opts = ladder_options(&c, tol, None, p.cap)?;
        for &seed in &seed_list(cfg.common.seed, &p.seeds)? {
            cells.push((nu, seed, opts.clone()));
        }
    }

    let results: Vec<Result<BifurcationRow, Failure>> = cells
        .par_iter()
        .map(|(nu, seed, opts)| {
            bifurcation_cell_with(&base, *nu, *seed, p.tau, opts)
                .map(|(row, _)| row)
                .map_err(Failure::from)
        })
        .collect();

    let mut rows = Vec::new();
    let mut failure: Option<Failure> = None;
    for ((nu, seed, opts), r) in cells.iter().zip(results) {
        let cell = format!("nu={nu},seed={seed}");
        match r {
            Ok(row) => {
                report.checks.push(CheckRecord::at_most(
                    "chafee",
                    &format!("monotonicity[{cell}]"),
                    row.monotonicity_max_violation,
                    tolerances::MONOTONICITY,
                ));
                if !row.converged {
                    report.checks.push(
                        CheckRecord::at_most("chafee", &format!("converged[{cell}]"), row.final_delta, opts.tol)
                            .with_note(format!("ladder stopped at cap {}", row.ladder_max)),
                    );
                }
                rows.push(row);
            }
            Err(e) => {
                report.checks.push(CheckRecord::errored("chafee", &format!("cell[{cell}]"), &e.message));
                failure = Some(match failure {
                    Some(f) => f.worst(e),
                    None => e,
                });
            }
        }
    }

    out.write(
        report,
        "bifurcation.csv",
        "per (nu, seed): a1 = (2/pi) int_0^pi u* sin x dx and sup-norm of the upper extremal complete quasi-solution \
         u*_nu(tau, omega) of du = (u_xx + nu u - gamma(t) u^3) dt + alpha u o dW; converged flags the monotone \
         pullback ladder; ladder_max is the last pullback time used",
        |w| {
            writeln!(w, "nu,seed,a1,supnorm,converged,ladder_max")?;
            for r in &rows {
                writeln!(w, "{},{},{},{},{},{}", r.nu, r.seed, r.a1, r.supnorm, r.converged, r.ladder_max)?;
            }
            Ok(())
        },
    )?;
    out.write(
        report,
        "bifurcation_diagnostics.csv",
        "per (nu, seed): last rung-to-rung sup distance of the ladder and its largest ordering violation",
        |w| {
            writeln!(w, "nu,seed,final_delta,monotonicity_max_violation")?;
            for r in &rows {
                writeln!(w, "{},{},{},{}", r.nu, r.seed, r.final_delta, r.monotonicity_max_violation)?;
            }
            Ok(())
        },
    )?;

    let seeds: Vec<NoiseSeed> = seed_list(cfg.common.seed, &p.seeds)?;
    let trend: Vec<_> = seeds
        .iter()
        .map(|&s| json!({"seed": s, "a1_decreasing_as_nu_decreases_to_1": decreasing_toward_critical(&rows, s)}))
        .collect();
    report.summary = json!({
        "gamma": base.gamma,
        "cells": rows.len(),
        "trend_above_critical": trend,
        "trivial_threshold": tolerances::TRIVIAL_AMPLITUDE,
        "rows": rows,
    });
    println!("{:>6} {:>6} {:>12} {:>12} {:>9} {:>6}", "nu", "seed", "a1", "supnorm", "converged", "t_max");
    for r in &rows {
        println!(
            "{:>6} {:>6} {:>12.6} {:>12.6} {:>9} {:>6}",
            r.nu, r.seed.to_string(), r.a1, r.supnorm, r.converged, r.ladder_max
        );
    }
    match failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}
