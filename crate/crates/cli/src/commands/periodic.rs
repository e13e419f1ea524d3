
use clap::Args;
use rayon::prelude::*;
use randattr::chafee::{periodic_cell_with, PeriodicRow};
use randattr::wiener::NoiseSeed;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::commands::bifurcate::seed_list;
use crate::commands::extremal::ladder_options;
use crate::config::{check_aligned, check_positive, Resolved, Seed};
use crate::exit::Failure;
use crate::model;
use crate::output::{CheckRecord, OutDir, Report};

/// Default bound on `|u(tau + T) - u(tau)|` for the extremals.
pub const PERIODIC_TOL: f64 = 5e-3;

#[derive(Debug, Clone, Args, Serialize)]
pub struct Flags {
    /// Values of nu, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    nu_list: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma0: Option<f64>,
    /// Relative amplitude a of gamma(t) = gamma0 (1 + a sin(2 pi t / T)), 0 < a < 1.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_amp: Option<f64>,
    /// Period T.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_period: Option<f64>,
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
    /// Largest accepted T-periodicity defect.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    periodic_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub nu_list: Vec<f64>,
    pub gamma0: f64,
    pub gamma_amp: f64,
    pub gamma_period: f64,
    pub alpha: f64,
    pub seeds: Vec<Seed>,
    pub tau: f64,
    pub modes: usize,
    pub dt: f64,
    pub periodic_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            nu_list: vec![0.5, 1.5],
            gamma0: model::GAMMA0,
            gamma_amp: 0.5,
            gamma_period: model::PERIOD,
            alpha: model::ALPHA,
            seeds: vec![Seed(NoiseSeed::Zero), Seed(NoiseSeed::Seed(7))],
            tau: 0.0,
            modes: model::MODES,
            dt: model::DT,
            periodic_tol: PERIODIC_TOL,
        }
    }
}

fn solutions(row: &PeriodicRow) -> &'static str {
    if row.distinct {
        "three: u*, u_* = -u*, 0"
    } else {
        "one: 0"
    }
}

pub fn run(cfg: &Resolved<Params>, out: &OutDir, report: &mut Report) -> Result<(), Failure> {
    let p = &cfg.params;
    if p.nu_list.is_empty() {
        return Err(Failure::config("`nu_list` is empty"));
    }
    if !(p.gamma_amp > 0.0 && p.gamma_amp < 1.0) {
        return Err(Failure::config(format!("`gamma_amp` must lie in (0, 1), got {}", p.gamma_amp)));
    }
    check_positive("gamma_period", p.gamma_period)?;
    check_positive("periodic_tol", p.periodic_tol)?;
    check_aligned("tau", p.tau, p.dt)?;
    check_aligned("gamma_period", p.gamma_period, p.dt)?;
    let gamma = model::gamma(p.gamma0, p.gamma_amp, p.gamma_period);
    let base = model::chafee(p.nu_list[0], gamma, p.alpha, p.modes, p.dt)?;
    let tol = cfg.common.tol()?;
    let seeds = seed_list(cfg.common.seed, &p.seeds)?;
    let mut cells = Vec::new();
    for &nu in &p.nu_list {
        let c = model::chafee(nu, gamma, p.alpha, p.modes, p.dt)?;
        let opts = ladder_options(&c, tol, None, None)?;
        for &seed in &seeds {
            cells.push((nu, seed, opts.clone()));
        }
    }
    let results: Vec<Result<PeriodicRow, Failure>> = cells
        .par_iter()
        .map(|(nu, seed, opts)| periodic_cell_with(&base, *nu, *seed, p.tau, p.periodic_tol, opts).map_err(Failure::from))
        .collect();

    let mut rows = Vec::new();
    let mut failure: Option<Failure> = None;
    for ((nu, seed, opts), r) in cells.iter().zip(results) {
        let cell = format!("nu={nu},seed={seed}");
        match r {
            Ok(row) => {
                report.checks.push(CheckRecord::at_most(
                    "chafee",
                    &format!("periodicity[{cell}]"),
                    row.deviation_upper.max(row.deviation_lower),
                    p.periodic_tol,
                ));
                report.checks.push(CheckRecord::at_most(
                    "chafee",
                    &format!("odd_pair[{cell}]"),
                    row.symmetry_defect,
                    10.0 * opts.tol,
                ));
                if !row.converged {
                    report.checks.push(CheckRecord::errored("chafee", &format!("converged[{cell}]"), "ladder reached its cap"));
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
        "periodic.csv",
        "per (nu, seed) under T-periodic gamma: a1 and sup-norm of u*(tau, omega); sup distances |u(tau + T) - u(tau)| \
         of the upper and lower extremal complete quasi-solutions (random periodic solutions); |u* + u_*|; \
         separation min(|u*|, |u_*|, |u* - u_*|) and whether u*, u_*, 0 are distinct",
        |w| {
            writeln!(
                w,
                "nu,seed,period,a1,supnorm,deviation_upper,deviation_lower,symmetry_defect,separation,distinct,periodic,converged"
            )?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.nu,
                    r.seed,
                    r.period,
                    r.a1,
                    r.supnorm,
                    r.deviation_upper,
                    r.deviation_lower,
                    r.symmetry_defect,
                    r.separation,
                    r.distinct,
                    r.periodic,
                    r.converged
                )?;
            }
            Ok(())
        },
    )?;

    let solution_report: Vec<_> = rows
        .iter()
        .map(|r| json!({"nu": r.nu, "seed": r.seed, "periodic_solutions": solutions(r), "separation": r.separation}))
        .collect();
    report.summary = json!({
        "gamma": gamma,
        "solutions": solution_report,
        "rows": rows,
    });
    for r in &rows {
        println!(
            "nu = {:<5} seed = {:<5} solutions: {:<26} separation {:.4e}  T-defect {:.2e}",
            r.nu,
            r.seed.to_string(),
            solutions(r),
            r.separation,
            r.deviation_upper.max(r.deviation_lower)
        );
    }
    match failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}
