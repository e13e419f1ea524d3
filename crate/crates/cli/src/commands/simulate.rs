use clap::Args;
use randattr::chafee::mode_split;
use randattr::pde::{solve_u, Forcing, Nonlinearity, ProblemSpec, DEFAULT_GUARD};
use randattr::wiener::NoiseSeed;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{check_aligned, check_positive, Resolved};
use crate::exit::Failure;
use crate::model::{self, ModelFlags};
use crate::output::{OutDir, Report};

#[derive(Debug, Clone, Args, Serialize)]
pub struct Flags {
    /// `chafee` (nu u - gamma u^3) or `heat` (no reaction term).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    params: ModelFlags,
    /// Initial time.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    /// Length of the run.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t_end: Option<f64>,
    /// Initial data: zero, sin, tent, parabola or modeK.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    init: Option<String>,
    /// Amplitude of the initial data.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    amp: Option<f64>,
    /// Keep every k-th step in the trajectory files.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    record_every: Option<usize>,
    /// Abort when the sup-norm of u exceeds this value.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    guard: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub model: String,
    pub nu: f64,
    pub gamma0: f64,
    pub gamma_amp: f64,
    pub gamma_period: f64,
    pub alpha: f64,
    pub modes: usize,
    pub dt: f64,
    pub tau: f64,
    pub t_end: f64,
    pub init: String,
    pub amp: f64,
    pub record_every: usize,
    pub guard: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            model: "chafee".into(),
            nu: model::NU,
            gamma0: model::GAMMA0,
            gamma_amp: 0.0,
            gamma_period: model::PERIOD,
            alpha: model::ALPHA,
            modes: model::MODES,
            dt: model::DT,
            tau: 0.0,
            t_end: 2.0,
            init: "sin".into(),
            amp: 1.0,
            record_every: 100,
            guard: DEFAULT_GUARD,
        }
    }
}

fn problem(p: &Params) -> Result<ProblemSpec, Failure> {
    let spec = match p.model.as_str() {
        "chafee" => model::chafee(p.nu, model::gamma(p.gamma0, p.gamma_amp, p.gamma_period), p.alpha, p.modes, p.dt)?.problem()?,
        "heat" => {
            model::discretization(p.alpha, p.modes, p.dt)?;
            ProblemSpec::new(p.alpha, Nonlinearity::zero(0.5)?, Forcing::zero())
                .with_modes(p.modes)
                .with_dt(p.dt)
        }
        other => return Err(Failure::config(format!("`model` = `{other}`: expected chafee or heat"))),
    };
    let mut spec = spec;
    spec.guard = p.guard;
    spec.validate()?;
    Ok(spec)
}

pub fn run(cfg: &Resolved<Params>, out: &OutDir, report: &mut Report) -> Result<(), Failure> {
    let p = &cfg.params;
    let spec = problem(p)?;
    check_positive("t_end", p.t_end)?;
    check_aligned("tau", p.tau, p.dt)?;
    check_aligned("t_end", p.t_end, p.dt)?;
    if p.record_every == 0 {
        return Err(Failure::config("`record_every` must be positive"));
    }
    let u0 = model::initial_field(&p.init, p.amp, p.modes)?;
    let seed = cfg.common.seed_or(NoiseSeed::Seed(7));

    let margin = 10.0 * p.dt;
    let path = seed.path(p.tau.min(0.0) - margin, (p.tau + p.t_end).max(0.0) + margin, p.dt)?;
    let traj = solve_u(&u0, p.tau, p.tau + p.t_end, &path, &spec, p.record_every)?;
    let last = traj.final_u();

    let equation = match p.model.as_str() {
        "heat" => "du = u_xx dt + alpha u o dW on (0, pi), Dirichlet",
        _ => "du = (u_xx + nu u - gamma(t) u^3) dt + alpha u o dW on (0, pi), Dirichlet",
    };
    out.write(
        report,
        "trajectory.csv",
        &format!("u(t, x) on the oversampled grid, pathwise solution of {equation}, computed as v / z with v = e^(-alpha omega(t)) u"),
        |w| traj.write_long_csv(w),
    )?;
    out.write(report, "coefficients.csv", "sine coefficients a_n(t) of u(t, .) = sum a_n sin(n x)", |w| {
        traj.write_coeff_csv(w)
    })?;
    out.write(report, "final.csv", "u(tau + t_end, x) on the oversampled grid", |w| last.write_grid_csv(w))?;

    report.summary = json!({
        "equation": equation,
        "seed": seed,
        "steps": traj.steps,
        "frames": traj.len(),
        "final_time": p.tau + p.t_end,
        "final_sup_norm": last.sup_norm(),
        "final_a1": mode_split(&last).a1,
        "max_sup_norm": traj.max_sup_u,
        "path": traj.path,
    });
    println!("final sup-norm {:.6e} at t = {}", last.sup_norm(), p.tau + p.t_end);
    Ok(())
}
