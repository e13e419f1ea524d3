
use clap::Args;
use randattr::chafee::{mode_split, ChafeeSpec};
use randattr::pullback::{extremal, LadderOptions, Sign};
use randattr::wiener::NoiseSeed;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{check_aligned, check_positive, Resolved};
use crate::exit::Failure;
use crate::model::{self, ModelFlags};
use crate::output::{OutDir, Report};

#[derive(Debug, Clone, Args, Serialize)]
pub struct Flags {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelFlags,
    /// Evaluation time.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    /// `+` for the upper extremal u*, `-` for the lower u_*.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    sign: Option<String>,
    /// Initial pullback times, comma separated; doubled up to the cap.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    ladder: Option<Vec<f64>>,
    /// Longest pullback time.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    cap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub nu: f64,
    pub gamma0: f64,
    pub gamma_amp: f64,
    pub gamma_period: f64,
    pub alpha: f64,
    pub modes: usize,
    pub dt: f64,
    pub tau: f64,
    pub sign: String,
    pub ladder: Option<Vec<f64>>,
    pub cap: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            nu: model::NU,
            gamma0: model::GAMMA0,
            gamma_amp: 0.0,
            gamma_period: model::PERIOD,
            alpha: model::ALPHA,
            modes: model::MODES,
            dt: model::DT,
            tau: 0.0,
            sign: "+".into(),
            ladder: None,
            cap: None,
        }
    }
}

/// The Chafee-Infante default ladder with the overrides applied.
pub fn ladder_options(c: &ChafeeSpec, tol: Option<f64>, ladder: Option<&[f64]>, cap: Option<f64>) -> Result<LadderOptions, Failure> {
    let mut opts = c.ladder_options();
    if let Some(t) = tol {
        opts = opts.with_tol(t);
    }
    if let Some(l) = ladder {
        for &t in l {
            check_aligned("ladder", t, c.dt)?;
        }
        opts = opts.with_ladder(l.to_vec());
    }
    if let Some(cap) = cap {
        check_positive("cap", cap)?;
        opts = opts.with_cap(cap);
    }
    if opts.rungs().is_empty() {
        return Err(Failure::config("the ladder has no rung below the cap"));
    }
    Ok(opts)
}

pub fn run(cfg: &Resolved<Params>, out: &OutDir, report: &mut Report) -> Result<(), Failure> {
    let p = &cfg.params;
    let c = model::chafee(p.nu, model::gamma(p.gamma0, p.gamma_amp, p.gamma_period), p.alpha, p.modes, p.dt)?;
    check_aligned("tau", p.tau, p.dt)?;
    let sign = Sign::parse(&p.sign)?;
    let opts = ladder_options(&c, cfg.common.tol()?, p.ladder.as_deref(), p.cap)?;
    let seed = cfg.common.seed_or(NoiseSeed::Seed(7));
    let path = c.path(seed, opts.cap - p.tau.min(0.0), p.tau.max(0.0) + 1.0)?;
    let r = extremal(sign, p.tau, &path.view(), &c.problem()?, &opts)?;

    let (file, column) = match sign {
        Sign::Upper => ("u_star.csv", "u_star"),
        Sign::Lower => ("u_lower.csv", "u_lower"),
    };
    out.write(
        report,
        file,
        &format!(
            "{column}(tau, omega)(x): extremal complete quasi-solution of du = (u_xx + nu u - gamma(t) u^3) dt + alpha u o dW, \
             the limit of the monotone pullback ladder Phi(t, tau - t, theta_(-t) omega, {}xi(tau - t, theta_(-t) omega)) as t grows",
            sign.symbol()
        ),
        |w| {
            writeln!(w, "x,{column}")?;
            let g = r.field.oversampled();
            for (x, v) in g.nodes().zip(&g.values) {
                writeln!(w, "{x},{v}")?;
            }
            Ok(())
        },
    )?;
    out.write(report, "ladder.csv", "sup-norm distance between successive ladder rungs, indexed by the later pullback time", |w| {
        writeln!(w, "t,delta")?;
        for (t, d) in r.ladder.iter().skip(1).zip(&r.rung_deltas) {
            writeln!(w, "{t},{d}")?;
        }
        Ok(())
    })?;

    let a1 = mode_split(&r.field).a1;
    report.summary = json!({
        "seed": seed,
        "sign": sign,
        "a1": a1,
        "sup_norm": r.field.sup_norm(),
        "converged": r.converged,
        "ladder": r.ladder,
        "rung_deltas": r.rung_deltas,
        "tol": opts.tol,
        "cap": opts.cap,
        "monotonicity_max_violation": r.monotonicity_max_violation,
        "xi_bound_excess": r.xi_bound_excess,
        "path": r.path,
    });
    println!(
        "{column}: a1 = {a1:.6}, sup-norm = {:.6}, converged = {} (last delta {:.2e} at t = {})",
        r.field.sup_norm(),
        r.converged,
        r.final_delta(),
        r.ladder.last().copied().unwrap_or(0.0)
    );
    if !r.converged {
        return Err(Failure::check(format!(
            "ladder did not converge: last delta {:.3e} >= tol {:.1e} at cap {}",
            r.final_delta(),
            opts.tol,
            opts.cap
        )));
    }
    Ok(())
}
