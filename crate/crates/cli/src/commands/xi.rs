use std::f64::consts::PI;

use clap::Args;
use randattr::chafee::ChafeeSpec;
use randattr::linear::{xi, XiRequest};
use randattr::pde::SpaceTime;
use randattr::tolerances;
use randattr::wiener::NoiseSeed;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{check_aligned, check_positive, Resolved};
use crate::exit::Failure;
use crate::model;
use crate::output::{OutDir, Report};

/// Past reserved for the automatic horizon.
const DEFAULT_PAST: f64 = 600.0;

#[derive(Debug, Clone, Args, Serialize)]
pub struct Flags {
    /// Dissipativity exponent beta in (0, 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    /// Noise intensity alpha.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    /// Temperedness weight delta in (0, 1 - beta).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    modes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    /// Evaluation time.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    /// Level of the dissipativity coefficient h >= 0.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<f64>,
    /// Spatial shape of h: `constant` or `sine`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    h_shape: Option<String>,
    /// Relative amplitude of the time modulation 1 + a sin(2 pi t / T) of h.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    h_amp: Option<f64>,
    /// Period T of the modulation of h.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    h_period: Option<f64>,
    /// Amplitude of the external forcing g(x) = G sin x.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<f64>,
    /// Truncation horizon S; chosen from the tail bound when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub beta: f64,
    pub alpha: f64,
    pub delta: f64,
    pub modes: usize,
    pub dt: f64,
    pub tau: f64,
    pub h: f64,
    pub h_shape: String,
    pub h_amp: f64,
    pub h_period: f64,
    pub g: f64,
    pub horizon: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            beta: 0.5,
            alpha: model::ALPHA,
            delta: 0.25,
            modes: model::MODES,
            dt: model::DT,
            tau: 0.0,
            h: ChafeeSpec::new(model::NU, model::GAMMA0).h(),
            h_shape: "constant".into(),
            h_amp: 0.0,
            h_period: model::PERIOD,
            g: 0.0,
            horizon: None,
        }
    }
}

/// `phi = h(t, x) + |g(x)|`.
fn forcing(p: &Params) -> Result<SpaceTime, Failure> {
    if !(p.h >= 0.0 && p.h.is_finite()) {
        return Err(Failure::config(format!("`h` must be finite and >= 0, got {}", p.h)));
    }
    if !(0.0..=1.0).contains(&p.h_amp) {
        return Err(Failure::config(format!("`h_amp` must lie in [0, 1], got {}", p.h_amp)));
    }
    check_positive("h_period", p.h_period)?;
    let (level, amp, period) = (p.h, p.h_amp, p.h_period);
    let time = move |t: f64| level * (1.0 + amp * (2.0 * PI * t / period).sin());
    let h = match p.h_shape.as_str() {
        _ if level == 0.0 => SpaceTime::zero(),
        "constant" => SpaceTime::separable(time, |_| 1.0),
        "sine" => SpaceTime::separable(time, f64::sin),
        other => return Err(Failure::config(format!("`h_shape` = `{other}`: expected constant or sine"))),
    };
    let g = p.g.abs();
    let g = if g == 0.0 {
        SpaceTime::zero()
    } else {
        SpaceTime::steady(move |x| g * x.sin())
    };
    Ok(h.plus(&g))
}

pub fn run(cfg: &Resolved<Params>, out: &OutDir, report: &mut Report) -> Result<(), Failure> {
    let p = &cfg.params;
    model::discretization(p.alpha, p.modes, p.dt)?;
    check_aligned("tau", p.tau, p.dt)?;
    if let Some(s) = p.horizon {
        check_aligned("horizon", s, p.dt)?;
    }
    let phi = forcing(p)?;
    let seed = cfg.common.seed_or(NoiseSeed::Seed(7));
    let past = p.horizon.unwrap_or(DEFAULT_PAST) + 10.0 * p.dt;
    let path = seed.path(-past, 1.0, p.dt)?;

    let req = XiRequest {
        tau: p.tau,
        path: path.view(),
        phi,
        beta: p.beta,
        alpha: p.alpha,
        delta: p.delta,
        n_modes: p.modes,
        dq: p.dt,
        horizon: p.horizon,
        tol: cfg.common.tol()?.unwrap_or(tolerances::QUADRATURE),
        m_used: None,
    };
    let v = xi(&req)?;

    out.write(
        report,
        "xi.csv",
        "xi(tau, omega)(x): the complete quasi-solution of the linear comparison problem \
         dv = (v_xx + beta v + h + |g|) dt + alpha v o dW, given by the pullback integral of the \
         heat semigroup e^{(beta - lambda) s} applied to z(s) (h + |g|)(tau + s), truncated at s = -S",
        |w| {
            writeln!(w, "x,xi")?;
            let g = v.field.oversampled();
            for (x, val) in g.nodes().zip(&g.values) {
                writeln!(w, "{x},{val}")?;
            }
            Ok(())
        },
    )?;
    out.write(report, "xi_coeffs.csv", "sine coefficients of xi(tau, omega)", |w| v.field.write_coeff_csv(w))?;

    report.summary = json!({
        "seed": seed,
        "tau": v.tau,
        "horizon": v.horizon,
        "tail_bound": v.tail_bound,
        "semigroup_constant": v.m_used,
        "sup_norm": v.field.sup_norm(),
        "min_value": v.min_value,
        "path": v.path,
    });
    println!("xi: sup-norm {:.6e}, horizon S = {}, tail bound {:.3e}", v.field.sup_norm(), v.horizon, v.tail_bound);
    Ok(())
}
