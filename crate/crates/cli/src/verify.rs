//! The bundled verification suite: invariants and oracle checks of every
//! module at desk scale.
//!
//! Checks run in parallel and are reported in a fixed order, so `verify.csv`
//! is byte-identical across runs with the same configuration. With the zero
//! path (`--seed zero`) the oracle checks switch to tighter thresholds.

use std::f64::consts::PI;

use clap::Args;
use randattr::chafee::{
    a1_projection, a1_pullback_vanishes, galerkin_amplitude, mode_split, odd_symmetry_check, periodic_cell_with,
    riccati_check, steady_state, u2_decay_check, ChafeeSpec, Gamma,
};
use randattr::linear::{temperedness_probe, verify_decay, verify_quasi_solution, xi, DecayStart, XiRequest};
use randattr::pde::{
    comparison_check, conjugation_defect, cocycle_defect, positivity_check, smoothing_check, solve_u, Forcing, Nonlinearity,
    ProblemSpec, SpaceTime,
};
use randattr::pullback::{
    absorbing_radius, absorption_check, attractor_interval, calibrate_m, extremal, quasi_solution_residual, stability,
    unit_ball_samples, LadderOptions, Sign,
};
use randattr::spatial::SineTransform;
use randattr::tolerances as tol;
use randattr::wiener::{refine, sublinearity_report, NoiseSeed, WienerPath};
use randattr::{Field, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{check_aligned, Resolved};
use crate::exit::Failure;
use crate::model;
use crate::output::{print_checks, write_checks_csv, CheckRecord, OutDir, Report};

#[derive(Debug, Clone, Args, Serialize)]
pub struct Flags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    modes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub modes: usize,
    pub dt: f64,
    pub alpha: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            modes: 32,
            dt: model::DT,
            alpha: model::ALPHA,
        }
    }
}

/// Everything a check needs.
#[derive(Debug, Clone)]
pub struct Ctx {
    pub seed: NoiseSeed,
    pub modes: usize,
    pub dt: f64,
    pub alpha: f64,
    /// Ladder tolerance for extremal limits.
    pub tol: f64,
}

impl Ctx {
    fn zero(&self) -> bool {
        self.seed == NoiseSeed::Zero
    }

    /// `noisy` threshold, or `exact` on the zero path.
    fn thr(&self, noisy: f64, exact: f64) -> f64 {
        if self.zero() {
            exact
        } else {
            noisy
        }
    }

    fn chafee(&self, nu: f64) -> ChafeeSpec {
        ChafeeSpec::new(nu, 1.0)
            .with_alpha(self.alpha)
            .with_modes(self.modes)
            .with_dt(self.dt)
    }

    fn path(&self, c: &ChafeeSpec, cap: f64, future: f64) -> Result<WienerPath> {
        c.path(self.seed, cap, future)
    }

    fn ladder(&self) -> LadderOptions {
        LadderOptions::default().with_tol(self.tol)
    }

    fn zero_path(&self, past: f64, future: f64) -> Result<WienerPath> {
        WienerPath::zero(-past, future, self.dt)
    }
}

type CheckFn = fn(&Ctx) -> Result<Vec<CheckRecord>>;

/// `(module, group, check)`; a group may report several records.
pub const SUITE: &[(&str, &str, CheckFn)] = &[
    ("wiener", "determinism", wiener_determinism),
    ("wiener", "shift_group", wiener_shift_group),
    ("wiener", "sublinearity", wiener_sublinearity),
    ("wiener", "bridge_refinement", wiener_refinement),
    ("spatial", "transform", spatial_transform),
    ("spatial", "semigroup", spatial_semigroup),
    ("pde", "conjugation", pde_conjugation),
    ("pde", "cocycle", pde_cocycle),
    ("pde", "comparison", pde_comparison),
    ("pde", "positivity", pde_positivity),
    ("pde", "smoothing", pde_smoothing),
    ("pde", "heat_oracle", pde_heat_oracle),
    ("pde", "nonlinearity", pde_nonlinearity),
    ("linear", "steady_oracle", linear_steady_oracle),
    ("linear", "quasi_solution", linear_quasi_solution),
    ("linear", "linearity", linear_linearity),
    ("linear", "periodic_forcing", linear_periodic),
    ("linear", "decay_rate", linear_decay_rate),
    ("linear", "temperedness", linear_temperedness),
    ("pullback", "semigroup_constant", pullback_semigroup_constant),
    ("pullback", "radius_closed_form", pullback_radius_closed_form),
    ("pullback", "absorption", pullback_absorption),
    ("pullback", "attractor_interval", pullback_interval),
    ("pullback", "quasi_solution", pullback_quasi_solution),
    ("pullback", "stability", pullback_stability),
    ("chafee", "nonlinearity", chafee_nonlinearity),
    ("chafee", "mode_split", chafee_mode_split),
    ("chafee", "riccati", chafee_riccati),
    ("chafee", "a1_pullback", chafee_a1_pullback),
    ("chafee", "u2_decay", chafee_u2_decay),
    ("chafee", "odd_symmetry", chafee_odd_symmetry),
    ("chafee", "pitchfork", chafee_pitchfork),
    ("chafee", "periodic", chafee_periodic),
];

/// Runs the whole suite; errors inside a group become failed records.
pub fn run_suite(ctx: &Ctx) -> Vec<CheckRecord> {
    let groups: Vec<Vec<CheckRecord>> = SUITE
        .par_iter()
        .map(|(module, group, f)| match f(ctx) {
            Ok(records) => records,
            Err(e) => vec![CheckRecord::errored(module, group, &e.to_string())],
        })
        .collect();
    groups.into_iter().flatten().collect()
}

pub fn run(cfg: &Resolved<Params>, out: &OutDir, report: &mut Report) -> Result<(), Failure> {
    let p = &cfg.params;
    model::discretization(p.alpha, p.modes, p.dt)?;
    check_aligned("1", 1.0, p.dt)?;
    let ctx = Ctx {
        seed: cfg.common.seed_or(NoiseSeed::Seed(7)),
        modes: p.modes,
        dt: p.dt,
        alpha: p.alpha,
        tol: cfg.common.tol()?.unwrap_or(tol::EXTREMAL),
    };
    let checks = run_suite(&ctx);
    report.checks = checks.clone();
    out.write(
        report,
        "verify.csv",
        "one row per invariant or oracle check: the measured quantity, the relation and threshold it must satisfy, and the verdict",
        |w| write_checks_csv(w, &checks),
    )?;
    print_checks(&report.checks);
    let failed = report.failed_checks().len();
    report.summary = json!({
        "seed": ctx.seed,
        "mode": if ctx.zero() { "zero path (tight oracle thresholds)" } else { "sampled path" },
        "checks": report.checks.len(),
        "failed": failed,
    });
    println!("{} checks, {} failed", report.checks.len(), failed);
    Ok(())
}

// ---------------------------------------------------------------- wiener

fn wiener_determinism(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let a = ctx.seed.path(-50.0, 50.0, ctx.dt)?;
    let b = ctx.seed.path(-50.0, 50.0, ctx.dt)?;
    let diff = a.values().iter().zip(b.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let origin = a.interpolate(0.0)?.abs();
    Ok(vec![
        CheckRecord::at_most("wiener", "same_seed_same_path", diff, 0.0),
        CheckRecord::at_most("wiener", "omega_at_origin", origin, 0.0),
    ])
}

fn wiener_shift_group(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let p = ctx.seed.path(-50.0, 50.0, ctx.dt)?;
    let (a, b) = (3.0, -1.5);
    let two = p.shift(a)?.shift(b)?;
    let one = p.shift(a + b)?;
    let mut worst = 0.0f64;
    let mut anchor = 0.0f64;
    for k in -20..=20 {
        let t = k as f64 * 0.5;
        use randattr::NoisePath;
        worst = worst.max((two.omega(t)? - one.omega(t)?).abs());
        anchor = anchor.max(one.omega(0.0)?.abs());
    }
    Ok(vec![
        CheckRecord::at_most("wiener", "shift_composition", worst, 1e-12),
        CheckRecord::at_most("wiener", "shifted_path_vanishes_at_origin", anchor, 0.0),
    ])
}

fn wiener_sublinearity(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let p = ctx.seed.path(-1000.0, 1000.0, ctx.dt)?;
    let r = sublinearity_report(&p);
    Ok(vec![CheckRecord::at_most("wiener", "sublinear_growth", r.max_ratio, 0.5)
        .with_note(format!("max |omega(t)/t| over |t| >= {}", r.t_half))])
}

fn wiener_refinement(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let p = ctx.seed.path(-10.0, 10.0, ctx.dt)?;
    let r = refine(&p, 2)?;
    let mut worst = 0.0f64;
    for k in 0..p.len() {
        worst = worst.max((r.values()[2 * k] - p.values()[k]).abs());
    }
    let again = refine(&p, 2)?;
    let repro = r.values().iter().zip(again.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Ok(vec![
        CheckRecord::at_most("wiener", "refinement_keeps_nodes", worst, 0.0),
        CheckRecord::at_most("wiener", "refinement_reproducible", repro, 0.0),
    ])
}

// ---------------------------------------------------------------- spatial

fn spatial_transform(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let n = ctx.modes;
    let f = unit_ball_samples(n, 3, 11).pop().expect("three samples");
    let back = Field::from_grid(&f.oversampled(), n)?;
    let roundtrip = f.sup_distance(&back)?;
    let tr = SineTransform::get(n, randattr::spatial::oversampled_points(n))?;
    let mut grid = vec![0.0; tr.n_points()];
    tr.synthesize(Field::mode(n, 1, 1.0).coeffs(), &mut grid);
    let node = grid
        .iter()
        .zip(tr.nodes())
        .fold(0.0f64, |m, (v, x)| m.max((v - x.sin()).abs()));
    let sup = (Field::mode(n, 1, 1.0).sup_norm() - 1.0).abs();
    Ok(vec![
        CheckRecord::at_most("spatial", "transform_roundtrip", roundtrip, 1e-12),
        CheckRecord::at_most("spatial", "synthesis_of_sine", node, 1e-14),
        CheckRecord::at_most("spatial", "sup_norm_of_sine", sup, 1e-12),
    ])
}

fn spatial_semigroup(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let n = ctx.modes;
    let f = Field::from_fn(n, |x| x.sin() + 0.5 * (3.0 * x).sin());
    let t = 2.0;
    let got = f.apply_semigroup(t, 0.0)?;
    let want = Field::from_fn(n, |x| (-t).exp() * x.sin() + 0.5 * (-9.0 * t).exp() * (3.0 * x).sin());
    let samples = unit_ball_samples(n, 6, 5);
    let mut growth = 0.0f64;
    for s in &samples {
        growth = growth.max(s.apply_semigroup(0.5, 0.0)?.l2_norm() / s.l2_norm());
    }
    Ok(vec![
        CheckRecord::at_most("spatial", "heat_semigroup_oracle", got.sup_distance(&want)?, 1e-14),
        CheckRecord::at_most("spatial", "semigroup_l2_contraction", growth, (-0.5f64).exp() + 1e-14),
    ])
}

// ---------------------------------------------------------------- pde

fn pde_conjugation(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.5);
    let spec = c.problem()?;
    let path = ctx.path(&c, 20.0, 20.0)?;
    let mut worst = 0.0f64;
    let cases = [(2.0, 0.0, 1.0), (5.0, 3.0, 0.5), (1.0, -2.0, 2.0)];
    for (i, &(t, tau, amp)) in cases.iter().enumerate() {
        let u0 = unit_ball_samples(ctx.modes, 3 + i, 21)[2 + i].scaled(amp);
        worst = worst.max(conjugation_defect(t, tau, &path, &u0, &spec)?.relative);
    }
    Ok(vec![CheckRecord::at_most("pde", "conjugation_identity", worst, tol::EXACT_RELATIVE)])
}

fn pde_cocycle(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.5);
    let spec = c.problem()?;
    let path = ctx.path(&c, 20.0, 20.0)?;
    let mut worst = 0.0f64;
    for &(t, s, tau) in &[(1.0, 2.0, 0.0), (2.5, 0.5, -3.0)] {
        let u0 = Field::from_fn(ctx.modes, |x| 1.5 * (x * (PI - x)).sqrt());
        worst = worst.max(cocycle_defect(t, s, tau, &path, &u0, &spec)?.relative);
    }
    Ok(vec![CheckRecord::at_most("pde", "cocycle_property", worst, ctx.thr(tol::COCYCLE_RELATIVE, tol::EXACT_RELATIVE))])
}

fn pde_comparison(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.5);
    let spec = c.problem()?;
    let path = ctx.path(&c, 10.0, 10.0)?;
    let lo = Field::from_fn(ctx.modes, |x| -0.8 * x.sin() + 0.3 * (2.0 * x).sin().powi(2) * x.sin());
    let hi = Field::from_fn(ctx.modes, |x| 1.2 * (1.0 - (2.0 * x / PI - 1.0).abs()));
    let (lo, hi) = (lo.clone(), Field::from_coeffs(hi.coeffs().to_vec()));
    // make sure the data are ordered on the grid before integrating
    let lift = lo.max_excess_over(&hi)?.max(0.0);
    let lo = &lo - &Field::mode(ctx.modes, 1, lift);
    let r = comparison_check(&lo, &hi, 0.0, 5.0, &path, &spec, tol::MONOTONICITY, 10)?;
    Ok(vec![CheckRecord::at_most("pde", "comparison_principle", r.max_violation, tol::MONOTONICITY)])
}

fn pde_positivity(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.5);
    let spec = c.problem()?;
    let path = ctx.path(&c, 10.0, 10.0)?;
    let u0 = Field::from_fn(ctx.modes, |x| 0.7 * (x * (PI - x)).sqrt());
    let min = positivity_check(&u0, 0.0, 5.0, &path, &spec)?;
    Ok(vec![CheckRecord::at_least("pde", "positivity", min, -tol::SOLVER)])
}

fn pde_smoothing(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.5);
    let spec = c.problem()?;
    let path = ctx.path(&c, 10.0, 10.0)?;
    let u0 = Field::from_fn(ctx.modes, |x| if x < PI / 2.0 { 1.0 } else { -0.5 });
    let traj = solve_u(&u0, 0.0, 1.0, &path, &spec, usize::MAX)?;
    let r = smoothing_check(&traj);
    Ok(vec![CheckRecord::at_most("pde", "coefficient_envelope_slope", r.envelope_slope, -0.5)])
}

fn pde_heat_oracle(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    // f = 0: u(t) = e^{alpha omega(t)} e^{-t} sin x exactly, and the
    // exponential integrator is exact for it
    let spec = ProblemSpec::new(ctx.alpha, Nonlinearity::zero(0.5)?, Forcing::zero())
        .with_modes(ctx.modes)
        .with_dt(ctx.dt);
    let path = ctx.seed.path(-1.0, 3.0, ctx.dt)?;
    let traj = solve_u(&Field::mode(ctx.modes, 1, 1.0), 0.0, 2.0, &path, &spec, usize::MAX)?;
    let want = (ctx.alpha * path.interpolate(2.0)?).exp() * (-2.0f64).exp();
    let got = traj.final_u().sup_norm();
    Ok(vec![CheckRecord::at_most("pde", "heat_mode1_decay", (got / want - 1.0).abs(), 1e-10)])
}

fn pde_nonlinearity(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.5);
    let f = randattr::chafee::make_nonlinearity(&c)?;
    let r = f.check((-5.0, 5.0), 10.0, 4000, 3);
    Ok(vec![
        CheckRecord::at_most("pde", "reaction_vanishes_at_zero", r.zero_violation, 0.0),
        CheckRecord::at_most("pde", "dissipativity_sampled", r.dissipativity_violation, 1e-9),
        CheckRecord::at_most("pde", "lipschitz_sampled", r.lipschitz_violation, 1e-9),
    ])
}

// ---------------------------------------------------------------- linear

fn steady_request(ctx: &Ctx, beta: f64, delta: f64, past: f64) -> Result<XiRequest> {
    Ok(XiRequest {
        tau: 0.0,
        path: ctx.zero_path(past, 5.0)?.view(),
        phi: SpaceTime::steady(f64::sin),
        beta,
        alpha: ctx.alpha,
        delta,
        n_modes: ctx.modes,
        dq: ctx.dt,
        horizon: None,
        tol: tol::QUADRATURE,
        m_used: None,
    })
}

fn linear_steady_oracle(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let v = xi(&steady_request(ctx, 0.5, 0.25, 200.0)?)?;
    let err = v.field.sup_distance(&Field::mode(ctx.modes, 1, 2.0))?;
    Ok(vec![CheckRecord::at_most("linear", "xi_steady_state_2sin", err, ctx.thr(1e-4, 1e-8))])
}

fn chafee_request(ctx: &Ctx, nu: f64, past: f64, future: f64) -> Result<XiRequest> {
    let c = ctx.chafee(nu);
    let spec = c.problem()?;
    let path = ctx.seed.path(-past, future, ctx.dt)?;
    Ok(XiRequest::from_spec(&spec, 0.0, path.view()))
}

fn linear_quasi_solution(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let req = chafee_request(ctx, 1.5, 300.0, 10.0)?;
    let q = verify_quasi_solution(&req, 2.0)?;
    let min_rel = q.start.min_value / q.start.field.sup_norm().max(1.0);
    Ok(vec![
        CheckRecord::at_most("linear", "xi_quasi_solution_residual", q.residual, 1e-3),
        CheckRecord::at_most("linear", "xi_tail_bound", q.start.tail_bound, tol::QUADRATURE),
        CheckRecord::at_least("linear", "xi_nonnegative", min_rel, -1e-6),
    ])
}

fn linear_linearity(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let base = chafee_request(ctx, 1.5, 300.0, 1.0)?.with_horizon(100.0);
    let phi = SpaceTime::steady(f64::sin);
    let psi = SpaceTime::separable(|t| 1.0 + 0.5 * t.sin(), |x| x * (PI - x));
    let a = xi(&base.clone().with_phi(phi.clone()))?.field;
    let b = xi(&base.clone().with_phi(psi.clone()))?.field;
    let ab = xi(&base.with_phi(phi.scaled(2.0).plus(&psi)))?.field;
    let combo = &a.scaled(2.0) + &b;
    let rel = ab.sup_distance(&combo)? / ab.sup_norm();
    Ok(vec![CheckRecord::at_most("linear", "xi_linear_in_forcing", rel, 1e-12)])
}

fn linear_periodic(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let req = chafee_request(ctx, 1.5, 300.0, 2.0)?
        .with_phi(SpaceTime::separable(|t| 1.0 + 0.5 * (2.0 * PI * t).sin(), f64::sin))
        .with_horizon(100.0);
    let a = xi(&req)?;
    let b = xi(&req.at(1.0, req.path.clone()))?;
    Ok(vec![CheckRecord::at_most("linear", "xi_periodic_in_tau", a.field.sup_distance(&b.field)?, 1e-4)])
}

fn linear_decay_rate(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let req = steady_request(ctx, 0.5, 0.25, 200.0)?;
    let v0 = Field::from_fn(ctx.modes, |x| 3.0 * x * (PI - x));
    let fit = verify_decay(&DecayStart::Fixed(v0), &req, &[4.0, 8.0, 12.0, 16.0, 20.0])?;
    let want = randattr::linear::predicted_rate(0.5);
    Ok(vec![CheckRecord::at_most("linear", "decay_rate_relative_error", (fit.rate / want - 1.0).abs(), 0.1)])
}

fn linear_temperedness(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let req = chafee_request(ctx, 1.5, 520.0, 1.0)?.with_horizon(100.0);
    let probes = temperedness_probe(&req, &[0.1, 1.0, 10.0], &[-50.0, -100.0, -200.0, -400.0])?;
    Ok(probes
        .iter()
        .map(|p| {
            // farther in the past the weighted size must stay below its value at r = -50
            let ratio = p.values[1..].iter().fold(0.0f64, |m, v| m.max(v / p.values[0]));
            CheckRecord::at_most("linear", &format!("xi_tempered_rate_{}", p.c), ratio, 1.0)
                .with_note("largest e^{c r} |xi(r)| for r <= -100 relative to r = -50")
        })
        .collect())
}

// ---------------------------------------------------------------- pullback

fn pullback_semigroup_constant(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let m = calibrate_m(ctx.modes)?;
    Ok(vec![
        CheckRecord::at_least("pullback", "semigroup_constant_at_least_1", m.m, 1.0),
        CheckRecord::at_most("pullback", "semigroup_constant_bounded", m.m, 1.5),
    ])
}

fn pullback_radius_closed_form(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = 0.3;
    let spec = ProblemSpec::new(
        ctx.alpha,
        Nonlinearity::new("h-only", |_, _, _| 0.0, |_, _| 0.0, 0.5, SpaceTime::constant(c))?,
        Forcing::zero(),
    )
    .with_modes(ctx.modes)
    .with_dt(ctx.dt);
    let path = ctx.zero_path(200.0, 1.0)?;
    let r = absorbing_radius(0.0, &path.view(), &spec, None, tol::QUADRATURE)?;
    let want = r.m_used * (1.0 + c / 0.5);
    Ok(vec![CheckRecord::at_most("pullback", "radius_closed_form", (r.r - want).abs() / want, tol::QUADRATURE)])
}

fn pullback_absorption(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.5);
    let spec = c.problem()?;
    let path = ctx.path(&c, 40.0, 1.0)?.view();
    let radius = absorbing_radius(0.0, &path, &spec, None, tol::QUADRATURE)?;
    let samples = unit_ball_samples(ctx.modes, 6, 1);
    let rep = absorption_check(0.0, &path, &spec, &radius, &samples, &[1.0, 2.0, 5.0, 10.0, 20.0])?;
    Ok(vec![CheckRecord::at_most("pullback", "unit_ball_absorbed_by", rep.t_absorbed.unwrap_or(f64::INFINITY), 20.0)
        .with_note(format!("radius {:.4}", radius.r))])
}

fn pullback_interval(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.5);
    let spec = c.problem()?;
    let opts = ctx.ladder();
    let path = ctx.path(&c, opts.cap + 40.0, 1.0)?.view();
    let iv = attractor_interval(0.0, &path, &spec, &opts)?;
    let mono = iv.upper.monotonicity_max_violation.max(iv.lower.monotonicity_max_violation);
    let delta = iv.upper.final_delta().max(iv.lower.final_delta());
    let mut excursion = 0.0f64;
    let solver_spec = spec.clone();
    for u0 in unit_ball_samples(ctx.modes, 4, 9) {
        let state = randattr::pde::pullback_state(40.0, 0.0, &path, &u0.scaled(2.0), &solver_spec)?;
        excursion = excursion.max(iv.excursion(&state)?);
    }
    Ok(vec![
        CheckRecord::at_most("pullback", "ladder_monotone", mono, tol::MONOTONICITY),
        CheckRecord::at_most("pullback", "ladder_converged", delta, opts.tol),
        CheckRecord::at_most("pullback", "lower_below_upper", iv.order_violation, opts.tol),
        CheckRecord::at_most("pullback", "lower_is_minus_upper", iv.asymmetry()?, 10.0 * opts.tol),
        CheckRecord::at_most("pullback", "trajectories_inside_interval", excursion, opts.tol),
        CheckRecord::at_most("pullback", "extremal_below_xi", iv.upper.xi_bound_excess, tol::MONOTONICITY),
    ])
}

fn pullback_quasi_solution(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.5);
    let spec = c.problem()?;
    let opts = ctx.ladder();
    let path = ctx.path(&c, opts.cap + 10.0, 5.0)?.view();
    let now = extremal(Sign::Upper, 0.0, &path, &spec, &opts)?;
    let later = extremal(Sign::Upper, 1.0, &path.shift(1.0)?, &spec, &opts)?;
    let r = quasi_solution_residual(&now, &later, &spec)?;
    Ok(vec![CheckRecord::at_most("pullback", "extremal_quasi_solution_residual", r, 10.0 * opts.tol)])
}

fn pullback_stability(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.5);
    let spec = c.problem()?;
    let opts = ctx.ladder();
    let path = ctx.path(&c, opts.cap + 40.0, 1.0)?.view();
    let offset = Field::mode(ctx.modes, 1, 0.5);
    let r = stability(Sign::Upper, &offset, 0.0, &path, &spec, &[5.0, 10.0, 20.0], &opts)?;
    Ok(vec![
        CheckRecord::at_most("pullback", "stable_from_above", *r.distances.last().expect("ladder"), 10.0 * opts.tol),
        CheckRecord::at_most("pullback", "approach_stays_above", r.sandwich_violation, tol::MONOTONICITY),
    ])
}

// ---------------------------------------------------------------- chafee

fn chafee_nonlinearity(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let h = ctx.chafee(1.5).h();
    let mut worst = 0.0f64;
    for nu in [0.5, 0.9, 1.0, 1.5, 2.0] {
        worst = worst.max(ctx.chafee(nu).dissipativity_violation(10.0, 4000));
    }
    Ok(vec![
        CheckRecord::at_most("chafee", "h_formula", (h - 2.0 / 3.0 * (1.0f64 / 3.0).sqrt()).abs(), 1e-15),
        CheckRecord::at_most("chafee", "dissipativity_grid", worst, 1e-12),
    ])
}

fn chafee_mode_split(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let u = Field::from_fn(ctx.modes, |x| x.sin() + 0.3 * (3.0 * x).sin());
    let s = mode_split(&u);
    let rebuilt = s.reconstruct().sup_distance(&u)?;
    Ok(vec![
        CheckRecord::at_most("chafee", "a1_quadrature", (a1_projection(&u) - 1.0).abs(), 1e-10),
        CheckRecord::at_most("chafee", "split_reconstructs", rebuilt, 0.0),
    ])
}

fn chafee_riccati(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.0);
    let path = ctx.path(&c, 10.0, 21.0)?;
    let r = riccati_check(&c, &Field::mode(ctx.modes, 1, 1.0), 0.0, 20.0, &path, 20)?;
    Ok(vec![
        CheckRecord::at_most("chafee", "a1_below_riccati_bound", r.max_excess, tol::RICCATI_SLACK),
        CheckRecord::at_most("chafee", "holder_constant_4", r.holder_max, 1e-12)
            .with_note(format!("{} nonnegative snapshots", r.holder_checked)),
    ])
}

fn chafee_a1_pullback(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.0);
    let path = ctx.path(&c, 40.0, 1.0)?.view();
    let t = a1_pullback_vanishes(&c, &Field::mode(ctx.modes, 1, 1.0), 0.0, &path, &[5.0, 10.0, 20.0, 40.0])?;
    let excess = t.a1.iter().zip(&t.bound).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
    let rise = t.a1.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![
        CheckRecord::at_most("chafee", "pullback_a1_below_bound", excess, tol::RICCATI_SLACK),
        CheckRecord::at_most("chafee", "pullback_a1_nonincreasing", rise, 0.0),
    ])
}

fn chafee_u2_decay(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.0);
    let path = ctx.path(&c, 10.0, 3.0)?;
    let d = u2_decay_check(&c, &Field::mode(ctx.modes, 2, 1e-3), 0.0, 2.0, &path, 10)?;
    Ok(vec![CheckRecord::at_least("chafee", "u2_compensated_rate", d.rate, 0.85 * 6.0)])
}

fn chafee_odd_symmetry(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let c = ctx.chafee(1.5);
    let spec = c.problem()?;
    let path = ctx.path(&c, 10.0, 10.0)?.view();
    let u0 = Field::from_fn(ctx.modes, |x| x.sin() + 0.4 * (2.0 * x).sin());
    Ok(vec![CheckRecord::at_most("chafee", "odd_symmetry", odd_symmetry_check(&u0, 5.0, 0.0, &path, &spec)?, tol::ODD_SYMMETRY)])
}

fn chafee_pitchfork(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let opts = ctx.ladder();
    let mut out = Vec::new();
    let c = ctx.chafee(0.5);
    let path = ctx.path(&c, opts.cap, 1.0)?.view();
    let trivial = extremal(Sign::Upper, 0.0, &path, &c.problem()?, &opts)?;
    out.push(CheckRecord::at_most("chafee", "trivial_at_nu_0.5", trivial.field.sup_norm(), tol::TRIVIAL_AMPLITUDE));

    let c = ctx.chafee(1.5);
    let path = ctx.path(&c, opts.cap, 1.0)?.view();
    let r = extremal(Sign::Upper, 0.0, &path, &c.problem()?, &opts)?;
    let a1 = mode_split(&r.field).a1;
    if ctx.zero() {
        let oracle = mode_split(&steady_state(&c, 1.0, 60.0)?).a1;
        out.push(CheckRecord::at_most("chafee", "nu_1.5_matches_steady_state", (a1 - oracle).abs() / oracle, 1e-6));
        let galerkin = galerkin_amplitude(1.5, 1.0);
        out.push(CheckRecord::at_most("chafee", "nu_1.5_near_one_mode_estimate", (a1 - galerkin).abs() / galerkin, 0.1));
    } else {
        out.push(CheckRecord::at_least("chafee", "nontrivial_at_nu_1.5", a1, 10.0 * opts.tol));
    }
    Ok(out)
}

fn chafee_periodic(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let base = ctx.chafee(1.5).with_gamma(Gamma::Periodic {
        level: 1.0,
        amp: 0.5,
        period: 1.0,
    });
    let opts = ctx.ladder();
    let row = periodic_cell_with(&base, 1.5, ctx.seed, 0.0, 5e-3, &opts)?;
    Ok(vec![
        CheckRecord::at_most("chafee", "periodic_defect", row.deviation_upper.max(row.deviation_lower), 5e-3),
        CheckRecord::at_least("chafee", "three_solutions_separated", row.separation, 10.0 * opts.tol),
    ])
}
