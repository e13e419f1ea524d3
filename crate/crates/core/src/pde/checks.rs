//! Numerical checks on the solver: comparison principle, smoothing, the
//! conjugation identity and the cocycle property.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pde::problem::ProblemSpec;
use crate::pde::solver::{cocycle_phi, solve_v, Solver, Trajectory};
use crate::spatial::Field;
use crate::wiener::{conj_factor, NoisePath, WienerPath};

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    /// `max_t max_x (v1 - v2)^+`.
    pub max_violation: f64,
    pub worst_time: f64,
    pub checked_times: usize,
    pub tol: f64,
    pub passed: bool,
}

/// Integrates two ordered initial states side by side and measures the
/// largest violation of `v1 <= v2`, checking every `check_every` steps.
#[allow(clippy::too_many_arguments)]
pub fn comparison_check<P: NoisePath + ?Sized>(
    v1_tau: &Field,
    v2_tau: &Field,
    tau: f64,
    t_end: f64,
    path: &P,
    spec: &ProblemSpec,
    tol: f64,
    check_every: usize,
) -> Result<ComparisonReport> {
    if !v1_tau.pointwise_leq(v2_tau, 0.0)? {
        return Err(crate::error::invalid("v1_tau", "initial data must satisfy v1 <= v2"));
    }
    let solver = Solver::new(spec)?;
    let mut first = Vec::new();
    solver.integrate_with(v1_tau, tau, t_end, path, check_every, |_, t, v, _| {
        first.push((t, Field::from_coeffs(v.to_vec())));
    })?;
    let mut max_violation = 0.0f64;
    let mut worst_time = tau;
    let mut i = 0;
    let mut err = None;
    solver.integrate_with(v2_tau, tau, t_end, path, check_every, |_, t, v, _| {
        let (t1, f1) = &first[i];
        debug_assert_eq!(*t1, t);
        match f1.max_excess_over(&Field::from_coeffs(v.to_vec())) {
            Ok(ex) if ex > max_violation => {
                max_violation = ex;
                worst_time = t;
            }
            Ok(_) => {}
            Err(e) => err = Some(e),
        }
        i += 1;
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(ComparisonReport {
        max_violation,
        worst_time,
        checked_times: i,
        tol,
        passed: max_violation <= tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothingReport {
    /// `|a_n|` of the final state `u`.
    pub profile: Vec<f64>,
    /// Largest mode with `|a_n| > 1e-10`, if any.
    pub last_significant: Option<usize>,
    /// Least-squares slope of `log max_{m >= n} |a_m|` against `n` over the
    /// modes above the floor.
    pub envelope_slope: f64,
    /// Envelope decays at a geometric (or faster) rate.
    pub geometric: bool,
}

pub const SMOOTHING_FLOOR: f64 = 1e-10;

/// Decay profile of the final state's coefficients.
pub fn smoothing_check(traj: &Trajectory) -> SmoothingReport {
    let u = traj.final_u();
    let profile: Vec<f64> = u.coeffs().iter().map(|a| a.abs()).collect();
    let last_significant = profile.iter().rposition(|&a| a > SMOOTHING_FLOOR).map(|i| i + 1);

    // tail envelope E(n) = max_{m >= n} |a_m|
    let mut env = profile.clone();
    for i in (0..env.len().saturating_sub(1)).rev() {
        env[i] = env[i].max(env[i + 1]);
    }
    let pts: Vec<(f64, f64)> = env
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 1e-14)
        .map(|(i, &e)| ((i + 1) as f64, e.ln()))
        .collect();
    let envelope_slope = if pts.len() >= 2 { fit_slope(&pts) } else { f64::NEG_INFINITY };
    let geometric = pts.len() < 2 || envelope_slope < 0.0;
    SmoothingReport {
        profile,
        last_significant,
        envelope_slope,
        geometric,
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityDefect {
    pub absolute: f64,
    pub relative: f64,
}

fn defect(a: &Field, b: &Field) -> Result<IdentityDefect> {
    let absolute = a.sup_distance(b)?;
    let scale = a.sup_norm().max(b.sup_norm());
    Ok(IdentityDefect {
        absolute,
        relative: if scale > 0.0 { absolute / scale } else { absolute },
    })
}

/// Compares `u(tau, tau-t, theta_{-tau} omega, u0)` computed through the
/// cocycle with `v(tau, tau-t, omega^{-tau}, z(-t, omega) u0)` computed on the
/// translated path. The two agree algebraically.
pub fn conjugation_defect(t: f64, tau: f64, path: &WienerPath, u0: &Field, spec: &ProblemSpec) -> Result<IdentityDefect> {
    let via_cocycle = cocycle_phi(t, tau - t, &path.shift(-t)?, u0, spec)?;
    let translated = path.translate(-tau)?;
    let v0 = u0.scaled(conj_factor(path, -t, spec.alpha)?);
    let solver = Solver::new(spec)?;
    let direct = solver.integrate(&v0, tau - t, tau, &translated)?.final_v;
    // z(tau, omega^{-tau}) = exp(-alpha omega(0)) = 1
    debug_assert_eq!(conj_factor(&translated, tau, spec.alpha)?, 1.0);
    defect(&via_cocycle, &direct)
}

/// `Phi(t + s, tau, omega, u)` against `Phi(t, tau + s, theta_s omega, Phi(s, tau, omega, u))`.
pub fn cocycle_defect(t: f64, s: f64, tau: f64, path: &WienerPath, u0: &Field, spec: &ProblemSpec) -> Result<IdentityDefect> {
    if t < 0.0 || s < 0.0 {
        return Err(Error::InvalidParameter {
            name: "t/s",
            reason: "cocycle times must be nonnegative".into(),
        });
    }
    let view = path.view();
    let whole = cocycle_phi(t + s, tau, &view, u0, spec)?;
    let first = cocycle_phi(s, tau, &view, u0, spec)?;
    let composed = cocycle_phi(t, tau + s, &path.shift(s)?, &first, spec)?;
    defect(&whole, &composed)
}

/// Lowest grid value of `u` along a trajectory started from nonnegative data.
pub fn min_value(traj: &Trajectory) -> f64 {
    traj.u_frames()
        .map(|(_, u)| u.oversampled().values.into_iter().fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min)
}

/// Runs `solve_v` and reports its minimum; convenience for positivity checks.
pub fn positivity_check<P: NoisePath + ?Sized>(u_tau: &Field, tau: f64, t_end: f64, path: &P, spec: &ProblemSpec) -> Result<f64> {
    let z0 = conj_factor(path, tau, spec.alpha)?;
    let traj = solve_v(&u_tau.scaled(z0), tau, t_end, path, spec, 100)?;
    Ok(min_value(&traj))
}
