//! Stochastic Chafee-Infante equation
//!
//! ```text
//! du = (u_xx + nu u - gamma(t) u^3) dt + alpha u o dW,   gamma(t) >= gamma_0 > 0,
//! ```
//!
//! its first-mode analysis at the critical value `nu = 1`, and the pitchfork
//! of the extremal quasi-solutions `u*_nu` as `nu` crosses 1.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::pde::checks::fit_slope;
use crate::pde::problem::{Forcing, Nonlinearity, ProblemSpec, SpaceTime, DEFAULT_DT, DEFAULT_MODES};
use crate::pde::solver::{cocycle_phi, pullback_with, solve_u, Solver};
use crate::pullback::{extremal, ExtremalResult, LadderOptions, Sign};
use crate::spatial::Field;
use crate::tolerances;
use crate::wiener::{conj_factor, NoisePath, NoiseSeed, ShiftedPath, WienerPath};

/// Dissipativity exponent used for every Chafee-Infante run.
pub const BETA: f64 = 0.5;

/// Extra past beyond the ladder cap reserved for the quasi-solution integral.
pub const HORIZON_MARGIN: f64 = 300.0;

/// The cubic coefficient `gamma(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gamma {
    Constant { level: f64 },
    /// `level (1 + amp sin(2 pi t / period))`, `0 <= amp < 1`.
    Periodic { level: f64, amp: f64, period: f64 },
}

impl Gamma {
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Gamma::Constant { level } => level,
            Gamma::Periodic { level, amp, period } => level * (1.0 + amp * (2.0 * PI * t / period).sin()),
        }
    }

    /// `gamma_0`, the lower bound.
    pub fn lower(&self) -> f64 {
        match *self {
            Gamma::Constant { level } => level,
            Gamma::Periodic { level, amp, .. } => level * (1.0 - amp),
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            Gamma::Constant { level } => level,
            Gamma::Periodic { level, amp, .. } => level * (1.0 + amp),
        }
    }

    pub fn period(&self) -> Option<f64> {
        match *self {
            Gamma::Constant { .. } => None,
            Gamma::Periodic { period, .. } => Some(period),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Gamma::Constant { level } if level > 0.0 && level.is_finite() => Ok(()),
            Gamma::Constant { level } => Err(invalid("gamma0", format!("must be positive, got {level}"))),
            Gamma::Periodic { level, amp, period } => {
                if !(level > 0.0 && level.is_finite()) {
                    return Err(invalid("gamma0", format!("must be positive, got {level}")));
                }
                if !(0.0..1.0).contains(&amp) {
                    return Err(invalid("gamma_amp", format!("need 0 <= amp < 1, got {amp}")));
                }
                if !(period > 0.0) {
                    return Err(invalid("gamma_period", format!("must be positive, got {period}")));
                }
                Ok(())
            }
        }
    }
}

/// Parameters of one Chafee-Infante configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChafeeSpec {
    pub nu: f64,
    pub gamma: Gamma,
    pub alpha: f64,
    pub n_modes: usize,
    pub dt: f64,
}

impl ChafeeSpec {
    /// Constant `gamma = gamma0`, `alpha = 0.5`.
    pub fn new(nu: f64, gamma0: f64) -> Self {
        ChafeeSpec {
            nu,
            gamma: Gamma::Constant { level: gamma0 },
            alpha: 0.5,
            n_modes: DEFAULT_MODES,
            dt: DEFAULT_DT,
        }
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn with_gamma(mut self, gamma: Gamma) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_modes(mut self, n: usize) -> Self {
        self.n_modes = n;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(invalid("nu", format!("must be positive, got {}", self.nu)));
        }
        self.gamma.validate()
    }

    /// `h = max_{s >= 0} ((nu - beta) s - gamma_0 s^3)`.
    pub fn h(&self) -> f64 {
        let d = self.nu - BETA;
        if d <= 0.0 {
            0.0
        } else {
            2.0 / 3.0 * d * (d / (3.0 * self.gamma.lower())).sqrt()
        }
    }

    pub fn is_critical(&self) -> bool {
        (self.nu - 1.0).abs() <= tolerances::CRITICAL_BAND
    }

    /// Default ladder, extended near `nu = 1`.
    pub fn ladder_options(&self) -> LadderOptions {
        if self.is_critical() {
            LadderOptions::critical()
        } else {
            LadderOptions::default()
        }
    }

    /// Full solver configuration (no external forcing).
    pub fn problem(&self) -> Result<ProblemSpec> {
        let spec = ProblemSpec::new(self.alpha, make_nonlinearity(self)?, Forcing::zero())
            .with_modes(self.n_modes)
            .with_dt(self.dt);
        spec.validate()?;
        Ok(spec)
    }

    /// A path long enough for pullback ladders up to `cap` (plus the
    /// quasi-solution horizon) and forward runs up to time `future`.
    pub fn path(&self, seed: NoiseSeed, cap: f64, future: f64) -> Result<WienerPath> {
        seed.path(-(cap + HORIZON_MARGIN), future.max(self.dt), self.dt)
    }

    /// Largest violation of `(nu - beta) s^2 - gamma_0 s^4 <= h |s|` over an
    /// even grid of `s` in `[-s_max, s_max]`.
    pub fn dissipativity_violation(&self, s_max: f64, samples: usize) -> f64 {
        let h = self.h();
        let g0 = self.gamma.lower();
        (0..=samples)
            .map(|i| {
                let s = -s_max + 2.0 * s_max * i as f64 / samples as f64;
                (self.nu - BETA) * s * s - g0 * s.powi(4) - h * s.abs()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `f(t, x, s) = nu s - gamma(t) s^3` with `beta = 1/2` and the constant `h`.
pub fn make_nonlinearity(spec: &ChafeeSpec) -> Result<Nonlinearity> {
    spec.validate()?;
    let nu = spec.nu;
    let gamma = spec.gamma;
    let g_max = gamma.upper();
    Nonlinearity::new(
        format!("chafee-infante(nu={nu})"),
        move |t, _, s| nu * s - gamma.eval(t) * s * s * s,
        move |_, (lo, hi): (f64, f64)| {
            let m = lo.abs().max(hi.abs());
            nu.abs() + 3.0 * g_max * m * m
        },
        BETA,
        SpaceTime::constant(spec.h()),
    )
}

/// `u = a1 sin x + u2` with `u2` free of the first mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSplit {
    pub a1: f64,
    pub u2: Field,
}

impl ModeSplit {
    pub fn reconstruct(&self) -> Field {
        let mut c = self.u2.coeffs().to_vec();
        c[0] = self.a1;
        Field::from_coeffs(c)
    }
}

pub fn mode_split(u: &Field) -> ModeSplit {
    let mut c = u.coeffs().to_vec();
    let a1 = c.first().copied().unwrap_or(0.0);
    if let Some(c0) = c.first_mut() {
        *c0 = 0.0;
    }
    ModeSplit {
        a1,
        u2: Field::from_coeffs(c),
    }
}

/// `(2/pi) int_0^pi u sin x dx` by quadrature on the oversampled grid.
pub fn a1_projection(u: &Field) -> f64 {
    let g = u.oversampled();
    let h = PI / (g.n_points() + 1) as f64;
    2.0 / PI * h * g.nodes().zip(&g.values).map(|(x, v)| v * x.sin()).sum::<f64>()
}

/// `(int u sin x)^3 - 4 int u^3 sin x` for a nonnegative field (`None`
/// otherwise); never positive by Hoelder's inequality.
pub fn holder_margin(u: &Field) -> Option<f64> {
    let g = u.oversampled();
    let scale = g.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if g.values.iter().any(|&v| v < -1e-12 * scale) {
        return None;
    }
    let h = PI / (g.n_points() + 1) as f64;
    let (mut m1, mut m3) = (0.0, 0.0);
    for (x, &v) in g.nodes().zip(&g.values) {
        let v = v.max(0.0);
        m1 += v * x.sin();
        m3 += v * v * v * x.sin();
    }
    Some((h * m1).powi(3) - 4.0 * h * m3)
}

/// Riccati upper bound for the first coefficient at `nu = 1`, from `t0` to
/// `t1` along `path`:
///
/// ```text
/// a1(t1) <= e^{alpha (w(t1) - w(t0))} a0 / sqrt(1 + (pi^2/8) gamma_0 a0^2 int_{t0}^{t1} e^{2 alpha (w(s) - w(t0))} ds)
/// ```
///
/// The integral uses the trapezoid rule on the path grid.
pub fn riccati_bound<P: NoisePath + ?Sized>(a0: f64, t0: f64, t1: f64, path: &P, gamma0: f64, alpha: f64) -> Result<f64> {
    if !(a0 >= 0.0) {
        return Err(invalid("a1_start", format!("must be nonnegative, got {a0}")));
    }
    if t1 < t0 {
        return Err(invalid("t", "end precedes start"));
    }
    if t1 == t0 || a0 == 0.0 {
        return Ok(a0);
    }
    let dt = path.dt();
    let n = crate::wiener::grid_steps("t1 - t0", t1 - t0, dt)?;
    let w0 = path.omega(t0)?;
    let mut integral = 0.0;
    let mut prev = 1.0;
    for k in 1..=n {
        let e = (2.0 * alpha * (path.omega(t0 + k as f64 * dt)? - w0)).exp();
        integral += 0.5 * dt * (prev + e);
        prev = e;
    }
    let growth = (alpha * (path.omega(t1)? - w0)).exp();
    Ok(growth * a0 / (1.0 + PI * PI / 8.0 * gamma0 * a0 * a0 * integral).sqrt())
}

/// Pullback form: the bound at time 0 for data given at `-t` on `path`.
pub fn riccati_bound_pullback<P: NoisePath + ?Sized>(a0: f64, t: f64, path: &P, gamma0: f64, alpha: f64) -> Result<f64> {
    riccati_bound(a0, -t, 0.0, path, gamma0, alpha)
}

#[derive(Debug, Clone, Serialize)]
pub struct RiccatiReport {
    pub times: Vec<f64>,
    pub a1: Vec<f64>,
    pub bound: Vec<f64>,
    /// `max (a1 - bound)`.
    pub max_excess: f64,
    pub holder_checked: usize,
    pub holder_skipped: usize,
    /// Largest `(int u sin)^3 - 4 int u^3 sin` over checked snapshots.
    pub holder_max: f64,
}

/// Forward run from nonnegative `u0` at `nu = 1`, comparing the first
/// coefficient against the Riccati bound and checking Hoelder's inequality
/// on every recorded snapshot.
pub fn riccati_check<P: NoisePath + ?Sized>(
    chafee: &ChafeeSpec,
    u0: &Field,
    tau: f64,
    t_end: f64,
    path: &P,
    record_every: usize,
) -> Result<RiccatiReport> {
    let spec = chafee.problem()?;
    let traj = solve_u(u0, tau, t_end, path, &spec, record_every)?;
    let a0 = mode_split(u0).a1;
    let mut rep = RiccatiReport {
        times: Vec::new(),
        a1: Vec::new(),
        bound: Vec::new(),
        max_excess: f64::NEG_INFINITY,
        holder_checked: 0,
        holder_skipped: 0,
        holder_max: f64::NEG_INFINITY,
    };
    for (t, u) in traj.u_frames() {
        let a1 = mode_split(&u).a1;
        let b = riccati_bound(a0, tau, t, path, chafee.gamma.lower(), chafee.alpha)?;
        rep.max_excess = rep.max_excess.max(a1 - b);
        rep.times.push(t);
        rep.a1.push(a1);
        rep.bound.push(b);
        match holder_margin(&u) {
            Some(m) => {
                rep.holder_checked += 1;
                rep.holder_max = rep.holder_max.max(m);
            }
            None => rep.holder_skipped += 1,
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct A1Table {
    pub ladder: Vec<f64>,
    /// First coefficient of the pullback state at `tau`.
    pub a1: Vec<f64>,
    /// Pullback Riccati bound.
    pub bound: Vec<f64>,
    pub decreasing: bool,
}

/// First coefficient of `Phi(t, tau - t, theta_{-t} omega, u0)` along the
/// ladder for nonnegative `u0` at `nu = 1`.
pub fn a1_pullback_vanishes(chafee: &ChafeeSpec, u0: &Field, tau: f64, path: &ShiftedPath, ladder: &[f64]) -> Result<A1Table> {
    let spec = chafee.problem()?;
    let solver = Solver::new(&spec)?;
    let a0 = mode_split(u0).a1;
    let mut a1 = Vec::with_capacity(ladder.len());
    let mut bound = Vec::with_capacity(ladder.len());
    for &t in ladder {
        a1.push(mode_split(&pullback_with(&solver, t, tau, path, u0)?).a1);
        bound.push(riccati_bound_pullback(a0.max(0.0), t, path, chafee.gamma.lower(), chafee.alpha)?);
    }
    let decreasing = a1.windows(2).all(|w| w[1] <= w[0]);
    Ok(A1Table {
        ladder: ladder.to_vec(),
        a1,
        bound,
        decreasing,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct U2Decay {
    pub times: Vec<f64>,
    /// `|u2(t)|^2 e^{-2 alpha (w(t) - w(tau))}`.
    pub compensated: Vec<f64>,
    /// Fitted exponential rate of the compensated squared norm; `+inf` when
    /// there is nothing to fit.
    pub rate: f64,
}

/// Decay of the higher modes: integrates from `u0` at `tau` over
/// `[tau, tau + t_end]`, removes the first mode, divides out the Stratonovich
/// factor `e^{2 alpha (w(t) - w(tau))}` and fits the rate of `|u2|^2`.
pub fn u2_decay_check<P: NoisePath + ?Sized>(
    chafee: &ChafeeSpec,
    u0: &Field,
    tau: f64,
    t_end: f64,
    path: &P,
    record_every: usize,
) -> Result<U2Decay> {
    let spec = chafee.problem()?;
    let traj = solve_u(u0, tau, tau + t_end, path, &spec, record_every)?;
    let w0 = path.omega(tau)?;
    let mut times = Vec::new();
    let mut compensated = Vec::new();
    for (t, u) in traj.u_frames() {
        let n2 = mode_split(&u).u2.l2_norm().powi(2);
        times.push(t);
        compensated.push(n2 * (-2.0 * chafee.alpha * (path.omega(t)? - w0)).exp());
    }
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(&compensated)
        .filter(|(_, &c)| c > 1e-250)
        .map(|(&t, &c)| (t, c.ln()))
        .collect();
    let rate = if pts.len() >= 2 { -fit_slope(&pts) } else { f64::INFINITY };
    Ok(U2Decay {
        times,
        compensated,
        rate,
    })
}

/// `|Phi(t, tau, omega, -u0) + Phi(t, tau, omega, u0)|`.
pub fn odd_symmetry_check(u0: &Field, t: f64, tau: f64, path: &ShiftedPath, spec: &ProblemSpec) -> Result<f64> {
    let plus = cocycle_phi(t, tau, path, u0, spec)?;
    let minus = cocycle_phi(t, tau, path, &u0.scaled(-1.0), spec)?;
    Ok((&plus + &minus).sup_norm())
}

/// One cell of a bifurcation diagram.
#[derive(Debug, Clone, Serialize)]
pub struct BifurcationRow {
    pub nu: f64,
    pub seed: NoiseSeed,
    pub a1: f64,
    pub supnorm: f64,
    pub converged: bool,
    pub ladder_max: f64,
    pub final_delta: f64,
    pub monotonicity_max_violation: f64,
}

impl BifurcationRow {
    fn from_result(nu: f64, seed: NoiseSeed, r: &ExtremalResult) -> Self {
        BifurcationRow {
            nu,
            seed,
            a1: mode_split(&r.field).a1,
            supnorm: r.field.sup_norm(),
            converged: r.converged,
            ladder_max: r.ladder.last().copied().unwrap_or(0.0),
            final_delta: r.final_delta(),
            monotonicity_max_violation: r.monotonicity_max_violation,
        }
    }
}

/// `u*_nu(tau, omega)` for one `(nu, seed)`.
pub fn bifurcation_cell(base: &ChafeeSpec, nu: f64, seed: NoiseSeed, tau: f64) -> Result<(BifurcationRow, ExtremalResult)> {
    let opts = base.with_nu(nu).ladder_options();
    bifurcation_cell_with(base, nu, seed, tau, &opts)
}

/// [`bifurcation_cell`] with explicit ladder options.
pub fn bifurcation_cell_with(
    base: &ChafeeSpec,
    nu: f64,
    seed: NoiseSeed,
    tau: f64,
    opts: &LadderOptions,
) -> Result<(BifurcationRow, ExtremalResult)> {
    let c = base.with_nu(nu);
    let path = c.path(seed, opts.cap, tau.max(0.0) + 1.0)?;
    let r = extremal(Sign::Upper, tau, &path.view(), &c.problem()?, opts)?;
    Ok((BifurcationRow::from_result(nu, seed, &r), r))
}

/// All cells, sequentially, ordered by `(nu, seed)` as given.
pub fn bifurcation_sweep(base: &ChafeeSpec, nu_list: &[f64], seeds: &[NoiseSeed], tau: f64) -> Result<Vec<BifurcationRow>> {
    let mut rows = Vec::with_capacity(nu_list.len() * seeds.len());
    for &nu in nu_list {
        for &seed in seeds {
            rows.push(bifurcation_cell(base, nu, seed, tau)?.0);
        }
    }
    Ok(rows)
}

/// Whether `a1` strictly decreases as `nu` decreases, for one seed, over
/// the given `nu` values (all above 1).
pub fn decreasing_toward_critical(rows: &[BifurcationRow], seed: NoiseSeed) -> bool {
    let mut pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.seed == seed && r.nu > 1.0)
        .map(|r| (r.nu, r.a1))
        .collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    pts.len() >= 2 && pts.windows(2).all(|w| w[1].1 < w[0].1)
}

/// Periodicity and separation of the extremal pair under periodic `gamma`.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicRow {
    pub nu: f64,
    pub seed: NoiseSeed,
    pub period: f64,
    pub a1: f64,
    pub supnorm: f64,
    pub deviation_upper: f64,
    pub deviation_lower: f64,
    /// `|u* + u_*|`.
    pub symmetry_defect: f64,
    /// `min(|u*|, |u_*|, |u* - u_*|)`.
    pub separation: f64,
    /// `u*`, `u_*` and `0` pairwise more than `10 tol` apart.
    pub distinct: bool,
    pub periodic: bool,
    pub converged: bool,
}

pub fn periodic_cell(base: &ChafeeSpec, nu: f64, seed: NoiseSeed, tau: f64, periodic_tol: f64) -> Result<PeriodicRow> {
    let opts = base.with_nu(nu).ladder_options();
    periodic_cell_with(base, nu, seed, tau, periodic_tol, &opts)
}

/// [`periodic_cell`] with explicit ladder options.
pub fn periodic_cell_with(
    base: &ChafeeSpec,
    nu: f64,
    seed: NoiseSeed,
    tau: f64,
    periodic_tol: f64,
    opts: &LadderOptions,
) -> Result<PeriodicRow> {
    let c = base.with_nu(nu);
    let period = c
        .gamma
        .period()
        .ok_or_else(|| invalid("gamma", "periodic experiments need a periodic gamma"))?;
    let path = c.path(seed, opts.cap, tau.max(0.0) + period + 1.0)?.view();
    let spec = c.problem()?;
    let up0 = extremal(Sign::Upper, tau, &path, &spec, opts)?;
    let up1 = extremal(Sign::Upper, tau + period, &path, &spec, opts)?;
    let lo0 = extremal(Sign::Lower, tau, &path, &spec, opts)?;
    let lo1 = extremal(Sign::Lower, tau + period, &path, &spec, opts)?;
    let deviation_upper = up0.field.sup_distance(&up1.field)?;
    let deviation_lower = lo0.field.sup_distance(&lo1.field)?;
    let supnorm = up0.field.sup_norm();
    let separation = supnorm.min(lo0.field.sup_norm()).min(up0.field.sup_distance(&lo0.field)?);
    Ok(PeriodicRow {
        nu,
        seed,
        period,
        a1: mode_split(&up0.field).a1,
        supnorm,
        deviation_upper,
        deviation_lower,
        symmetry_defect: (&up0.field + &lo0.field).sup_norm(),
        separation,
        distinct: separation > 10.0 * opts.tol,
        periodic: deviation_upper.max(deviation_lower) <= periodic_tol,
        converged: [&up0, &up1, &lo0, &lo1].iter().all(|r| r.converged),
    })
}

pub fn periodic_bifurcation(
    base: &ChafeeSpec,
    nu_list: &[f64],
    seeds: &[NoiseSeed],
    tau: f64,
    periodic_tol: f64,
) -> Result<Vec<PeriodicRow>> {
    let mut rows = Vec::new();
    for &nu in nu_list {
        for &seed in seeds {
            rows.push(periodic_cell(base, nu, seed, tau, periodic_tol)?);
        }
    }
    Ok(rows)
}

/// Long forward integration from `a sin x` on the zero path; the reference
/// steady state for deterministic amplitudes.
pub fn steady_state(chafee: &ChafeeSpec, start_amplitude: f64, t_end: f64) -> Result<Field> {
    let spec = chafee.problem()?;
    let path = WienerPath::zero(-1.0, t_end, chafee.dt)?;
    let u0 = Field::mode(chafee.n_modes, 1, start_amplitude);
    let z = conj_factor(&path, 0.0, chafee.alpha)?;
    let solver = Solver::new(&spec)?;
    Ok(solver.integrate(&u0.scaled(z), 0.0, t_end, &path)?.final_v)
}

/// One-mode Galerkin amplitude `sqrt(4 (nu - 1) / (3 gamma_0))` for `nu > 1`.
pub fn galerkin_amplitude(nu: f64, gamma0: f64) -> f64 {
    if nu <= 1.0 {
        0.0
    } else {
        (4.0 * (nu - 1.0) / (3.0 * gamma0)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_values() {
        assert_eq!(ChafeeSpec::new(0.5, 1.0).h(), 0.0);
        let h = ChafeeSpec::new(1.5, 1.0).h();
        assert!((h - 2.0 / 3.0 * (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((h - 0.3849).abs() < 1e-4);
    }

    #[test]
    fn dissipativity_on_grid() {
        for nu in [0.5, 1.0, 1.5, 3.0] {
            assert!(ChafeeSpec::new(nu, 1.0).dissipativity_violation(10.0, 20_000) <= 1e-12);
        }
    }

    #[test]
    fn gamma_bounds() {
        let g = Gamma::Periodic {
            level: 1.0,
            amp: 0.5,
            period: 1.0,
        };
        assert_eq!(g.lower(), 0.5);
        assert!((g.eval(0.25) - 1.5).abs() < 1e-15);
        assert!(ChafeeSpec::new(1.0, 0.0).validate().is_err());
    }

    #[test]
    fn projections() {
        let n = 16;
        let s = Field::mode(n, 1, 1.0);
        assert!((a1_projection(&s) - 1.0).abs() < 1e-12);
        assert!(a1_projection(&Field::mode(n, 2, 1.0)).abs() < 1e-12);
        let mut c = vec![0.0; n];
        c[0] = 1.0;
        c[2] = 0.3;
        let u = Field::from_coeffs(c);
        assert!((a1_projection(&u) - 1.0).abs() < 1e-10);
        let split = mode_split(&u);
        assert_eq!(split.reconstruct(), u);
    }

    #[test]
    fn riccati_deterministic() {
        let w = WienerPath::zero(-1.0, 10.0, 1e-3).unwrap();
        assert_eq!(riccati_bound(0.7, 0.0, 0.0, &w, 1.0, 0.5).unwrap(), 0.7);
        let b = riccati_bound(1.0, 0.0, 8.0, &w, 1.0, 0.5).unwrap();
        assert!((b - 1.0 / (1.0 + PI * PI).sqrt()).abs() < 1e-12);
        assert!((b - 0.3033).abs() < 1e-4);
        assert!(riccati_bound(-1.0, 0.0, 1.0, &w, 1.0, 0.5).is_err());
    }

    #[test]
    fn holder_inequality_on_samples() {
        let n = 16;
        for f in [
            Field::mode(n, 1, 1.0),
            Field::from_fn(n, |x| x * (PI - x)),
            Field::from_fn(n, |x| (x * (PI - x)).powi(3)),
        ] {
            assert!(holder_margin(&f).unwrap() <= 0.0);
        }
        assert!(holder_margin(&Field::mode(n, 2, 1.0)).is_none());
    }
}
