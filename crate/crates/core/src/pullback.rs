//! Pullback experiments: absorbing radii, tempered families, the extremal
//! complete quasi-solutions `u*` and `u_*`, one-sided stability, the
//! attractor envelope and periodicity.
//!
//! `u*(tau, omega)` is the limit of the pullback ladder
//!
//! ```text
//! u(tau, tau - t, theta_{-tau} omega, xi(tau - t, theta_{-t} omega)),   t -> inf,
//! ```
//!
//! which is monotone nonincreasing in `t` by the comparison principle; `u_*`
//! starts from `-xi` and is nondecreasing.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::linear::{xi, TemperedProbe, XiRequest};
use crate::pde::problem::{ProblemSpec, LAMBDA1};
use crate::pde::solver::{cocycle_with, pullback_with, Solver};
use crate::spatial::{oversampled_points, Field};
use crate::tolerances;
use crate::wiener::{conj_factor, grid_steps, NoisePath, PathDescriptor, ShiftedPath};

/// Measured semigroup constant `sup_t |e^{-A t}|_{inf} e^{(lambda - beta) t}`,
/// `A = -Delta - beta`, on the discrete operator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MCalibration {
    pub m: f64,
    pub t_at_max: f64,
    pub n_modes: usize,
}

static M_CACHE: OnceLock<Mutex<HashMap<usize, MCalibration>>> = OnceLock::new();

/// Row-sum norm of the discrete heat kernel times `e^{lambda_1 t}`, maximized
/// over a log-spaced grid of `t` in `[0.01, 50]`. The `beta` factors cancel.
/// Cached per mode count.
pub fn calibrate_m(n_modes: usize) -> Result<MCalibration> {
    if n_modes == 0 {
        return Err(invalid("n_modes", "must be positive"));
    }
    let cache = M_CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&n_modes) {
        return Ok(*c);
    }
    let p = oversampled_points(n_modes);
    let h = std::f64::consts::PI / (p + 1) as f64;
    let w = 2.0 / (p + 1) as f64;
    let sines: Vec<f64> = (1..=p)
        .flat_map(|j| (1..=n_modes).map(move |n| ((n * j) as f64 * h).sin()))
        .collect();
    let mut best = MCalibration {
        m: 0.0,
        t_at_max: 0.0,
        n_modes,
    };
    let n_t = 60;
    let mut scaled = vec![0.0; n_modes];
    for it in 0..n_t {
        let t = 0.01 * (5000.0f64).powf(it as f64 / (n_t - 1) as f64);
        for (n, s) in scaled.iter_mut().enumerate() {
            let lam = ((n + 1) * (n + 1)) as f64;
            *s = w * (-(lam - LAMBDA1) * t).exp();
        }
        // symmetric kernel: rows i and p + 1 - i agree
        let mut norm = 0.0f64;
        for i in 0..p.div_ceil(2) {
            let ri = &sines[i * n_modes..(i + 1) * n_modes];
            let mut row = 0.0;
            for j in 0..p {
                let rj = &sines[j * n_modes..(j + 1) * n_modes];
                let k: f64 = ri.iter().zip(rj).zip(&scaled).map(|((a, b), c)| a * b * c).sum();
                row += k.abs();
            }
            norm = norm.max(row);
        }
        if norm > best.m {
            best.m = norm;
            best.t_at_max = t;
        }
    }
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert(n_modes, best);
    Ok(best)
}

/// Radius of the pullback absorbing ball
/// `R = M + M int_{-inf}^0 e^{(lambda - beta) s} z(s, omega) (|h| + |g|)(s + tau) ds`.
#[derive(Debug, Clone, Serialize)]
pub struct AbsorbingRadius {
    pub tau: f64,
    pub path: PathDescriptor,
    #[serde(rename = "R")]
    pub r: f64,
    pub m_used: f64,
    pub integral_value: f64,
    pub horizon: f64,
    pub tail_bound: f64,
}

/// Evaluates the absorbing radius with exact exponential weights and left-node
/// values of `z (|h| + |g|)`, truncated where the tail bound drops below
/// `tol`. `m_used = None` takes the calibrated constant.
pub fn absorbing_radius(
    tau: f64,
    path: &ShiftedPath,
    spec: &ProblemSpec,
    m_used: Option<f64>,
    tol: f64,
) -> Result<AbsorbingRadius> {
    spec.validate()?;
    let m = match m_used {
        Some(m) if m > 0.0 => m,
        Some(m) => return Err(invalid("m_used", format!("must be positive, got {m}"))),
        None => calibrate_m(spec.n_modes)?.m,
    };
    let h = spec.nonlinearity.h().on_grid(spec.n_modes)?;
    let g = spec.forcing.g.on_grid(spec.n_modes)?;
    let size = |t: f64| h.sup_norm(t) + g.sup_norm(t);
    let dq = spec.dt;
    grid_steps("dt", dq, path.dt())?;
    let mu = LAMBDA1 - spec.beta();
    let delta = spec.forcing.delta;
    let decay = (-mu * dq).exp();
    let weight = -(-mu * dq).exp_m1() / mu;
    let q = (-(mu - delta) * dq).exp();

    let avail = ((-path.domain().0) / dq + 1e-9).floor() as i64;
    let weighted = |k: i64| -> Result<f64> {
        let s = -(k as f64) * dq;
        let c = size(s + tau);
        if c == 0.0 {
            return Ok(0.0);
        }
        Ok(c * conj_factor(path, s, spec.alpha)?)
    };
    // tail bound for a horizon of k steps, from the weighted sup beyond it
    let tail = |k: i64| -> Result<(f64, f64)> {
        let (a, b) = if avail > k { (k + 1, avail.min(2 * k)) } else { (k / 2 + 1, k) };
        let mut w_sup = 0.0f64;
        for j in a..=b {
            w_sup = w_sup.max((-delta * j as f64 * dq).exp() * weighted(j)?);
        }
        let c = m * weight * w_sup * (delta * dq).exp() / (1.0 - q);
        if c == 0.0 {
            return Ok((0.0, 0.0));
        }
        Ok((c * q.powf(k as f64), ((tol / c).ln() / q.ln()).max(0.0)))
    };
    let mut k = ((10.0 / (mu - delta)) / dq).ceil() as i64;
    let (k, tail_bound) = loop {
        let k_eval = k.min(avail);
        let (bound, required) = tail(k_eval)?;
        if bound <= tol {
            break (k_eval, bound);
        }
        let next = (required.ceil() as i64).max(k + k / 4 + 1);
        if k_eval == avail {
            return Err(Error::Truncation {
                horizon: k_eval as f64 * dq,
                tail: bound,
                tol,
                required: next as f64 * dq,
            });
        }
        k = next;
    };
    let mut acc = 0.0;
    for j in (1..=k).rev() {
        acc = acc * decay + weighted(j)?;
    }
    let integral_value = weight * acc;
    Ok(AbsorbingRadius {
        tau,
        path: path.descriptor(),
        r: m * (1.0 + integral_value),
        m_used: m,
        integral_value,
        horizon: k as f64 * dq,
        tail_bound,
    })
}

/// `count` fields with sup-norm exactly 1 (up to the sup-norm estimate),
/// including `+-sin x`.
pub fn unit_ball_samples(n_modes: usize, count: usize, seed: u64) -> Vec<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let f = match i {
            0 => Field::mode(n_modes, 1, 1.0),
            1 => Field::mode(n_modes, 1, -1.0),
            _ => {
                let c: Vec<f64> = (1..=n_modes)
                    .map(|n| rng.gen_range(-1.0..1.0) / n as f64)
                    .collect();
                let f = Field::from_coeffs(c);
                let s = f.sup_norm();
                f.scaled(1.0 / s)
            }
        };
        out.push(f);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct AbsorptionReport {
    pub radius: f64,
    pub ladder: Vec<f64>,
    /// Largest pullback sup-norm over the samples at each ladder time.
    pub sup_norms: Vec<f64>,
    /// First ladder time from which every sample stays inside the ball.
    pub t_absorbed: Option<f64>,
}

/// Pullback sup-norms `|Phi(t, tau - t, theta_{-t} omega, u0)|` of the given
/// samples against the radius.
pub fn absorption_check(
    tau: f64,
    path: &ShiftedPath,
    spec: &ProblemSpec,
    radius: &AbsorbingRadius,
    samples: &[Field],
    ladder: &[f64],
) -> Result<AbsorptionReport> {
    let solver = Solver::new(spec)?;
    let mut sup_norms = Vec::with_capacity(ladder.len());
    for &t in ladder {
        let mut worst = 0.0f64;
        for u0 in samples {
            worst = worst.max(pullback_with(&solver, t, tau, path, u0)?.sup_norm());
        }
        sup_norms.push(worst);
    }
    let t_absorbed = (0..ladder.len())
        .find(|&i| sup_norms[i..].iter().all(|&s| s <= radius.r))
        .map(|i| ladder[i]);
    Ok(AbsorptionReport {
        radius: radius.r,
        ladder: ladder.to_vec(),
        sup_norms,
        t_absorbed,
    })
}

type RadiusFn = Arc<dyn Fn(f64, &ShiftedPath) -> Result<f64> + Send + Sync>;

/// A family of sup-norm balls `D(tau, omega) = B(0, rho(tau, omega))`.
#[derive(Clone)]
pub struct TemperedFamily {
    pub label: String,
    radius: RadiusFn,
}

impl fmt::Debug for TemperedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TemperedFamily({})", self.label)
    }
}

impl TemperedFamily {
    pub fn new(label: impl Into<String>, radius: impl Fn(f64, &ShiftedPath) -> Result<f64> + Send + Sync + 'static) -> Self {
        TemperedFamily {
            label: label.into(),
            radius: Arc::new(radius),
        }
    }

    /// The deterministic ball of radius `rho`.
    pub fn ball(rho: f64) -> Self {
        TemperedFamily::new(format!("ball({rho})"), move |_, _| Ok(rho))
    }

    /// The absorbing balls `K(tau, omega)` of `spec`.
    pub fn absorbing(spec: ProblemSpec, tol: f64) -> Self {
        TemperedFamily::new("absorbing", move |tau, path| Ok(absorbing_radius(tau, path, &spec, None, tol)?.r))
    }

    pub fn radius(&self, tau: f64, path: &ShiftedPath) -> Result<f64> {
        (self.radius)(tau, path)
    }

    /// `e^{c r} rho(tau + r, theta_r omega)` along `rs`, for each `c`.
    pub fn probe(&self, tau: f64, path: &ShiftedPath, cs: &[f64], rs: &[f64]) -> Result<Vec<TemperedProbe>> {
        let mut radii = Vec::with_capacity(rs.len());
        for &r in rs {
            radii.push(self.radius(tau + r, &path.shift(r)?)?);
        }
        Ok(cs
            .iter()
            .map(|&c| {
                let values: Vec<f64> = rs.iter().zip(&radii).map(|(&r, &rho)| (c * r).exp() * rho).collect();
                let decreasing = values.iter().all(|&v| v == 0.0) || values.windows(2).all(|w| w[1] < w[0]);
                TemperedProbe {
                    c,
                    rs: rs.to_vec(),
                    values,
                    decreasing,
                }
            })
            .collect())
    }

    /// Representative members: unit-ball samples scaled to the radius.
    pub fn sample(&self, tau: f64, path: &ShiftedPath, n_modes: usize, count: usize, seed: u64) -> Result<Vec<Field>> {
        let rho = self.radius(tau, path)?;
        Ok(unit_ball_samples(n_modes, count, seed)
            .into_iter()
            .map(|f| f.scaled(rho))
            .collect())
    }
}

/// Which extremal solution: `Upper` is `u*`, `Lower` is `u_*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Upper,
    Lower,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Upper => 1.0,
            Sign::Lower => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Upper => "+",
            Sign::Lower => "-",
        }
    }

    pub fn parse(s: &str) -> Result<Sign> {
        match s {
            "+" | "upper" => Ok(Sign::Upper),
            "-" | "lower" => Ok(Sign::Lower),
            _ => Err(invalid("sign", format!("expected + or -, got {s:?}"))),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

/// Pullback ladder: the listed times, then doubling up to `cap`.
#[derive(Debug, Clone, Serialize)]
pub struct LadderOptions {
    pub ladder: Vec<f64>,
    pub tol: f64,
    pub cap: f64,
    pub monotonicity_tol: f64,
}

impl Default for LadderOptions {
    fn default() -> Self {
        LadderOptions {
            ladder: tolerances::LADDER.to_vec(),
            tol: tolerances::EXTREMAL,
            cap: tolerances::LADDER_CAP,
            monotonicity_tol: tolerances::MONOTONICITY,
        }
    }
}

impl LadderOptions {
    /// Longer ladder and tighter tolerance for slow relaxation near a
    /// bifurcation point.
    pub fn critical() -> Self {
        LadderOptions {
            tol: tolerances::EXTREMAL_CRITICAL,
            cap: tolerances::LADDER_CAP_CRITICAL,
            ..Default::default()
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_ladder(mut self, ladder: Vec<f64>) -> Self {
        self.ladder = ladder;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.ladder.is_empty() || self.ladder[0] <= 0.0 || self.ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("ladder", "must be positive and strictly increasing"));
        }
        if !(self.tol > 0.0 && self.monotonicity_tol >= 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        Ok(())
    }

    /// All rung times, listed ones first.
    pub fn rungs(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.ladder.iter().copied().filter(|&t| t <= self.cap).collect();
        let mut t = *self.ladder.last().unwrap_or(&1.0);
        while 2.0 * t <= self.cap {
            t *= 2.0;
            out.push(t);
        }
        out
    }

    /// Earliest path time the ladder touches, given a quasi-solution horizon.
    pub fn past_needed(&self, horizon: f64) -> f64 {
        -(self.cap.max(*self.ladder.last().unwrap_or(&0.0)) + horizon)
    }
}

/// Outcome of one extremal computation.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremalResult {
    pub sign: Sign,
    pub tau: f64,
    pub path: PathDescriptor,
    #[serde(skip)]
    pub view: ShiftedPath,
    pub field: Field,
    /// Rung times actually computed.
    pub ladder: Vec<f64>,
    /// Sup-norm distance between successive rungs (one fewer than `ladder`).
    pub rung_deltas: Vec<f64>,
    pub converged: bool,
    /// Largest ordering violation between successive rungs.
    pub monotonicity_max_violation: f64,
    /// Largest excess of `|rung|` over `xi(tau, omega)`.
    pub xi_bound_excess: f64,
}

impl ExtremalResult {
    pub fn final_delta(&self) -> f64 {
        self.rung_deltas.last().copied().unwrap_or(f64::INFINITY)
    }
}

fn abs_excess(u: &Field, bound: &Field) -> f64 {
    let a = u.oversampled().values;
    let b = bound.oversampled().values;
    a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max(x.abs() - y))
}

/// The monotone pullback ladder from `sign * xi`. Stops at the first rung
/// within `tol` of its predecessor, or at the cap (reported as not
/// converged). An ordering violation above `monotonicity_tol` is an error.
pub fn extremal(sign: Sign, tau: f64, path: &ShiftedPath, spec: &ProblemSpec, opts: &LadderOptions) -> Result<ExtremalResult> {
    opts.validate()?;
    let solver = Solver::new(spec)?;
    let base_req = XiRequest::from_spec(spec, tau, path.clone());
    let xi_here = xi(&base_req)?;
    let mut ladder = Vec::new();
    let mut rung_deltas = Vec::new();
    let mut mono = 0.0f64;
    let mut xi_excess = 0.0f64;
    let mut prev: Option<Field> = None;
    let mut converged = false;
    for t in opts.rungs() {
        let shifted = path.shift(-t)?;
        let start = xi(&base_req.at(tau - t, shifted.clone()))?.field.scaled(sign.value());
        let cur = cocycle_with(&solver, t, tau - t, &shifted, &start)?;
        ladder.push(t);
        xi_excess = xi_excess.max(abs_excess(&cur, &xi_here.field));
        if let Some(p) = &prev {
            let violation = match sign {
                Sign::Upper => cur.max_excess_over(p)?,
                Sign::Lower => p.max_excess_over(&cur)?,
            };
            mono = mono.max(violation);
            if violation > opts.monotonicity_tol {
                return Err(Error::Monotonicity {
                    rung: t,
                    violation,
                    tol: opts.monotonicity_tol,
                });
            }
            let delta = cur.sup_distance(p)?;
            rung_deltas.push(delta);
            if delta < opts.tol {
                converged = true;
                prev = Some(cur);
                break;
            }
        }
        prev = Some(cur);
    }
    Ok(ExtremalResult {
        sign,
        tau,
        path: path.descriptor(),
        view: path.clone(),
        field: prev.expect("ladder has at least one rung"),
        ladder,
        rung_deltas,
        converged,
        monotonicity_max_violation: mono,
        xi_bound_excess: xi_excess,
    })
}

/// `|Phi(t, tau, omega, u*(tau, omega)) - u*(tau + t, theta_t omega)|` for two
/// extremal results on `omega` and `theta_t omega`.
pub fn quasi_solution_residual(at_tau: &ExtremalResult, later: &ExtremalResult, spec: &ProblemSpec) -> Result<f64> {
    let t = later.tau - at_tau.tau;
    if !(t > 0.0) {
        return Err(invalid("later", "must sit at a later time"));
    }
    if later.view != at_tau.view.shift(t)? {
        return Err(invalid("later", "must be computed on theta_t of the first path"));
    }
    let solver = Solver::new(spec)?;
    let moved = cocycle_with(&solver, t, at_tau.tau, &at_tau.view, &at_tau.field)?;
    moved.sup_distance(&later.field)
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub sign: Sign,
    pub ladder: Vec<f64>,
    /// `|Phi(t, tau - t, theta_{-t} omega, psi) - u*(tau, omega)|`.
    pub distances: Vec<f64>,
    /// Largest crossing of the extremal from the wrong side.
    pub sandwich_violation: f64,
    pub decreasing: bool,
    pub target: ExtremalResult,
}

/// Starts from `u*(tau - t, theta_{-t} omega) + offset` (offset >= 0) for
/// `Upper`, or from `u_* + offset` (offset <= 0) for `Lower`, and measures
/// the pullback distance to the extremal at `tau`.
pub fn stability(
    sign: Sign,
    offset: &Field,
    tau: f64,
    path: &ShiftedPath,
    spec: &ProblemSpec,
    ladder: &[f64],
    opts: &LadderOptions,
) -> Result<StabilityReport> {
    let grid = offset.oversampled().values;
    let wrong_side = grid.iter().any(|&v| sign.value() * v < 0.0);
    if wrong_side {
        return Err(invalid("offset", "must lie on the side of the extremal being tested"));
    }
    let target = extremal(sign, tau, path, spec, opts)?;
    let solver = Solver::new(spec)?;
    let mut distances = Vec::with_capacity(ladder.len());
    let mut sandwich = 0.0f64;
    for &t in ladder {
        let earlier = extremal(sign, tau - t, &path.shift(-t)?, spec, opts)?;
        let psi = &earlier.field + offset;
        let state = pullback_with(&solver, t, tau, path, &psi)?;
        distances.push(state.sup_distance(&target.field)?);
        let crossing = match sign {
            Sign::Upper => target.field.max_excess_over(&state)?,
            Sign::Lower => state.max_excess_over(&target.field)?,
        };
        sandwich = sandwich.max(crossing);
    }
    let decreasing = distances.windows(2).all(|w| w[1] <= w[0]);
    Ok(StabilityReport {
        sign,
        ladder: ladder.to_vec(),
        distances,
        sandwich_violation: sandwich,
        decreasing,
        target,
    })
}

/// The envelope `[u_*, u*]` of the pullback attractor at `(tau, omega)`.
#[derive(Debug, Clone, Serialize)]
pub struct AttractorInterval {
    pub lower: ExtremalResult,
    pub upper: ExtremalResult,
    /// `max (u_* - u*)^+`; zero up to tolerance.
    pub order_violation: f64,
}

impl AttractorInterval {
    /// How far `u` leaves the envelope, `max(u - u*, u_* - u)^+`.
    pub fn excursion(&self, u: &Field) -> Result<f64> {
        Ok(u.max_excess_over(&self.upper.field)?.max(self.lower.field.max_excess_over(u)?))
    }

    /// `|u* + u_*|`, zero for odd nonlinearities.
    pub fn asymmetry(&self) -> Result<f64> {
        Ok((&self.upper.field + &self.lower.field).sup_norm())
    }
}

pub fn attractor_interval(tau: f64, path: &ShiftedPath, spec: &ProblemSpec, opts: &LadderOptions) -> Result<AttractorInterval> {
    let upper = extremal(Sign::Upper, tau, path, spec, opts)?;
    let lower = extremal(Sign::Lower, tau, path, spec, opts)?;
    for r in [&upper, &lower] {
        if !r.converged {
            return Err(Error::NotConverged {
                delta: r.final_delta(),
                tol: opts.tol,
                cap: opts.cap,
            });
        }
    }
    let order_violation = lower.field.max_excess_over(&upper.field)?;
    Ok(AttractorInterval {
        lower,
        upper,
        order_violation,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicityReport {
    pub period: f64,
    /// `|u*(tau + T, omega) - u*(tau, omega)|`.
    pub deviation: f64,
    pub first: ExtremalResult,
    pub second: ExtremalResult,
}

/// Compares the extremal at `tau` and `tau + period` on the same `omega`.
pub fn periodicity_check(
    sign: Sign,
    tau: f64,
    period: f64,
    path: &ShiftedPath,
    spec: &ProblemSpec,
    opts: &LadderOptions,
) -> Result<PeriodicityReport> {
    if !(period > 0.0) {
        return Err(invalid("period", "must be positive"));
    }
    let first = extremal(sign, tau, path, spec, opts)?;
    let second = extremal(sign, tau + period, path, spec, opts)?;
    let deviation = first.field.sup_distance(&second.field)?;
    Ok(PeriodicityReport {
        period,
        deviation,
        first,
        second,
    })
}
