//! The linear comparison problem
//!
//! ```text
//! dv/dt = v_xx + beta v + z(t, omega) phi(t, x),   phi = h + |g| >= 0,
//! ```
//!
//! and its tempered complete quasi-solution
//!
//! ```text
//! xi(tau, omega) = sum_n sin(n x) int_{-inf}^0 e^{(n^2 - beta) s} z(s, omega) phi_n(s + tau) ds.
//! ```
//!
//! The integral is truncated at `-S` and evaluated with the same one-step
//! weights as the solver, so `xi` is an exact complete quasi-solution of the
//! discrete linear problem; its distance from the continuous integral is the
//! first-order scheme error. The discarded tail is bounded through the
//! weight `delta` of the temperedness condition and the measured size of
//! `e^{delta s} z(s) |phi(s + tau)|` beyond the horizon.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::pde::checks::fit_slope;
use crate::pde::problem::{Forcing, GridSpaceTime, Nonlinearity, ProblemSpec, SpaceTime, LAMBDA1};
use crate::pde::solver::Solver;
use crate::pullback::calibrate_m;
use crate::spatial::{oversampled_points, Field};
use crate::tolerances;
use crate::wiener::{conj_factor, grid_steps, NoisePath, PathDescriptor, ShiftedPath};

/// Inputs of the quasi-solution integral.
#[derive(Debug, Clone)]
pub struct XiRequest {
    pub tau: f64,
    pub path: ShiftedPath,
    /// Nonnegative forcing `h + |g|`.
    pub phi: SpaceTime,
    pub beta: f64,
    pub alpha: f64,
    pub delta: f64,
    pub n_modes: usize,
    /// Quadrature step; equal to the solver step.
    pub dq: f64,
    /// Truncation horizon `S`; chosen from `tol` when `None`.
    pub horizon: Option<f64>,
    pub tol: f64,
    /// Semigroup constant for the tail bound; calibrated when `None`.
    pub m_used: Option<f64>,
}

impl XiRequest {
    /// The comparison problem of `spec` at `tau` along `path`.
    pub fn from_spec(spec: &ProblemSpec, tau: f64, path: ShiftedPath) -> Self {
        XiRequest {
            tau,
            path,
            phi: spec.comparison_forcing(),
            beta: spec.beta(),
            alpha: spec.alpha,
            delta: spec.forcing.delta,
            n_modes: spec.n_modes,
            dq: spec.dt,
            horizon: None,
            tol: tolerances::QUADRATURE,
            m_used: None,
        }
    }

    pub fn at(&self, tau: f64, path: ShiftedPath) -> Self {
        XiRequest {
            tau,
            path,
            ..self.clone()
        }
    }

    pub fn with_horizon(mut self, s: f64) -> Self {
        self.horizon = Some(s);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_phi(mut self, phi: SpaceTime) -> Self {
        self.phi = phi;
        self
    }

    /// The linear problem itself, `f(s) = beta s` and `g = phi`, as a
    /// solver configuration.
    pub fn linear_spec(&self) -> Result<ProblemSpec> {
        let spec = ProblemSpec::new(
            self.alpha,
            Nonlinearity::linear(self.beta, self.beta)?,
            Forcing::new(self.phi.clone(), self.delta),
        )
        .with_modes(self.n_modes)
        .with_dt(self.dq);
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        grid_steps("dq", self.dq, self.path.dt())?;
        if let Some(s) = self.horizon {
            if !(s > 0.0) {
                return Err(invalid("horizon", format!("must be positive, got {s}")));
            }
        }
        // beta and delta are checked by the linear problem
        self.linear_spec().map(|_| ())
    }

    fn m(&self) -> Result<f64> {
        match self.m_used {
            Some(m) if m > 0.0 => Ok(m),
            Some(m) => Err(invalid("m_used", format!("must be positive, got {m}"))),
            None => Ok(calibrate_m(self.n_modes)?.m),
        }
    }
}

/// One evaluation of the quasi-solution.
#[derive(Debug, Clone, Serialize)]
pub struct XiValue {
    pub field: Field,
    pub tail_bound: f64,
    pub tau: f64,
    pub horizon: f64,
    pub m_used: f64,
    /// Smallest grid value; nonnegative up to truncation of the series.
    pub min_value: f64,
    pub path: PathDescriptor,
}

/// Per-mode one-step weights of the solver applied to the linear problem:
/// `v <- rho_n v + w_n z phi_n`.
struct Weights {
    rho: Vec<f64>,
    w: Vec<f64>,
}

fn weights(n_modes: usize, dq: f64, beta: f64) -> Weights {
    let mut rho = Vec::with_capacity(n_modes);
    let mut w = Vec::with_capacity(n_modes);
    for n in 1..=n_modes {
        let lam = (n * n) as f64;
        let p = -(-lam * dq).exp_m1() / lam;
        rho.push((-lam * dq).exp() + beta * p);
        w.push(p);
    }
    Weights { rho, w }
}

/// Tail data for a horizon of `k` steps.
struct Tail {
    bound: f64,
    required_steps: f64,
}

fn tail_at(req: &XiRequest, grid: &GridSpaceTime, wts: &Weights, m: f64, k: i64) -> Result<Tail> {
    let dq = req.dq;
    let q = wts.rho[0] * (req.delta * dq).exp();
    if !(q < 1.0) {
        return Err(invalid("delta", "tail weight does not decay"));
    }
    let lo = req.path.domain().0;
    let avail = ((-lo) / dq + 1e-9).floor() as i64;
    if avail < k {
        return Err(Error::OutOfDomain {
            t: -(k as f64) * dq,
            lo,
            hi: req.path.domain().1,
        });
    }
    // sup of e^{delta s} z(s) |phi(s + tau)| on the part of the tail the
    // path covers, or on the far half of the window if none is covered
    let (a, b) = if avail > k { (k + 1, avail.min(2 * k)) } else { (k / 2 + 1, k) };
    let mut w_sup = 0.0f64;
    for j in a..=b {
        let s = -(j as f64) * dq;
        let size = grid.sup_norm(s + req.tau);
        if size > 0.0 {
            let z = conj_factor(&req.path, s, req.alpha)?;
            w_sup = w_sup.max((req.delta * s).exp() * z * size);
        }
    }
    if w_sup == 0.0 {
        return Ok(Tail {
            bound: 0.0,
            required_steps: 0.0,
        });
    }
    let c = m * wts.w[0] * w_sup * (req.delta * dq).exp() / (1.0 - q);
    let bound = c * q.powf(k as f64);
    let required_steps = ((req.tol / c).ln() / q.ln()).max(0.0);
    Ok(Tail { bound, required_steps })
}

fn horizon_steps(req: &XiRequest, grid: &GridSpaceTime, wts: &Weights, m: f64) -> Result<(i64, f64)> {
    let dq = req.dq;
    if let Some(s) = req.horizon {
        let k = grid_steps("horizon", s, dq)?;
        let tail = tail_at(req, grid, wts, m, k)?;
        if tail.bound > req.tol {
            return Err(Error::Truncation {
                horizon: s,
                tail: tail.bound,
                tol: req.tol,
                required: (tail.required_steps.ceil()) * dq,
            });
        }
        return Ok((k, tail.bound));
    }
    let avail = ((-req.path.domain().0) / dq + 1e-9).floor() as i64;
    let gap = -(wts.rho[0].ln()) / dq - req.delta;
    let mut k = ((10.0 / gap) / dq).ceil() as i64;
    for _ in 0..40 {
        let k_eval = k.min(avail);
        let tail = tail_at(req, grid, wts, m, k_eval)?;
        if tail.bound <= req.tol {
            return Ok((k_eval, tail.bound));
        }
        let next = (tail.required_steps.ceil() as i64).max(k + k / 4 + 1);
        if k_eval == avail {
            return Err(Error::Truncation {
                horizon: k_eval as f64 * dq,
                tail: tail.bound,
                tol: req.tol,
                required: next as f64 * dq,
            });
        }
        k = next;
    }
    Err(invalid("horizon", "automatic horizon search did not settle"))
}

/// The horizon `S` that `xi` would use for this request.
pub fn auto_horizon(req: &XiRequest) -> Result<f64> {
    req.validate()?;
    let grid = req.phi.on_grid(req.n_modes)?;
    let wts = weights(req.n_modes, req.dq, req.beta);
    let m = req.m()?;
    Ok(horizon_steps(req, &grid, &wts, m)?.0 as f64 * req.dq)
}

/// Evaluates `xi(tau, omega)` by truncated product quadrature.
pub fn xi(req: &XiRequest) -> Result<XiValue> {
    req.validate()?;
    let n = req.n_modes;
    let grid = req.phi.on_grid(n)?;
    let wts = weights(n, req.dq, req.beta);
    let m = req.m()?;
    let (k_max, tail_bound) = horizon_steps(req, &grid, &wts, m)?;

    let mut acc = vec![0.0; n];
    let mut c = vec![0.0; n];
    let mut scratch = vec![0.0; oversampled_points(n)];
    if !grid.is_zero() {
        // Horner sweep from the far end: acc <- rho acc + w z phi_n
        for k in (1..=k_max).rev() {
            let s = -(k as f64) * req.dq;
            let z = conj_factor(&req.path, s, req.alpha)?;
            grid.coeffs(s + req.tau, &mut c, &mut scratch);
            for (((a, r), w), cn) in acc.iter_mut().zip(&wts.rho).zip(&wts.w).zip(&c) {
                *a = *a * r + w * z * cn;
            }
        }
    }
    let field = Field::from_coeffs(acc);
    let min_value = field.oversampled().values.iter().fold(0.0f64, |a, &b| a.min(b));
    let scale = field.sup_norm().max(1.0);
    if min_value < -1e-6 * scale {
        return Err(Error::Invariant {
            what: "nonnegativity of xi",
            detail: format!("grid minimum {min_value:e}"),
        });
    }
    Ok(XiValue {
        field,
        tail_bound,
        tau: req.tau,
        horizon: k_max as f64 * req.dq,
        m_used: m,
        min_value,
        path: req.path.descriptor(),
    })
}

/// Residual of the quasi-solution identity
/// `v~(tau + t, tau, omega^{-tau}, xi(tau, omega)) = xi(tau + t, omega^t)`.
#[derive(Debug, Clone, Serialize)]
pub struct QuasiResidual {
    pub t: f64,
    pub residual: f64,
    pub start: XiValue,
    pub end: XiValue,
}

pub fn verify_quasi_solution(req: &XiRequest, t: f64) -> Result<QuasiResidual> {
    if !(t > 0.0) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    let start = xi(req)?;
    let req_end = req.at(req.tau + t, req.path.translate(t)?);
    let end = xi(&req_end)?;
    let spec = req.linear_spec()?;
    let solver = Solver::new(&spec)?;
    let moved = solver.integrate(&start.field, req.tau, req.tau + t, &req.path.translate(-req.tau)?)?;
    let residual = moved.final_v.sup_distance(&end.field)?;
    Ok(QuasiResidual { t, residual, start, end })
}

/// Initial data for the decay experiment.
#[derive(Debug, Clone)]
pub enum DecayStart {
    /// The same field at every start time.
    Fixed(Field),
    /// `xi(tau - t, omega^{-t})` itself.
    QuasiSolution,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub ladder: Vec<f64>,
    pub distances: Vec<f64>,
    /// Least-squares exponential rate; `+inf` when every distance vanishes.
    pub rate: f64,
}

/// `|v~(tau, tau - t, omega^{-tau}, v_start) - xi(tau, omega)|` along the ladder
/// and its fitted exponential rate.
pub fn verify_decay(start: &DecayStart, req: &XiRequest, ladder: &[f64]) -> Result<DecayFit> {
    if ladder.is_empty() || ladder.iter().any(|&t| !(t > 0.0)) {
        return Err(invalid("ladder", "needs positive times"));
    }
    let target = xi(req)?;
    let spec = req.linear_spec()?;
    let solver = Solver::new(&spec)?;
    let translated = req.path.translate(-req.tau)?;
    let mut distances = Vec::with_capacity(ladder.len());
    for &t in ladder {
        let v0 = match start {
            DecayStart::Fixed(f) => f.clone(),
            DecayStart::QuasiSolution => {
                xi(&req.at(req.tau - t, req.path.translate(-t)?))?.field
            }
        };
        let v = solver.integrate(&v0, req.tau - t, req.tau, &translated)?.final_v;
        distances.push(v.sup_distance(&target.field)?);
    }
    let pts: Vec<(f64, f64)> = ladder
        .iter()
        .zip(&distances)
        .filter(|(_, &d)| d > 1e-12 * target.field.sup_norm().max(1e-300))
        .map(|(&t, &d)| (t, d.ln()))
        .collect();
    let rate = if pts.len() >= 2 { -fit_slope(&pts) } else { f64::INFINITY };
    Ok(DecayFit {
        ladder: ladder.to_vec(),
        distances,
        rate,
    })
}

/// The rate the decay experiment should reproduce.
pub fn predicted_rate(beta: f64) -> f64 {
    LAMBDA1 - beta
}

/// `e^{c r} |xi(tau + r, omega^r)|` along `rs` for one `c`.
#[derive(Debug, Clone, Serialize)]
pub struct TemperedProbe {
    pub c: f64,
    pub rs: Vec<f64>,
    pub values: Vec<f64>,
    /// Strictly decreasing along `rs` (or identically zero).
    pub decreasing: bool,
}

/// Spot check of temperedness at finitely many rates `c` and shifts `r < 0`.
pub fn temperedness_probe(req: &XiRequest, cs: &[f64], rs: &[f64]) -> Result<Vec<TemperedProbe>> {
    let horizon = match req.horizon {
        Some(s) => s,
        None => auto_horizon(req)?,
    };
    let mut norms = Vec::with_capacity(rs.len());
    for &r in rs {
        let v = xi(&req.at(req.tau + r, req.path.translate(r)?).with_horizon(horizon))?;
        norms.push(v.field.sup_norm());
    }
    Ok(cs
        .iter()
        .map(|&c| {
            let values: Vec<f64> = rs.iter().zip(&norms).map(|(&r, &n)| (c * r).exp() * n).collect();
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiener::WienerPath;

    fn steady_request(beta: f64, delta: f64) -> XiRequest {
        let path = WienerPath::zero(-400.0, 50.0, 1e-3).unwrap().view();
        XiRequest {
            tau: 0.0,
            path,
            phi: SpaceTime::steady(|x| x.sin()),
            beta,
            alpha: 0.5,
            delta,
            n_modes: 8,
            dq: 1e-3,
            horizon: None,
            tol: 1e-6,
            m_used: Some(1.3),
        }
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let req = steady_request(0.5, 0.25).with_phi(SpaceTime::zero());
        let v = xi(&req).unwrap();
        assert!(v.field.is_zero());
        assert_eq!(v.tail_bound, 0.0);
    }

    #[test]
    fn steady_state_of_first_mode() {
        let v = xi(&steady_request(0.5, 0.25)).unwrap();
        assert!((v.field.coeffs()[0] - 2.0).abs() < 1e-5, "{:?}", v.field.coeffs());
        assert!(v.tail_bound <= 1e-6);
        assert!(v.field.coeffs()[1..].iter().all(|a| a.abs() < 1e-12));
    }

    #[test]
    fn explicit_horizon_too_short_is_reported() {
        let req = steady_request(0.5, 0.25).with_horizon(2.0);
        match xi(&req) {
            Err(Error::Truncation { required, .. }) => assert!(required > 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
