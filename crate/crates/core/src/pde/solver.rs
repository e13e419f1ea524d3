//! Exponential-Euler integration of the conjugated random PDE
//!
//! ```text
//! dv/dt = Delta v + z(t) f(t, x, v / z(t)) + z(t) g(t, x),   z = exp(-alpha omega)
//! ```
//!
//! and the cocycle `Phi` of the Stratonovich equation obtained by undoing the
//! conjugation. The Laplacian is integrated exactly per mode; the reaction
//! and forcing are frozen at the left node of each step and evaluated on the
//! 4x oversampled grid. The noise enters only through `z` at grid nodes.

use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pde::problem::{GridSpaceTime, ProblemSpec};
use crate::spatial::{oversampled_points, Field, SineTransform};
use crate::wiener::{conj_factor, grid_steps, NoisePath, PathDescriptor, ShiftedPath};

pub const SCHEME: &str = "etd1";

/// Scratch buffers for one step.
struct Workspace {
    grid: Vec<f64>,
    rhs: Vec<f64>,
    ncoef: Vec<f64>,
}

/// Step machinery bound to one problem.
pub struct Solver<'a> {
    spec: &'a ProblemSpec,
    tr: Arc<SineTransform>,
    decay: Vec<f64>,
    phi1: Vec<f64>,
    g: GridSpaceTime,
}

impl<'a> Solver<'a> {
    pub fn new(spec: &'a ProblemSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n_modes;
        let tr = SineTransform::get(n, oversampled_points(n))?;
        let dt = spec.dt;
        let mut decay = Vec::with_capacity(n);
        let mut phi1 = Vec::with_capacity(n);
        for k in 1..=n {
            let lam = (k * k) as f64;
            let e = (-lam * dt).exp();
            decay.push(e);
            // (1 - e^{-lam dt}) / lam without cancellation for small lam dt
            phi1.push(-(-lam * dt).exp_m1() / lam);
        }
        let g = spec.forcing.g.on_grid(n)?;
        Ok(Solver {
            spec,
            tr,
            decay,
            phi1,
            g,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        self.spec
    }

    fn workspace(&self) -> Workspace {
        Workspace {
            grid: vec![0.0; self.tr.n_points()],
            rhs: vec![0.0; self.tr.n_points()],
            ncoef: vec![0.0; self.tr.n_modes()],
        }
    }

    fn check_path<P: NoisePath + ?Sized>(&self, path: &P) -> Result<()> {
        let ratio = grid_steps("dt", self.spec.dt, path.dt())?;
        if ratio < 1 {
            return Err(Error::NotAligned {
                what: "dt",
                value: self.spec.dt,
                dt: path.dt(),
            });
        }
        Ok(())
    }

    /// Advances `v` from `t` to `t + dt`. Returns `max |u|` at time `t`.
    fn step<P: NoisePath + ?Sized>(&self, v: &mut [f64], t: f64, path: &P, ws: &mut Workspace) -> Result<f64> {
        let z = conj_factor(path, t, self.spec.alpha)?;
        let zi = 1.0 / z;
        let f = self.spec.nonlinearity.eval_fn();
        self.tr.synthesize(v, &mut ws.grid);
        let mut umax = 0.0f64;
        for ((r, &vj), &x) in ws.rhs.iter_mut().zip(&ws.grid).zip(self.tr.nodes()) {
            let u = vj * zi;
            umax = umax.max(u.abs());
            *r = z * f(t, x, u);
        }
        if !(umax <= self.spec.guard) {
            return Err(Error::GuardExceeded {
                t,
                sup_norm: umax,
                guard: self.spec.guard,
            });
        }
        if !self.g.is_zero() {
            self.g.accumulate(t, z, &mut ws.rhs);
        }
        self.tr.analyze(&ws.rhs, &mut ws.ncoef);
        for ((vk, (d, p)), n) in v.iter_mut().zip(self.decay.iter().zip(&self.phi1)).zip(&ws.ncoef) {
            *vk = d * *vk + p * n;
        }
        Ok(umax)
    }

    /// Integrates `v` over `[t0, t1]`, calling `frame(n, t, v, z)` at step
    /// 0, every `every` steps and at the final step.
    pub fn integrate_with<P, F>(&self, v0: &Field, t0: f64, t1: f64, path: &P, every: usize, mut frame: F) -> Result<RunStats>
    where
        P: NoisePath + ?Sized,
        F: FnMut(usize, f64, &[f64], f64),
    {
        self.check_path(path)?;
        if v0.n_modes() != self.spec.n_modes {
            return Err(Error::SizeMismatch(format!(
                "initial field has {} modes, problem has {}",
                v0.n_modes(),
                self.spec.n_modes
            )));
        }
        let dt = self.spec.dt;
        let n_steps = grid_steps("t_end - tau", t1 - t0, dt)?;
        if n_steps < 0 {
            return Err(crate::error::invalid("t_end", format!("t_end {t1} precedes tau {t0}")));
        }
        let n_steps = n_steps as usize;
        let every = every.max(1);
        let mut v = v0.coeffs().to_vec();
        let mut ws = self.workspace();
        let mut max_u = 0.0f64;
        frame(0, t0, &v, conj_factor(path, t0, self.spec.alpha)?);
        for n in 0..n_steps {
            let t = t0 + n as f64 * dt;
            max_u = max_u.max(self.step(&mut v, t, path, &mut ws)?);
            let k = n + 1;
            if k % every == 0 || k == n_steps {
                frame(k, t0 + k as f64 * dt, &v, conj_factor(path, t0 + k as f64 * dt, self.spec.alpha)?);
            }
        }
        // guard on the final state as well
        let z1 = conj_factor(path, t1, self.spec.alpha)?;
        self.tr.synthesize(&v, &mut ws.grid);
        let last = ws.grid.iter().fold(0.0f64, |m, x| m.max(x.abs())) / z1;
        if !(last <= self.spec.guard) {
            return Err(Error::GuardExceeded {
                t: t1,
                sup_norm: last,
                guard: self.spec.guard,
            });
        }
        max_u = max_u.max(last);
        Ok(RunStats {
            steps: n_steps,
            max_sup_u: max_u,
            final_v: Field::from_coeffs(v),
        })
    }

    /// Final state only.
    pub fn integrate<P: NoisePath + ?Sized>(&self, v0: &Field, t0: f64, t1: f64, path: &P) -> Result<RunStats> {
        self.integrate_with(v0, t0, t1, path, usize::MAX, |_, _, _, _| {})
    }
}

#[derive(Debug, Clone)]
pub struct RunStats {
    pub steps: usize,
    pub max_sup_u: f64,
    pub final_v: Field,
}

/// Time series of `v` produced by the pathwise solver.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub tau: f64,
    pub t_end: f64,
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    /// Conjugated states `v(t)`.
    pub v: Vec<Field>,
    /// `z(t)` at the frame times, so `u = v / z`.
    pub z: Vec<f64>,
    pub path: PathDescriptor,
    pub scheme: &'static str,
    pub max_sup_u: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn u(&self, i: usize) -> Field {
        self.v[i].scaled(1.0 / self.z[i])
    }

    pub fn final_v(&self) -> &Field {
        self.v.last().expect("trajectory has at least one frame")
    }

    pub fn final_u(&self) -> Field {
        self.u(self.len() - 1)
    }

    pub fn u_frames(&self) -> impl Iterator<Item = (f64, Field)> + '_ {
        (0..self.len()).map(move |i| (self.times[i], self.u(i)))
    }

    /// Long-form CSV `t,x,u` on the oversampled grid.
    pub fn write_long_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,x,u")?;
        for (t, u) in self.u_frames() {
            let g = u.oversampled();
            for (x, val) in g.nodes().zip(&g.values) {
                writeln!(w, "{t},{x},{val}")?;
            }
        }
        Ok(())
    }

    /// Per-time coefficient CSV `t,n,a_n` of `u`.
    pub fn write_coeff_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,n,a_n")?;
        for (t, u) in self.u_frames() {
            for (n, a) in u.coeffs().iter().enumerate() {
                writeln!(w, "{t},{},{a}", n + 1)?;
            }
        }
        Ok(())
    }
}

/// One exponential-Euler step of the `v` equation from `t`.
pub fn step_v<P: NoisePath + ?Sized>(v: &Field, t: f64, path: &P, spec: &ProblemSpec) -> Result<Field> {
    let solver = Solver::new(spec)?;
    solver.check_path(path)?;
    let mut ws = solver.workspace();
    let mut out = v.coeffs().to_vec();
    solver.step(&mut out, t, path, &mut ws)?;
    Ok(Field::from_coeffs(out))
}

/// Integrates the `v` equation over `[tau, t_end]`, keeping every
/// `record_every`-th state.
pub fn solve_v<P: NoisePath + ?Sized>(
    v_tau: &Field,
    tau: f64,
    t_end: f64,
    path: &P,
    spec: &ProblemSpec,
    record_every: usize,
) -> Result<Trajectory> {
    let solver = Solver::new(spec)?;
    let mut times = Vec::new();
    let mut v = Vec::new();
    let mut z = Vec::new();
    let stats = solver.integrate_with(v_tau, tau, t_end, path, record_every, |_, t, coeffs, zt| {
        times.push(t);
        v.push(Field::from_coeffs(coeffs.to_vec()));
        z.push(zt);
    })?;
    Ok(Trajectory {
        tau,
        t_end,
        dt: spec.dt,
        steps: stats.steps,
        times,
        v,
        z,
        path: path.descriptor(),
        scheme: SCHEME,
        max_sup_u: stats.max_sup_u,
    })
}

/// Solves the original equation `u(t, tau, omega, u_tau)` along the given
/// path (no re-anchoring), via `v_tau = z(tau) u_tau`.
pub fn solve_u<P: NoisePath + ?Sized>(
    u_tau: &Field,
    tau: f64,
    t_end: f64,
    path: &P,
    spec: &ProblemSpec,
    record_every: usize,
) -> Result<Trajectory> {
    let z0 = conj_factor(path, tau, spec.alpha)?;
    solve_v(&u_tau.scaled(z0), tau, t_end, path, spec, record_every)
}

/// The cocycle `Phi(t, tau, omega, u_tau) = u(t + tau, tau, theta_{-tau} omega, u_tau)`.
pub fn cocycle_phi(t: f64, tau: f64, path: &ShiftedPath, u_tau: &Field, spec: &ProblemSpec) -> Result<Field> {
    if t == 0.0 {
        return Ok(u_tau.clone());
    }
    let solver = Solver::new(spec)?;
    cocycle_with(&solver, t, tau, path, u_tau)
}

pub(crate) fn cocycle_with(solver: &Solver<'_>, t: f64, tau: f64, path: &ShiftedPath, u_tau: &Field) -> Result<Field> {
    if t < 0.0 {
        return Err(crate::error::invalid("t", format!("cocycle time must be >= 0, got {t}")));
    }
    let alpha = solver.spec().alpha;
    let p = path.shift(-tau)?;
    let z0 = conj_factor(&p, tau, alpha)?;
    let stats = solver.integrate(&u_tau.scaled(z0), tau, tau + t, &p)?;
    let z1 = conj_factor(&p, tau + t, alpha)?;
    Ok(stats.final_v.scaled(1.0 / z1))
}

/// Pullback state `Phi(t, tau - t, theta_{-t} omega, u0)`, the solution at
/// time `tau` started at `tau - t`.
pub fn pullback_state(t: f64, tau: f64, path: &ShiftedPath, u0: &Field, spec: &ProblemSpec) -> Result<Field> {
    cocycle_phi(t, tau - t, &path.shift(-t)?, u0, spec)
}

pub(crate) fn pullback_with(solver: &Solver<'_>, t: f64, tau: f64, path: &ShiftedPath, u0: &Field) -> Result<Field> {
    if t == 0.0 {
        return Ok(u0.clone());
    }
    cocycle_with(solver, t, tau - t, &path.shift(-t)?, u0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::problem::{Forcing, Nonlinearity, SpaceTime};
    use crate::wiener::{sample_path, WienerPath};

    fn heat(n: usize) -> ProblemSpec {
        ProblemSpec::new(0.5, Nonlinearity::zero(0.5).unwrap(), Forcing::zero()).with_modes(n)
    }

    #[test]
    fn pure_heat_step_is_exact() {
        let spec = heat(8);
        let w = WienerPath::zero(-1.0, 1.0, spec.dt).unwrap();
        let v = step_v(&Field::mode(8, 1, 1.0), 0.0, &w, &spec).unwrap();
        assert!((v.coeffs()[0] - (-spec.dt).exp()).abs() < 1e-15);
        assert!(v.coeffs()[1..].iter().all(|&a| a == 0.0));
    }

    #[test]
    fn zero_is_fixed() {
        let spec = heat(8);
        let w = sample_path(1, -1.0, 1.0, spec.dt).unwrap();
        let v = step_v(&Field::zeros(8), 0.2, &w, &spec).unwrap();
        assert!(v.is_zero());
        let tr = solve_v(&Field::zeros(8), 0.0, 0.5, &w, &spec, 100).unwrap();
        assert!(tr.v.iter().all(Field::is_zero));
    }

    #[test]
    fn steady_forcing_reaches_inverse_laplacian() {
        let mut spec = heat(8);
        spec.forcing = Forcing::new(SpaceTime::steady(|x| x.sin()), 0.25);
        spec.dt = 1e-2;
        let w = WienerPath::zero(-1.0, 40.0, spec.dt).unwrap();
        let tr = solve_v(&Field::zeros(8), 0.0, 40.0, &w, &spec, 1000).unwrap();
        let a = tr.final_v().coeffs();
        assert!((a[0] - 1.0).abs() < 1e-12, "{}", a[0]);
    }

    #[test]
    fn linear_growth_rate() {
        let spec = ProblemSpec::new(0.5, Nonlinearity::linear(0.5, 0.5).unwrap(), Forcing::zero()).with_modes(16);
        let w = WienerPath::zero(-1.0, 2.0, spec.dt).unwrap();
        let tr = solve_v(&Field::mode(16, 1, 1.0), 0.0, 2.0, &w, &spec, 100).unwrap();
        let s = tr.final_u().sup_norm();
        assert!((s / (-1.0f64).exp() - 1.0).abs() < 0.02, "{s}");
    }

    #[test]
    fn misaligned_inputs_rejected() {
        let spec = heat(8);
        let coarse = WienerPath::zero(-1.0, 1.0, 0.01).unwrap();
        // solver dt 1e-3 is finer than the path grid
        assert!(solve_v(&Field::zeros(8), 0.0, 0.5, &coarse, &spec, 1).is_err());
        let w = WienerPath::zero(-1.0, 1.0, 1e-3).unwrap();
        assert!(solve_v(&Field::zeros(4), 0.0, 0.5, &w, &spec, 1).is_err());
        assert!(solve_v(&Field::zeros(8), 0.0, 2.0, &w, &spec, 1).is_err());
    }

    #[test]
    fn guard_trips_on_explosive_declaration() {
        // f = 3 s with a false beta declaration grows like e^{2t}
        let nl = Nonlinearity::new("explosive", |_, _, s| 3.0 * s, |_, _| 3.0, 0.5, SpaceTime::zero()).unwrap();
        let mut spec = ProblemSpec::new(0.0, nl, Forcing::zero()).with_modes(8);
        spec.guard = 10.0;
        let w = WienerPath::zero(-1.0, 5.0, spec.dt).unwrap();
        let err = solve_v(&Field::mode(8, 1, 1.0), 0.0, 5.0, &w, &spec, 1000).unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { .. }), "{err}");
    }

    #[test]
    fn cocycle_identity_at_zero_time() {
        let spec = heat(8);
        let w = sample_path(4, -3.0, 3.0, spec.dt).unwrap();
        let u = Field::from_coeffs(vec![0.1, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, -0.3]);
        assert_eq!(cocycle_phi(0.0, 1.0, &w.view(), &u, &spec).unwrap(), u);
    }
}
