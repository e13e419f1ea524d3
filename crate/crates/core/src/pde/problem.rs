//! Problem data: space-time coefficients, the nonlinearity with its
//! dissipativity certificate, the forcing, and the discretization.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::spatial::{oversampled_points, SineTransform};

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ReactionFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
/// `(t interval, s interval) -> L`.
pub type LipschitzFn = Arc<dyn Fn((f64, f64), (f64, f64)) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Term {
    Separable { time: TimeFn, profile: ProfileFn },
    General(SpaceTimeFn),
}

/// A coefficient `c(t, x)`, stored as a sum of terms. Separable terms
/// `a(t) b(x)` are cached on the grid once; general terms are sampled at
/// every use.
#[derive(Clone, Default)]
pub struct SpaceTime {
    terms: Vec<Term>,
}

impl fmt::Debug for SpaceTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpaceTime({} terms)", self.terms.len())
    }
}

impl SpaceTime {
    pub fn zero() -> Self {
        SpaceTime::default()
    }

    pub fn constant(c: f64) -> Self {
        if c == 0.0 {
            return SpaceTime::zero();
        }
        SpaceTime::steady(move |_| c)
    }

    /// Time-independent profile `b(x)`.
    pub fn steady(profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SpaceTime::separable(|_| 1.0, profile)
    }

    pub fn separable(
        time: impl Fn(f64) -> f64 + Send + Sync + 'static,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SpaceTime {
            terms: vec![Term::Separable {
                time: Arc::new(time),
                profile: Arc::new(profile),
            }],
        }
    }

    pub fn general(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        SpaceTime {
            terms: vec![Term::General(Arc::new(f))],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, other: &SpaceTime) -> SpaceTime {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SpaceTime { terms }
    }

    pub fn scaled(&self, c: f64) -> SpaceTime {
        if c == 0.0 {
            return SpaceTime::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                Term::Separable { time, profile } => {
                    let time = time.clone();
                    Term::Separable {
                        time: Arc::new(move |s| c * time(s)),
                        profile: profile.clone(),
                    }
                }
                Term::General(f) => {
                    let f = f.clone();
                    Term::General(Arc::new(move |s, x| c * f(s, x)))
                }
            })
            .collect();
        SpaceTime { terms }
    }

    /// Pointwise `|c(t, x)|`. Stays separable when there is a single
    /// separable term.
    pub fn abs(&self) -> SpaceTime {
        match self.terms.as_slice() {
            [] => SpaceTime::zero(),
            [Term::Separable { time, profile }] => {
                let (time, profile) = (time.clone(), profile.clone());
                SpaceTime::separable(move |t| time(t).abs(), move |x| profile(x).abs())
            }
            _ => {
                let me = self.clone();
                SpaceTime::general(move |t, x| me.eval(t, x).abs())
            }
        }
    }

    /// Translation in time: `c^r(t, x) = c(t + r, x)`.
    pub fn translated(&self, r: f64) -> SpaceTime {
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                Term::Separable { time, profile } => {
                    let time = time.clone();
                    Term::Separable {
                        time: Arc::new(move |s| time(s + r)),
                        profile: profile.clone(),
                    }
                }
                Term::General(f) => {
                    let f = f.clone();
                    Term::General(Arc::new(move |s, x| f(s + r, x)))
                }
            })
            .collect();
        SpaceTime { terms }
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| match term {
                Term::Separable { time, profile } => time(t) * profile(x),
                Term::General(f) => f(t, x),
            })
            .sum()
    }

    /// Grid evaluator for `n_modes` modes on the oversampled grid.
    pub fn on_grid(&self, n_modes: usize) -> Result<GridSpaceTime> {
        GridSpaceTime::new(self, n_modes)
    }
}

enum GridTerm {
    Separable {
        time: TimeFn,
        values: Vec<f64>,
        coeffs: Vec<f64>,
        sup: f64,
    },
    General(SpaceTimeFn),
}

/// A [`SpaceTime`] bound to a grid, with separable profiles pre-sampled.
pub struct GridSpaceTime {
    terms: Vec<GridTerm>,
    tr: Arc<SineTransform>,
}

impl GridSpaceTime {
    fn new(st: &SpaceTime, n_modes: usize) -> Result<Self> {
        let tr = SineTransform::get(n_modes, oversampled_points(n_modes))?;
        let terms = st
            .terms
            .iter()
            .map(|t| match t {
                Term::Separable { time, profile } => {
                    let values: Vec<f64> = tr.nodes().iter().map(|&x| profile(x)).collect();
                    let mut coeffs = vec![0.0; n_modes];
                    tr.analyze(&values, &mut coeffs);
                    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    GridTerm::Separable {
                        time: time.clone(),
                        values,
                        coeffs,
                        sup,
                    }
                }
                Term::General(f) => GridTerm::General(f.clone()),
            })
            .collect();
        Ok(GridSpaceTime { terms, tr })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `out[j] += scale * c(t, x_j)`.
    pub fn accumulate(&self, t: f64, scale: f64, out: &mut [f64]) {
        for term in &self.terms {
            match term {
                GridTerm::Separable { time, values, .. } => {
                    let a = scale * time(t);
                    if a != 0.0 {
                        for (o, v) in out.iter_mut().zip(values) {
                            *o += a * v;
                        }
                    }
                }
                GridTerm::General(f) => {
                    for (o, &x) in out.iter_mut().zip(self.tr.nodes()) {
                        *o += scale * f(t, x);
                    }
                }
            }
        }
    }

    /// Sine coefficients of `c(t, .)`; `scratch` must have grid length.
    pub fn coeffs(&self, t: f64, out: &mut [f64], scratch: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut has_general = false;
        for term in &self.terms {
            match term {
                GridTerm::Separable { time, coeffs, .. } => {
                    let a = time(t);
                    for (o, c) in out.iter_mut().zip(coeffs) {
                        *o += a * c;
                    }
                }
                GridTerm::General(_) => has_general = true,
            }
        }
        if has_general {
            scratch.iter_mut().for_each(|s| *s = 0.0);
            for term in &self.terms {
                if let GridTerm::General(f) = term {
                    for (s, &x) in scratch.iter_mut().zip(self.tr.nodes()) {
                        *s += f(t, x);
                    }
                }
            }
            let mut extra = vec![0.0; out.len()];
            self.tr.analyze(scratch, &mut extra);
            for (o, e) in out.iter_mut().zip(extra) {
                *o += e;
            }
        }
    }

    /// `max_j |c(t, x_j)|`.
    pub fn sup_norm(&self, t: f64) -> f64 {
        match self.terms.as_slice() {
            [] => 0.0,
            [GridTerm::Separable { time, sup, .. }] => time(t).abs() * sup,
            _ => {
                let mut buf = vec![0.0; self.tr.n_points()];
                self.accumulate(t, 1.0, &mut buf);
                buf.iter().fold(0.0, |m, v| m.max(v.abs()))
            }
        }
    }
}

/// The reaction term `f(t, x, s)` together with the data of its
/// dissipativity bound `f(t,x,s) s <= beta s^2 + h(t,x) |s|`.
#[derive(Clone)]
pub struct Nonlinearity {
    eval: ReactionFn,
    lipschitz: LipschitzFn,
    beta: f64,
    h: SpaceTime,
    label: String,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("label", &self.label)
            .field("beta", &self.beta)
            .finish()
    }
}

/// First Dirichlet eigenvalue on `(0, pi)`.
pub const LAMBDA1: f64 = 1.0;

impl Nonlinearity {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        lipschitz: impl Fn((f64, f64), (f64, f64)) -> f64 + Send + Sync + 'static,
        beta: f64,
        h: SpaceTime,
    ) -> Result<Self> {
        if !(beta > 0.0 && beta < LAMBDA1) {
            return Err(invalid("beta", format!("need 0 < beta < 1, got {beta}")));
        }
        Ok(Nonlinearity {
            eval: Arc::new(eval),
            lipschitz: Arc::new(lipschitz),
            beta,
            h,
            label: label.into(),
        })
    }

    /// `f = 0`, declared with the given `beta` and `h = 0`.
    pub fn zero(beta: f64) -> Result<Self> {
        Nonlinearity::new("zero", |_, _, _| 0.0, |_, _| 0.0, beta, SpaceTime::zero())
    }

    /// `f(s) = coef s`; requires `coef <= beta`.
    pub fn linear(coef: f64, beta: f64) -> Result<Self> {
        if coef > beta {
            return Err(invalid(
                "coef",
                format!("linear coefficient {coef} exceeds beta {beta}"),
            ));
        }
        Nonlinearity::new(
            format!("linear({coef})"),
            move |_, _, s| coef * s,
            move |_, _| coef.abs(),
            beta,
            SpaceTime::zero(),
        )
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64, s: f64) -> f64 {
        (self.eval)(t, x, s)
    }

    pub fn lipschitz_bound(&self, t_range: (f64, f64), s_range: (f64, f64)) -> f64 {
        (self.lipschitz)(t_range, s_range)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn h(&self) -> &SpaceTime {
        &self.h
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn eval_fn(&self) -> &ReactionFn {
        &self.eval
    }

    /// Randomized check of `f(t,x,0) = 0`, the dissipativity bound and the
    /// declared Lipschitz bound on `[t_lo, t_hi] x (0, pi) x [-s_max, s_max]`.
    pub fn check(&self, t_range: (f64, f64), s_max: f64, samples: usize, seed: u64) -> NonlinearityReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lip = self.lipschitz_bound(t_range, (-s_max, s_max));
        let mut rep = NonlinearityReport::default();
        for _ in 0..samples {
            let t = rng.gen_range(t_range.0..=t_range.1);
            let x = rng.gen_range(0.0..PI);
            let s1 = rng.gen_range(-s_max..=s_max);
            let s2 = rng.gen_range(-s_max..=s_max);
            rep.zero_violation = rep.zero_violation.max(self.eval(t, x, 0.0).abs());
            for s in [s1, s2] {
                let lhs = self.eval(t, x, s) * s;
                let rhs = self.beta * s * s + self.h.eval(t, x) * s.abs();
                rep.dissipativity_violation = rep.dissipativity_violation.max(lhs - rhs);
            }
            let df = (self.eval(t, x, s1) - self.eval(t, x, s2)).abs();
            rep.lipschitz_violation = rep.lipschitz_violation.max(df - lip * (s1 - s2).abs());
        }
        rep.samples = samples;
        rep
    }
}

/// Largest observed violations; all should be `<= 0` up to rounding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct NonlinearityReport {
    pub samples: usize,
    pub zero_violation: f64,
    pub dissipativity_violation: f64,
    pub lipschitz_violation: f64,
}

impl NonlinearityReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.zero_violation <= tol && self.dissipativity_violation <= tol && self.lipschitz_violation <= tol
    }
}

/// External forcing `g` and the weight `delta` of the temperedness condition.
#[derive(Clone, Debug)]
pub struct Forcing {
    pub g: SpaceTime,
    /// `0 < delta < lambda_1 - beta`.
    pub delta: f64,
}

impl Forcing {
    pub fn zero() -> Self {
        Forcing {
            g: SpaceTime::zero(),
            delta: 0.25,
        }
    }

    pub fn new(g: SpaceTime, delta: f64) -> Self {
        Forcing { g, delta }
    }
}

/// Default blow-up guard on the sup-norm of `u`.
pub const DEFAULT_GUARD: f64 = 1e6;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_MODES: usize = 64;

/// Full problem data for one pathwise run.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub nonlinearity: Nonlinearity,
    pub forcing: Forcing,
    pub n_modes: usize,
    pub dt: f64,
    pub guard: f64,
}

impl ProblemSpec {
    pub fn new(alpha: f64, nonlinearity: Nonlinearity, forcing: Forcing) -> Self {
        ProblemSpec {
            alpha,
            nonlinearity,
            forcing,
            n_modes: DEFAULT_MODES,
            dt: DEFAULT_DT,
            guard: DEFAULT_GUARD,
        }
    }

    pub fn with_modes(mut self, n: usize) -> Self {
        self.n_modes = n;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn beta(&self) -> f64 {
        self.nonlinearity.beta()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", format!("must be finite and >= 0, got {}", self.alpha)));
        }
        if self.n_modes == 0 {
            return Err(invalid("n_modes", "must be positive"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        let gap = LAMBDA1 - self.beta();
        if !(self.forcing.delta > 0.0 && self.forcing.delta < gap) {
            return Err(invalid(
                "delta",
                format!("need 0 < delta < lambda - beta = {gap}, got {}", self.forcing.delta),
            ));
        }
        if !(self.guard > 0.0) {
            return Err(invalid("guard", "must be positive"));
        }
        Ok(())
    }

    /// The forcing `h + |g|` of the linear comparison problem.
    pub fn comparison_forcing(&self) -> SpaceTime {
        self.nonlinearity.h().plus(&self.forcing.g.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_abs_stays_separable() {
        let g = SpaceTime::separable(|t| -t, |x| x.sin() - 0.5);
        let a = g.abs();
        assert!((a.eval(2.0, 0.1) - (2.0 * (0.1f64.sin() - 0.5)).abs()).abs() < 1e-15);
        assert_eq!(a.terms.len(), 1);
        assert!(matches!(a.terms[0], Term::Separable { .. }));
    }

    #[test]
    fn grid_coeffs_of_steady_sine() {
        let g = SpaceTime::steady(|x| x.sin()).on_grid(8).unwrap();
        let mut c = vec![0.0; 8];
        let mut scratch = vec![0.0; 32];
        g.coeffs(3.0, &mut c, &mut scratch);
        assert!((c[0] - 1.0).abs() < 1e-14);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-14));
        // grid maximum: the 32-point grid misses pi/2 by half a cell
        let h = std::f64::consts::PI / 33.0;
        assert!((g.sup_norm(0.0) - (h / 2.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn general_terms_project() {
        let g = SpaceTime::general(|t, x| t * (2.0 * x).sin()).on_grid(8).unwrap();
        let mut c = vec![0.0; 8];
        let mut scratch = vec![0.0; 32];
        g.coeffs(0.5, &mut c, &mut scratch);
        assert!((c[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn linear_nonlinearity_checks() {
        let nl = Nonlinearity::linear(0.5, 0.5).unwrap();
        let rep = nl.check((-5.0, 5.0), 10.0, 2000, 1);
        assert!(rep.passed(1e-12), "{rep:?}");
        assert!(Nonlinearity::linear(0.8, 0.5).is_err());
        assert!(Nonlinearity::zero(1.2).is_err());
    }

    #[test]
    fn check_detects_bad_declaration() {
        // f = s claims beta = 0.5 with h = 0: dissipativity fails
        let nl = Nonlinearity::new("bad", |_, _, s| s, |_, _| 1.0, 0.5, SpaceTime::zero()).unwrap();
        let rep = nl.check((0.0, 1.0), 2.0, 200, 3);
        assert!(rep.dissipativity_violation > 0.0);
    }

    #[test]
    fn spec_validation() {
        let spec = ProblemSpec::new(0.5, Nonlinearity::zero(0.5).unwrap(), Forcing::zero());
        assert!(spec.validate().is_ok());
        let mut bad = spec.clone();
        bad.forcing.delta = 0.6;
        assert!(bad.validate().is_err());
        let mut bad = spec;
        bad.dt = 0.0;
        assert!(bad.validate().is_err());
    }
}
