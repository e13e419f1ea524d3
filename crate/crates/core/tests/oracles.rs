//! Closed-form solutions the numerics must reproduce.

use std::f64::consts::PI;

use randattr::chafee::{galerkin_amplitude, mode_split, steady_state, ChafeeSpec};
use randattr::linear::{xi, XiRequest};
use randattr::pde::{solve_u, Forcing, Nonlinearity, ProblemSpec, SpaceTime};
use randattr::pullback::{absorbing_radius, extremal, LadderOptions, Sign};
use randattr::tolerances as tol;
use randattr::wiener::{NoiseSeed, WienerPath};
use randattr::Field;

const N: usize = 32;
const DT: f64 = 1e-3;

#[test]
fn heat_equation_keeps_its_mode_along_any_path() {
    // f = 0, u0 = sin 3x: u(t) = e^{alpha W(t)} e^{-9 t} sin 3x
    let alpha = 0.7;
    let spec = ProblemSpec::new(alpha, Nonlinearity::zero(0.5).unwrap(), Forcing::zero())
        .with_modes(N)
        .with_dt(DT);
    for seed in [NoiseSeed::Zero, NoiseSeed::Seed(3)] {
        let path = seed.path(-1.0, 2.0, DT).unwrap();
        let traj = solve_u(&Field::mode(N, 3, 1.0), 0.0, 1.0, &path, &spec, usize::MAX).unwrap();
        let want = (alpha * path.interpolate(1.0).unwrap() - 9.0).exp();
        let got = traj.final_u().coeffs()[2];
        assert!((got / want - 1.0).abs() < 1e-10, "{seed}: {got} vs {want}");
    }
}

#[test]
fn xi_of_steady_sine_forcing_is_a_multiple_of_sine() {
    // -v'' - beta v = sin x  =>  v = sin x / (1 - beta)
    for beta in [0.25, 0.5] {
        let req = XiRequest {
            tau: 0.0,
            path: WienerPath::zero(-300.0, 1.0, DT).unwrap().view(),
            phi: SpaceTime::steady(f64::sin),
            beta,
            alpha: 0.5,
            delta: (1.0 - beta) / 2.0,
            n_modes: N,
            dq: DT,
            horizon: None,
            tol: tol::QUADRATURE,
            m_used: None,
        };
        let v = xi(&req).unwrap();
        let err = v.field.sup_distance(&Field::mode(N, 1, 1.0 / (1.0 - beta))).unwrap();
        assert!(err < 1e-6, "beta {beta}: {err}");
    }
}

#[test]
fn radius_for_constant_dissipativity_on_the_zero_path() {
    let c = 0.3;
    let spec = ProblemSpec::new(
        0.5,
        Nonlinearity::new("h-only", |_, _, _| 0.0, |_, _| 0.0, 0.5, SpaceTime::constant(c)).unwrap(),
        Forcing::zero(),
    )
    .with_modes(N)
    .with_dt(DT);
    let path = WienerPath::zero(-200.0, 1.0, DT).unwrap();
    let r = absorbing_radius(0.0, &path.view(), &spec, None, tol::QUADRATURE).unwrap();
    let want = r.m_used * (1.0 + c / 0.5);
    assert!((r.r - want).abs() / want < tol::QUADRATURE);
}

#[test]
fn deterministic_extremal_is_the_positive_steady_state() {
    let c = ChafeeSpec::new(1.5, 1.0).with_modes(N).with_dt(DT);
    let opts = LadderOptions::default();
    let path = c.path(NoiseSeed::Zero, opts.cap, 1.0).unwrap();
    let r = extremal(Sign::Upper, 0.0, &path.view(), &c.problem().unwrap(), &opts).unwrap();
    let oracle = steady_state(&c, 1.0, 60.0).unwrap();
    assert!(r.field.sup_distance(&oracle).unwrap() < 1e-6);
    // the one-mode Galerkin truncation is a 1% estimate at nu = 1.5
    let a1 = mode_split(&r.field).a1;
    assert!((a1 / galerkin_amplitude(1.5, 1.0) - 1.0).abs() < 0.02, "a1 = {a1}");
    assert!(r.field.pointwise_leq(&Field::from_fn(N, |x| 2.0 * x.sin().max(0.0) + PI), 0.0).unwrap());
}

#[test]
fn below_critical_the_extremal_is_trivial() {
    let c = ChafeeSpec::new(0.5, 1.0).with_modes(N).with_dt(DT);
    let opts = c.ladder_options();
    for seed in [NoiseSeed::Zero, NoiseSeed::Seed(7)] {
        let path = c.path(seed, opts.cap, 1.0).unwrap();
        let r = extremal(Sign::Upper, 0.0, &path.view(), &c.problem().unwrap(), &opts).unwrap();
        assert!(r.field.sup_norm() < tol::TRIVIAL_AMPLITUDE, "{seed}");
    }
}
