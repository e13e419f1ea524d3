//! Invariants checked on randomly drawn configurations.

use proptest::prelude::*;
use randattr::pde::{conjugation_defect, ProblemSpec};
use randattr::chafee::ChafeeSpec;
use randattr::linear::{xi, XiRequest};
use randattr::pde::SpaceTime;
use randattr::wiener::{refine, NoiseSeed};
use randattr::{Field, NoisePath};

const N: usize = 16;
const DT: f64 = 1e-3;

fn field(coeffs: &[f64]) -> Field {
    let mut c = vec![0.0; N];
    c[..coeffs.len()].copy_from_slice(coeffs);
    Field::from_coeffs(c)
}

fn chafee_spec() -> ProblemSpec {
    ChafeeSpec::new(1.5, 1.0).with_modes(N).with_dt(DT).problem().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shifts_compose(seed in 0u64..1000, a in -5i32..5, b in -5i32..5, t in -10i32..10) {
        let p = NoiseSeed::Seed(seed).path(-30.0, 30.0, DT).unwrap();
        let (a, b, t) = (a as f64 * 0.5, b as f64 * 0.5, t as f64 * 0.25);
        let two = p.shift(a).unwrap().shift(b).unwrap();
        let one = p.shift(a + b).unwrap();
        prop_assert!((two.omega(t).unwrap() - one.omega(t).unwrap()).abs() < 1e-12);
        prop_assert_eq!(one.omega(0.0).unwrap(), 0.0);
    }

    #[test]
    fn refinement_is_consistent(seed in 0u64..1000, factor in 2usize..5) {
        let p = NoiseSeed::Seed(seed).path(-2.0, 2.0, 0.01).unwrap();
        let r = refine(&p, factor).unwrap();
        for k in 0..p.len() {
            prop_assert_eq!(r.values()[factor * k], p.values()[k]);
        }
    }

    #[test]
    fn heat_semigroup_is_a_semigroup(c in prop::collection::vec(-1.0f64..1.0, 1..N), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let u = field(&c);
        let two = u.apply_semigroup(s, 0.3).unwrap().apply_semigroup(t, 0.3).unwrap();
        let one = u.apply_semigroup(s + t, 0.3).unwrap();
        prop_assert!(two.sup_distance(&one).unwrap() <= 1e-13 * (1.0 + one.sup_norm()));
    }

    #[test]
    fn transform_round_trips(c in prop::collection::vec(-1.0f64..1.0, 1..N)) {
        let u = field(&c);
        let back = Field::from_grid(&u.oversampled(), N).unwrap();
        prop_assert!(u.sup_distance(&back).unwrap() < 1e-12);
    }

    #[test]
    fn conjugation_holds(seed in 0u64..1000, c in prop::collection::vec(-1.0f64..1.0, 1..6), t in 1i32..20) {
        let p = NoiseSeed::Seed(seed).path(-5.0, 5.0, DT).unwrap();
        let d = conjugation_defect(t as f64 * 0.1, 0.0, &p, &field(&c), &chafee_spec()).unwrap();
        prop_assert!(d.relative < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn xi_is_linear_in_the_forcing(seed in 0u64..1000, a in 0.1f64..3.0) {
        let path = NoiseSeed::Seed(seed).path(-120.0, 1.0, DT).unwrap();
        let req = XiRequest::from_spec(&chafee_spec(), 0.0, path.view()).with_horizon(100.0);
        let base = xi(&req.clone().with_phi(SpaceTime::steady(f64::sin))).unwrap().field;
        let scaled = xi(&req.with_phi(SpaceTime::steady(f64::sin).scaled(a))).unwrap().field;
        prop_assert!(scaled.sup_distance(&base.scaled(a)).unwrap() <= 1e-12 * scaled.sup_norm());
    }
}
