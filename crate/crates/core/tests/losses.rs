use advcal_core::grid::TGrid;
use advcal_core::hypothesis::MarginPair;
use advcal_core::loss::{cbar_interval_inf, verify_loss_properties, Label, MarginLoss, Props};
use advcal_core::Error;
use proptest::prelude::*;

fn rho(r: f64) -> MarginLoss {
    MarginLoss::rho_margin(r).unwrap()
}

/// Ramp written out by cases, independent of the library's clamp.
fn ramp(r: f64, t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else if t >= r {
        0.0
    } else {
        1.0 - t / r
    }
}

fn grid_min(f: impl Fn(f64) -> f64, l: f64, u: f64, n: usize) -> f64 {
    (0..n).map(|i| f(l + (u - l) * i as f64 / (n - 1) as f64)).fold(f64::INFINITY, f64::min)
}

#[test]
fn point_values() {
    assert_eq!(rho(2.0).eval(1.0), 0.5);
    assert_eq!(rho(1.0).eval(-0.3), 1.0);
    assert_eq!(MarginLoss::hinge().eval(0.0), 1.0);
    assert!(matches!(MarginLoss::rho_margin(0.0), Err(Error::InvalidLoss(_))));
    assert!(matches!(MarginLoss::rho_margin(-1.0), Err(Error::InvalidLoss(_))));
}

#[test]
fn sup_values() {
    let m = |a, b| MarginPair::closed_form(a, b);
    assert!((MarginLoss::hinge().sup_value(m(-0.2, 0.4), Label::Pos).unwrap() - 1.2).abs() < 1e-15);
    assert_eq!(rho(1.0).sup_value(m(0.3, 0.7), Label::Neg).unwrap(), 1.0);
    assert_eq!(rho(1.0).sup_value(m(0.0, 0.0), Label::Pos).unwrap(), 1.0);
    let bump = MarginLoss::custom_table(vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)], Props::default()).unwrap();
    assert!(matches!(bump.sup_value(m(0.0, 0.1), Label::Pos), Err(Error::UnsupportedReduction(_))));
}

#[test]
fn two_point_risk_values() {
    assert!((rho(1.0).cbar(0.5, 0.5).unwrap() - 0.75).abs() < 1e-15);
    for r in [0.3, 1.0, 4.0] {
        for eta in [0.0, 0.2, 0.9] {
            assert_eq!(rho(r).cbar(0.0, eta).unwrap(), 1.0);
        }
    }
    assert!((MarginLoss::hinge().cbar(0.3, 1.0).unwrap() - 0.7).abs() < 1e-15);
    assert!(matches!(rho(1.0).cbar(0.0, 1.5), Err(Error::Domain(_))));
}

#[test]
fn interval_infima() {
    let r = cbar_interval_inf(&rho(1.0), -0.9, 0.2, 0.5).unwrap();
    assert!((r.value - 0.55).abs() < 1e-12 && r.exact);
    let oracle = grid_min(|t| 0.5 * ramp(1.0, t) + 0.5 * ramp(1.0, -t), -0.9, 0.2, 10_000);
    assert!((r.value - oracle).abs() < 1e-6);
    let c = cbar_interval_inf(&MarginLoss::logistic(), 0.4, 0.4, 0.3).unwrap();
    assert_eq!(c.value, MarginLoss::logistic().cbar(0.4, 0.3).unwrap());
    assert!((cbar_interval_inf(&rho(2.0), -0.2, 0.2, 0.5).unwrap().value - 0.95).abs() < 1e-12);
    assert!(matches!(cbar_interval_inf(&rho(1.0), 0.3, 0.2, 0.5), Err(Error::Domain(_))));
    // Hinge is not quasi-concave even, so the dense fallback is used.
    assert!(!cbar_interval_inf(&MarginLoss::hinge(), -1.0, 1.0, 0.3).unwrap().exact);
}

#[test]
fn property_reports() {
    let r = verify_loss_properties(&rho(1.0), &TGrid::STANDARD);
    assert!(r.quasi_concave_even() && r.bounded.passed && r.non_increasing.passed && r.continuous.passed);
    assert!(!r.convex.passed);
    let h = verify_loss_properties(&MarginLoss::hinge(), &TGrid::STANDARD);
    assert!(h.convex.passed && !h.quasi_concave_even() && !h.bounded.passed);
    let e = verify_loss_properties(&MarginLoss::exponential(), &TGrid::STANDARD);
    assert!(e.convex.passed && e.non_increasing.passed);
    let z = verify_loss_properties(&MarginLoss::zero_one(), &TGrid::STANDARD);
    assert!(!z.continuous.passed && z.non_increasing.passed);
}

#[test]
fn custom_tables() {
    let ramp_table = vec![(0.0, 1.0), (2.0, 0.0)];
    let declared = Props { non_increasing: true, bounded: true, continuous: true, quasi_concave_even: true, convex: false };
    let t = MarginLoss::custom_table(ramp_table, declared).unwrap();
    for x in [-3.0, -0.5, 0.0, 0.7, 1.9, 2.0, 5.0] {
        assert!((t.eval(x) - rho(2.0).eval(x)).abs() < 1e-15);
    }
    let lying = Props { convex: true, ..declared };
    assert!(matches!(MarginLoss::custom_table(vec![(0.0, 1.0), (2.0, 0.0)], lying), Err(Error::InvalidLoss(_))));
    assert!(MarginLoss::custom_table(vec![(0.0, -1.0)], Props::default()).is_err());
    assert!(MarginLoss::custom_table(vec![(1.0, 1.0), (0.0, 1.0)], Props::default()).is_err());
}

fn any_loss() -> impl Strategy<Value = MarginLoss> {
    prop_oneof![
        (0.05f64..4.0).prop_map(rho),
        Just(MarginLoss::hinge()),
        Just(MarginLoss::logistic()),
        Just(MarginLoss::exponential()),
        Just(MarginLoss::zero_one()),
    ]
}

proptest! {
    #[test]
    fn losses_are_nonnegative(loss in any_loss(), t in -50.0f64..50.0) {
        prop_assert!(loss.eval(t) >= 0.0);
    }

    #[test]
    fn ramp_matches_cases(r in 0.05f64..4.0, t in -5.0f64..5.0) {
        prop_assert!((rho(r).eval(t) - ramp(r, t)).abs() < 1e-15);
    }

    #[test]
    fn half_risk_is_even(loss in any_loss(), t in -5.0f64..5.0) {
        prop_assert!((loss.cbar(t, 0.5).unwrap() - loss.cbar(-t, 0.5).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ramp_risk_decreases_right_of_zero(r in 0.05f64..4.0, eta in 0.5f64..=1.0, a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let (t1, t2) = if a <= b { (a, b) } else { (b, a) };
        let l = rho(r);
        prop_assert!(l.cbar(t1, eta).unwrap() >= l.cbar(t2, eta).unwrap() - 1e-9);
    }

    #[test]
    fn endpoint_rule_matches_dense_grid(r in 0.05f64..4.0, eta in 0.0f64..=1.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let (l, u) = if a <= b { (a, b) } else { (b, a) };
        let got = cbar_interval_inf(&rho(r), l, u, eta).unwrap();
        let oracle = grid_min(|t| eta * ramp(r, t) + (1.0 - eta) * ramp(r, -t), l, u, 10_000);
        prop_assert!(got.exact);
        prop_assert!(got.value <= oracle + 1e-12);
        prop_assert!((got.value - oracle).abs() < 1e-6);
    }
}
