use advcal_core::grid::ParamGridSpec;
use advcal_core::hypothesis::{adversarial_margins, margins_oracle, param_grid, Family, MarginPair};
use advcal_core::loss::MarginLoss;
use advcal_core::risk::{
    adv01_inner_risk, inner_risk, minimal_inner_risk, region_classify, LossForm, MinimumMethod, Region,
};
use advcal_core::Error;
use proptest::prelude::*;

fn lin() -> Family {
    Family::linear(2).unwrap()
}

#[test]
fn inner_risk_examples() {
    let f = lin();
    let h = f.linear_point(vec![1.0, 0.0]).unwrap();
    let hinge = MarginLoss::hinge();
    let v = inner_risk(LossForm::Plain, &hinge, &f, &h, &[0.5, 0.0], 0.5, 0.2).unwrap();
    assert!((v - 1.0).abs() < 1e-15);
    let ramp = MarginLoss::rho_margin(1.0).unwrap();
    let v = inner_risk(LossForm::Sup, &ramp, &f, &h, &[0.5, 0.0], 1.0, 0.2).unwrap();
    assert!((v - 0.7).abs() < 1e-15);
    assert_eq!(adv01_inner_risk(MarginPair::closed_form(-0.1, 0.2), 0.7), 1.0);
}

#[test]
fn adversarial_risk_cases() {
    let m = MarginPair::closed_form;
    assert!((adv01_inner_risk(m(0.3, 0.7), 0.7) - 0.3).abs() < 1e-15);
    assert_eq!(adv01_inner_risk(m(-0.5, -0.1), 0.7), 0.7);
    for eta in [0.0, 0.3, 1.0] {
        assert_eq!(adv01_inner_risk(m(0.0, 0.0), eta), 1.0);
    }
}

#[test]
fn regions() {
    assert_eq!(region_classify(&lin(), &[0.5, 0.0], 0.2).unwrap(), Region::X2);
    assert_eq!(region_classify(&lin(), &[0.1, 0.0], 0.2).unwrap(), Region::X1);
    assert_eq!(region_classify(&Family::all_measurable(2, 2.0).unwrap(), &[0.0, 0.0], 0.5).unwrap(), Region::X2);
    let relu = Family::relu_glm(2, 1.0).unwrap();
    assert!(matches!(region_classify(&relu, &[0.5, 0.0], 0.2), Err(Error::UnsupportedFamily(_))));
    let nn = Family::one_layer_nn(2, 2, 1.0, 1.0).unwrap();
    assert_eq!(region_classify(&nn, &[0.6, 0.0], 0.2).unwrap(), Region::X2);
    assert_eq!(region_classify(&nn, &[0.1, 0.0], 0.2).unwrap(), Region::X1);
}

#[test]
fn minimal_risks() {
    let spec = ParamGridSpec::default();
    let zo = MarginLoss::zero_one();
    let r = minimal_inner_risk(LossForm::Adv01, &zo, &lin(), &[0.5, 0.0], 0.3, 0.2, &spec).unwrap();
    assert!((r.value - 0.3).abs() < 1e-15);
    for eta in [0.0, 0.4, 1.0] {
        let r = minimal_inner_risk(LossForm::Adv01, &zo, &lin(), &[0.1, 0.0], eta, 0.2, &spec).unwrap();
        assert_eq!(r.value, 1.0);
    }
    let ramp = MarginLoss::rho_margin(1.0).unwrap();
    let coarse = ParamGridSpec { angles: 720, ..spec };
    let r = minimal_inner_risk(LossForm::Plain, &ramp, &lin(), &[0.9, 0.0], 0.5, 0.2, &coarse).unwrap();
    assert_eq!(r.method, MinimumMethod::EndpointRule);
    assert!((r.value - 0.55).abs() < 1e-12);
    assert!((r.grid_value.unwrap() - 0.55).abs() < 1e-3);
}

#[test]
fn half_excess_on_regular_points() {
    let f = lin();
    let zo = MarginLoss::zero_one();
    let x = [0.7, 0.0];
    let star = minimal_inner_risk(LossForm::Adv01, &zo, &f, &x, 0.5, 0.2, &ParamGridSpec::default()).unwrap().value;
    assert_eq!(star, 0.5);
    let spec = ParamGridSpec { angles: 360, ..ParamGridSpec::default() };
    for h in param_grid(&f, &spec).unwrap() {
        let m = adversarial_margins(&f, &h, &x, 0.2).unwrap();
        let v = inner_risk(LossForm::Adv01, &zo, &f, &h, &x, 0.5, 0.2).unwrap();
        assert!(v >= star);
        if m.straddles_zero() {
            assert_eq!(v - star, 0.5);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn adversarial_risk_matches_perturbation_oracle(th in 0.0f64..6.3, r in 0.0f64..1.0, a in 0.0f64..6.3, gamma in 0.05f64..0.95, eta in 0.0f64..=1.0) {
        let f = lin();
        let h = f.linear_point(vec![th.cos(), th.sin()]).unwrap();
        let x = [r * a.cos(), r * a.sin()];
        let m = adversarial_margins(&f, &h, &x, gamma).unwrap();
        let o = margins_oracle(&f, &h, &x, gamma, 200).unwrap();
        // Keep away from the zero crossing the oracle cannot resolve.
        prop_assume!(m.lower.abs() > 2e-3 && m.upper.abs() > 2e-3);
        let pos = if o.lower <= 0.0 { 1.0 } else { 0.0 };
        let neg = if o.upper >= 0.0 { 1.0 } else { 0.0 };
        prop_assert_eq!(adv01_inner_risk(m, eta), eta * pos + (1.0 - eta) * neg);
    }

    #[test]
    fn endpoint_rule_agrees_with_grid(r in 0.0f64..1.0, eta in 0.0f64..=1.0, rho in 0.2f64..3.0) {
        let loss = MarginLoss::rho_margin(rho).unwrap();
        let spec = ParamGridSpec { angles: 3600, ..ParamGridSpec::default() };
        let v = minimal_inner_risk(LossForm::Plain, &loss, &lin(), &[r, 0.0], eta, 0.2, &spec).unwrap();
        prop_assert!(v.value <= v.grid_value.unwrap() + 1e-12);
        prop_assert!(v.grid_value.unwrap() - v.value < 1e-3);
    }
}
