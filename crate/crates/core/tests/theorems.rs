use advcal_core::calibration::{Verdict, VerdictOptions};
use advcal_core::grid::ParamGridSpec;
use advcal_core::hypothesis::{eval_hypothesis, Family, Hypothesis, MonotoneFn};
use advcal_core::loss::MarginLoss;
use advcal_core::risk::Surrogate;
use advcal_core::theorems::{
    check_qce_glm, check_qce_linear, check_relu_corollary, convex_negative_witness, regularity_theorem_check,
    sup_rho_positive_check, Flag, Prediction, CONDITION_POINTS,
};

fn ramp(r: f64) -> MarginLoss {
    MarginLoss::rho_margin(r).unwrap()
}

fn lin() -> Family {
    Family::linear(2).unwrap()
}

#[test]
fn qce_linear_examples() {
    let v = check_qce_linear(&ramp(2.0), 0.2, CONDITION_POINTS).unwrap();
    assert_eq!(v.predicted, Prediction::Calibrated);
    assert!(v.conditions.iter().all(|c| c.passed));
    let v = check_qce_linear(&ramp(0.1), 0.2, CONDITION_POINTS).unwrap();
    assert_eq!(v.predicted, Prediction::NotCalibrated);
    assert!(v.conditions.iter().any(|c| !c.passed && c.at.is_some()));
    let v = check_qce_linear(&ramp(1.0), 0.2, CONDITION_POINTS).unwrap();
    assert_eq!(v.predicted, Prediction::Calibrated);
    assert!(v.flags.iter().any(|f| matches!(f, Flag::RhoThresholdDisagreement { .. })));
    // Not quasi-concave.
    let v = check_qce_linear(&MarginLoss::hinge(), 0.2, CONDITION_POINTS).unwrap();
    assert_eq!(v.predicted, Prediction::Inapplicable);
}

#[test]
fn qce_glm_and_relu_examples() {
    let relu = MonotoneFn::Relu;
    let cases = [(1.0, Prediction::Calibrated), (2.0, Prediction::NotCalibrated), (0.1, Prediction::NotCalibrated)];
    for (rho, want) in cases {
        assert_eq!(check_qce_glm(&ramp(rho), &relu, 1.5, 0.2, CONDITION_POINTS).unwrap().predicted, want, "rho={rho}");
    }
    let cases = [(1.0, Prediction::Calibrated), (2.0, Prediction::NotCalibrated), (0.2, Prediction::NotCalibrated)];
    for (rho, want) in cases {
        assert_eq!(check_relu_corollary(&ramp(rho), 1.5, 0.2, CONDITION_POINTS).unwrap().predicted, want, "rho={rho}");
    }
    assert_eq!(check_relu_corollary(&ramp(1.0), 1.2, 0.2, CONDITION_POINTS).unwrap().predicted, Prediction::Inapplicable);
    // g(1+γ) < G fails.
    assert_eq!(check_qce_glm(&ramp(1.0), &relu, 1.1, 0.2, CONDITION_POINTS).unwrap().predicted, Prediction::Inapplicable);
}

#[test]
fn relu_corollary_tracks_window() {
    for rho in [0.1, 0.19, 0.21, 0.5, 1.0, 1.4, 1.5, 1.6, 3.0] {
        let v = check_relu_corollary(&ramp(rho), 1.5, 0.2, CONDITION_POINTS).unwrap();
        let inside = advcal_core::theorems::relu_rho_window(rho, 1.5, 0.2);
        assert_eq!(v.predicted == Prediction::Calibrated, inside, "rho={rho}");
        let g = check_qce_glm(&ramp(rho), &MonotoneFn::Relu, 1.5, 0.2, CONDITION_POINTS).unwrap();
        assert_eq!(g.predicted, v.predicted, "rho={rho}");
    }
}

#[test]
fn predictions_agree_with_numeric_verdicts() {
    let opts = VerdictOptions::default_for(0.2);
    let relu = Family::relu_glm(2, 1.5).unwrap();
    for rho in [2.0, 1.0, 0.1] {
        let s = Surrogate::plain(ramp(rho));
        let v = check_qce_linear(&ramp(rho), 0.2, CONDITION_POINTS).unwrap().cross_check(&s, &lin(), 0.2, &opts).unwrap();
        assert!(v.cross_check.as_ref().unwrap().agrees, "linear rho={rho}");
        let v = check_qce_glm(&ramp(rho), &MonotoneFn::Relu, 1.5, 0.2, CONDITION_POINTS)
            .unwrap()
            .cross_check(&s, &relu, 0.2, &opts)
            .unwrap();
        let cc = v.cross_check.unwrap();
        assert!(cc.agrees, "relu rho={rho}");
        if v.predicted == Prediction::NotCalibrated {
            assert!(cc.min_delta.unwrap() <= 1e-6);
        }
    }
}

#[test]
fn witness_examples() {
    let params = ParamGridSpec::default();
    let w = convex_negative_witness(&Surrogate::plain(MarginLoss::hinge()), &lin(), 0.2, &params).unwrap();
    assert!((w.surrogate_risk - 1.0).abs() <= 1e-12);
    assert!(eval_hypothesis(&lin(), &w.hypothesis, &w.x).unwrap().abs() <= 1e-12);
    assert!(w.adversarial_excess >= 0.5);
    assert!(w.delta_max.value().unwrap() <= 1e-12);

    let w = convex_negative_witness(&Surrogate::sup(MarginLoss::hinge()).unwrap(), &lin(), 0.2, &params).unwrap();
    assert!((w.surrogate_risk - 1.2).abs() <= 1e-12);
    assert!(w.delta_max.value().unwrap() <= 1e-12);

    let nn = Family::one_layer_nn(2, 2, 1.0, 1.0).unwrap();
    let w = convex_negative_witness(&Surrogate::sup(MarginLoss::logistic()).unwrap(), &nn, 0.2, &params).unwrap();
    assert!(eval_hypothesis(&nn, &w.hypothesis, &w.x).unwrap() == 0.0);
    assert!((w.surrogate_risk - w.expected_risk).abs() <= 1e-12);
    assert!(w.delta_max.value().unwrap() <= 1e-6);

    let relu = Family::relu_glm(2, 1.5).unwrap();
    let w = convex_negative_witness(&Surrogate::sup(MarginLoss::hinge()).unwrap(), &relu, 0.2, &params).unwrap();
    let Hypothesis::Glm { b, .. } = w.hypothesis else { panic!("glm witness expected") };
    let g = MonotoneFn::Relu;
    assert!(((g.eval(-0.2) + b) + (g.eval(0.2) + b)).abs() <= 1e-12);
    assert!(w.delta_max.value().unwrap() <= 1e-6);

    let err = convex_negative_witness(&Surrogate::plain(ramp(1.0)), &lin(), 0.2, &params);
    assert!(matches!(err, Err(advcal_core::Error::Inapplicable(_))));
}

#[test]
fn sup_rho_examples() {
    let v = sup_rho_positive_check(1.0, &lin(), 0.2, &VerdictOptions::default_for(0.2)).unwrap();
    assert_eq!(v.predicted, Prediction::Calibrated);
    assert!(v.cross_check.unwrap().agrees);

    let all = Family::all_measurable(2, 2.0).unwrap();
    let v = sup_rho_positive_check(0.5, &all, 0.3, &VerdictOptions::default_for(0.3)).unwrap();
    assert_eq!(v.predicted, Prediction::Calibrated);
    assert_eq!(v.cross_check.unwrap().verdict, Verdict::ConsistentWithCalibration);

    let nn = Family::one_layer_nn(2, 2, 1.0, 1.0).unwrap();
    let mut opts = VerdictOptions::default_for(0.2);
    opts.grid.x_norms = vec![0.3, 0.7];
    let v = sup_rho_positive_check(2.0, &nn, 0.2, &opts).unwrap();
    assert_eq!(v.predicted, Prediction::Calibrated);
    assert!(v.cross_check.unwrap().agrees);

    let relu = Family::relu_glm(2, 1.5).unwrap();
    let v = sup_rho_positive_check(1.0, &relu, 0.2, &opts).unwrap();
    assert_eq!(v.predicted, Prediction::Inapplicable);
}

#[test]
fn regularity_examples() {
    let params = ParamGridSpec::default();
    let v = regularity_theorem_check(&lin(), 0.99, &[0.1, 0.5, 0.9], &params).unwrap();
    assert_eq!(v.predicted, Prediction::Calibrated);
    assert!(v.conditions.iter().all(|c| c.passed));
    let v = regularity_theorem_check(&lin(), 0.2, &[0.1, 0.5, 0.9], &params).unwrap();
    assert_eq!(v.predicted, Prediction::Inapplicable);
    let all = Family::all_measurable(2, 1.0).unwrap();
    let v = regularity_theorem_check(&all, 0.5, &[0.1, 0.5, 0.9], &params).unwrap();
    assert_eq!(v.predicted, Prediction::Inapplicable);
}
