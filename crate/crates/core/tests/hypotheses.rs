use advcal_core::grid::ParamGridSpec;
use advcal_core::hypothesis::{
    a_bounds, adversarial_margins, eval_hypothesis, is_regular_at, margins_oracle, param_grid, Family, Hypothesis,
    MarginMethod, MonotoneFn,
};
use advcal_core::Error;
use proptest::prelude::*;

/// Extremes of `f` over a polar grid of the closed `γ`-disk.
fn polar_oracle(family: &Family, h: &Hypothesis, x: &[f64], gamma: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..=60 {
        let r = gamma * i as f64 / 60.0;
        for k in 0..720 {
            let a = std::f64::consts::TAU * k as f64 / 720.0;
            let v = eval_hypothesis(family, h, &[x[0] + r * a.cos(), x[1] + r * a.sin()]).unwrap();
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    (lo, hi)
}

fn close(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
    (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol
}

#[test]
fn evaluation_examples() {
    let lin = Family::linear(2).unwrap();
    let relu = Family::relu_glm(2, 1.0).unwrap();
    let nn = Family::one_layer_nn(2, 3, 1.0, 1.0).unwrap();
    assert_eq!(eval_hypothesis(&lin, &lin.linear_point(vec![1.0, 0.0]).unwrap(), &[0.5, 0.0]).unwrap(), 0.5);
    let h = relu.glm_point(vec![1.0, 0.0], -0.1).unwrap();
    assert!((eval_hypothesis(&relu, &h, &[0.3, 0.0]).unwrap() - 0.2).abs() < 1e-15);
    assert_eq!(eval_hypothesis(&nn, &nn.zero().unwrap(), &[0.4, -0.7]).unwrap(), 0.0);
    assert!(matches!(eval_hypothesis(&lin, &lin.linear_point(vec![1.0, 0.0]).unwrap(), &[0.5]), Err(Error::Domain(_))));
}

#[test]
fn margin_examples() {
    let lin = Family::linear(2).unwrap();
    let h = lin.linear_point(vec![1.0, 0.0]).unwrap();
    let m = adversarial_margins(&lin, &h, &[0.5, 0.0], 0.2).unwrap();
    assert!(close((m.lower, m.upper), (0.3, 0.7), 1e-15));
    let o = margins_oracle(&lin, &h, &[0.5, 0.0], 0.2, 200).unwrap();
    assert!(close((o.lower, o.upper), (0.3, 0.7), 1e-3));
    assert_eq!(o.method, MarginMethod::GridOracle);

    let relu = Family::relu_glm(2, 1.0).unwrap();
    let h = relu.glm_point(vec![1.0, 0.0], -0.1).unwrap();
    let m = adversarial_margins(&relu, &h, &[0.3, 0.0], 0.2).unwrap();
    assert!(close((m.lower, m.upper), (0.0, 0.4), 1e-15));
    let o = margins_oracle(&relu, &h, &[0.3, 0.0], 0.2, 200).unwrap();
    assert!(close((o.lower, o.upper), (0.0, 0.4), 1e-3));
    let h = relu.glm_point(vec![0.0, 1.0], 0.0).unwrap();
    let o = margins_oracle(&relu, &h, &[0.0, 0.0], 0.2, 200).unwrap();
    assert!(close((o.lower, o.upper), (0.0, 0.2), 1e-3));

    let nn = Family::one_layer_nn(2, 2, 1.0, 1.0).unwrap();
    let m = adversarial_margins(&nn, &nn.zero().unwrap(), &[0.3, 0.1], 0.4).unwrap();
    assert_eq!((m.lower, m.upper), (0.0, 0.0));

    let all = Family::all_measurable(2, 2.0).unwrap();
    let p = all.pair_point(-0.4, 0.2).unwrap();
    let o = margins_oracle(&all, &p, &[0.0, 0.0], 0.2, 60).unwrap();
    assert_eq!((o.lower, o.upper), (-0.4, 0.2));

    assert!(matches!(adversarial_margins(&lin, &lin.linear_point(vec![1.0, 0.0]).unwrap(), &[0.5, 0.0], 1.0), Err(Error::Domain(_))));
    let nn3 = Family::one_layer_nn(3, 1, 1.0, 1.0).unwrap();
    let z = nn3.zero().unwrap();
    assert!(matches!(adversarial_margins(&nn3, &z, &[0.0, 0.0, 0.0], 0.2), Err(Error::UnsupportedDimension(3))));
    assert!(margins_oracle(&lin, &lin.linear_point(vec![1.0, 0.0]).unwrap(), &[0.5, 0.0], 0.2, 10).is_err());
}

#[test]
fn regularity_examples() {
    let lin = Family::linear(2).unwrap();
    assert!(is_regular_at(&lin, &[0.5, 0.0], 0.2).unwrap());
    assert!(!is_regular_at(&lin, &[0.0, 0.0], 0.2).unwrap());
    assert!(is_regular_at(&Family::relu_glm(2, 0.5).unwrap(), &[0.0, 0.0], 0.2).unwrap());
    assert!(is_regular_at(&Family::all_measurable(2, 2.0).unwrap(), &[0.0, 0.0], 0.9).unwrap());
    for k in 0..=50 {
        let r = k as f64 / 50.0;
        assert_eq!(is_regular_at(&lin, &[0.0, r], 0.3).unwrap(), r > 0.3, "r = {r}");
    }
}

#[test]
fn link_bounds() {
    let (u, d) = a_bounds(&MonotoneFn::Relu, 0.5, 0.2, 2001).unwrap();
    assert!(close((u, d), (0.2, -0.2), 1e-15));
    let (u, d) = a_bounds(&MonotoneFn::Relu, 0.1, 0.2, 2001).unwrap();
    assert!(close((u, d), (0.1, -0.2), 1e-15));
    let (u, d) = a_bounds(&MonotoneFn::Identity, 0.7, 0.3, 2001).unwrap();
    assert!(close((u, d), (0.3, -0.3), 1e-15));
    // A table reproducing ReLU gives the same bounds.
    let table = MonotoneFn::table(vec![(-5.0, 0.0), (0.0, 0.0), (5.0, 5.0)]).unwrap();
    for t in [0.0, 0.05, 0.1, 0.3, 1.0] {
        let a = a_bounds(&table, t, 0.2, 101).unwrap();
        let b = a_bounds(&MonotoneFn::Relu, t, 0.2, 101).unwrap();
        assert!(close(a, b, 1e-12), "t = {t}");
    }
    assert!(MonotoneFn::table(vec![(0.0, 1.0), (1.0, 0.0)]).is_err());
}

#[test]
fn grid_examples() {
    let spec = ParamGridSpec { angles: 720, ..ParamGridSpec::default() };
    let g = param_grid(&Family::linear(2).unwrap(), &spec).unwrap();
    assert_eq!(g.len(), 720);
    for h in &g {
        let Hypothesis::Linear { w } = h else { panic!("not linear") };
        assert!(((w[0] * w[0] + w[1] * w[1]).sqrt() - 1.0).abs() < 1e-12);
    }
    assert_eq!(param_grid(&Family::linear(1).unwrap(), &spec).unwrap().len(), 2);
    let g = param_grid(&Family::glm(2, MonotoneFn::Identity, 1.0).unwrap(), &spec).unwrap();
    assert_eq!(g.len(), 29520);
    assert!(g.iter().all(|h| matches!(h, Hypothesis::Glm { b, .. } if b.abs() <= 1.0)));
    assert!(matches!(param_grid(&Family::linear(3).unwrap(), &spec), Err(Error::UnsupportedDimension(3))));
    let g = param_grid(&Family::all_measurable(2, 2.0).unwrap(), &spec).unwrap();
    assert!(g.iter().all(|h| matches!(h, Hypothesis::Pair { lo, hi } if lo <= hi && lo.abs() <= 2.0 && hi.abs() <= 2.0)));
}

fn unit(theta: f64) -> Vec<f64> {
    vec![theta.cos(), theta.sin()]
}

fn point(r: f64, a: f64) -> Vec<f64> {
    vec![r * a.cos(), r * a.sin()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn linear_margins_match_polar_oracle(th in 0.0f64..6.3, r in 0.0f64..1.0, a in 0.0f64..6.3, gamma in 0.01f64..0.99) {
        let fam = Family::linear(2).unwrap();
        let h = fam.linear_point(unit(th)).unwrap();
        let x = point(r, a);
        let m = adversarial_margins(&fam, &h, &x, gamma).unwrap();
        prop_assert!(close((m.lower, m.upper), polar_oracle(&fam, &h, &x, gamma), 1e-2));
        prop_assert!((m.upper - m.lower - 2.0 * gamma).abs() < 1e-12);
    }

    #[test]
    fn glm_margins_match_polar_oracle(relu in any::<bool>(), th in 0.0f64..6.3, b in -1.0f64..1.0, r in 0.0f64..1.0, a in 0.0f64..6.3, gamma in 0.01f64..0.99) {
        let link = if relu { MonotoneFn::Relu } else { MonotoneFn::Identity };
        let fam = Family::glm(2, link, 1.0).unwrap();
        let h = fam.glm_point(unit(th), b).unwrap();
        let x = point(r, a);
        let m = adversarial_margins(&fam, &h, &x, gamma).unwrap();
        prop_assert!(close((m.lower, m.upper), polar_oracle(&fam, &h, &x, gamma), 1e-2));
    }

    #[test]
    fn nn_margins_match_polar_oracle(u1 in -0.5f64..0.5, u2 in -0.5f64..0.5, t1 in 0.0f64..6.3, t2 in 0.0f64..6.3, s1 in 0.0f64..1.0, s2 in 0.0f64..1.0, r in 0.0f64..1.0, a in 0.0f64..6.3, gamma in 0.01f64..0.99) {
        let fam = Family::one_layer_nn(2, 2, 1.0, 1.0).unwrap();
        let w1: Vec<f64> = unit(t1).iter().map(|v| v * s1).collect();
        let w2: Vec<f64> = unit(t2).iter().map(|v| v * s2).collect();
        let h = fam.nn_point(vec![u1, u2], vec![w1, w2]).unwrap();
        let x = point(r, a);
        let m = adversarial_margins(&fam, &h, &x, gamma).unwrap();
        let (lo, hi) = polar_oracle(&fam, &h, &x, gamma);
        // Exact extremes can only be more extreme than sampled ones.
        prop_assert!(m.lower <= lo + 1e-12 && m.upper >= hi - 1e-12);
        prop_assert!(close((m.lower, m.upper), (lo, hi), 1e-2));
    }

    #[test]
    fn negation_swaps_margins(th in 0.0f64..6.3, r in 0.0f64..1.0, a in 0.0f64..6.3, gamma in 0.01f64..0.99, u1 in -0.5f64..0.5, t1 in 0.0f64..6.3) {
        let x = point(r, a);
        let lin = Family::linear(2).unwrap();
        let nn = Family::one_layer_nn(2, 1, 1.0, 1.0).unwrap();
        let all = Family::all_measurable(2, 2.0).unwrap();
        let cases = [
            (lin.clone(), lin.linear_point(unit(th)).unwrap()),
            (nn.clone(), nn.nn_point(vec![u1], vec![unit(t1)]).unwrap()),
            (all.clone(), all.pair_point(-r, r).unwrap()),
        ];
        for (fam, h) in cases {
            let m = adversarial_margins(&fam, &h, &x, gamma).unwrap();
            let n = adversarial_margins(&fam, &fam.negate(&h).unwrap(), &x, gamma).unwrap();
            prop_assert_eq!((n.lower, n.upper), (-m.upper, -m.lower));
        }
    }

    #[test]
    fn links_are_monotone(s1 in -3.0f64..3.0, s2 in -3.0f64..3.0) {
        let (a, b) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let table = MonotoneFn::table(vec![(-1.0, -2.0), (0.0, 0.0), (0.5, 0.0), (2.0, 1.0)]).unwrap();
        for g in [MonotoneFn::Identity, MonotoneFn::Relu, table] {
            prop_assert!(g.eval(a) <= g.eval(b));
        }
    }
}
