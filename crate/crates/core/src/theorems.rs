//! Executable versions of the calibration conditions, plus the witness
//! constructions behind the negative results for convex losses.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::calibration::{
    calibration_verdict, delta_max_bruteforce_with, delta_max_reduced, CalibrationQuery, CalibrationValue,
    Verdict, VerdictOptions,
};
use crate::grid::{axis_point, linspace, ParamGridSpec, TGrid};
use crate::hypothesis::{a_bounds, is_regular_at_with, Family, FamilyKind, Hypothesis, MonotoneFn};
use crate::loss::{verify_loss_properties, LossKind, MarginLoss};
use crate::risk::{inner_risk, minimal_inner_risk, LossForm, Surrogate, SurrogateForm};
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Margin a strict inequality must clear.
pub const STRICT_TOL: f64 = 1e-9;
/// Slack allowed on an equality.
pub const EQUAL_TOL: f64 = 1e-9;
/// Default number of condition points.
pub const CONDITION_POINTS: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Prediction {
    Calibrated,
    NotCalibrated,
    Inapplicable,
}

/// One sub-condition evaluated on a grid of `t`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Condition {
    pub name: String,
    pub passed: bool,
    /// Smallest slack seen (negative or below tolerance when failing).
    pub slack: f64,
    /// Where the smallest slack was seen.
    pub at: Option<f64>,
}

impl Condition {
    fn holds(name: &str, passed: bool) -> Self {
        Self { name: name.to_string(), passed, slack: if passed { 0.0 } else { -1.0 }, at: None }
    }
}

/// Evaluates a strict inequality `lhs(t) > rhs(t)` (`slack(t) ≥ STRICT_TOL`).
fn strict(name: &str, ts: &[f64], mut slack: impl FnMut(f64) -> f64) -> Condition {
    let mut worst = f64::INFINITY;
    let mut at = None;
    for &t in ts {
        let s = slack(t);
        if !(s >= worst) {
            worst = s;
            at = Some(t);
        }
    }
    Condition { name: name.to_string(), passed: worst >= STRICT_TOL, slack: worst, at }
}

/// Evaluates `lhs(t) = rhs(t)` given `diff(t) = lhs − rhs`; slack is `EQUAL_TOL − |diff|`.
fn equal(name: &str, ts: &[f64], diff: impl Fn(f64) -> f64) -> Condition {
    let mut c = strict(name, ts, |t| EQUAL_TOL - diff(t).abs());
    c.passed = c.slack >= 0.0;
    c
}

/// Disagreements surfaced instead of silently picking one answer.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Flag {
    /// The pointwise gap condition at this `γ` and the `ρ > 1` threshold for
    /// ramp losses on linear models predict different outcomes.
    RhoThresholdDisagreement { rho: f64, gamma: f64, gap_condition: Prediction, rho_above_one: bool },
    /// The numeric verdict contradicts the prediction.
    NumericDisagreement { predicted: Prediction, numeric: Verdict },
}

/// Numeric verdict run alongside a prediction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CrossCheck {
    pub verdict: Verdict,
    pub min_delta: Option<f64>,
    /// `(ε, ‖x‖, η)` of the minimum.
    pub at: Option<(f64, f64, f64)>,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TheoremVerdict {
    pub id: String,
    pub predicted: Prediction,
    pub conditions: Vec<Condition>,
    pub flags: Vec<Flag>,
    pub cross_check: Option<CrossCheck>,
    pub note: Option<String>,
}

impl TheoremVerdict {
    fn new(id: &str) -> Self {
        Self { id: id.to_string(), predicted: Prediction::Inapplicable, conditions: Vec::new(), flags: Vec::new(), cross_check: None, note: None }
    }

    fn standing_ok(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    /// Runs a verdict and records whether it agrees with the prediction.
    pub fn cross_check(
        mut self,
        surrogate: &Surrogate,
        family: &Family,
        gamma: f64,
        opts: &VerdictOptions,
    ) -> Result<Self> {
        let report = calibration_verdict(surrogate, family, gamma, opts)?;
        let agrees = match self.predicted {
            Prediction::Calibrated => report.verdict == Verdict::ConsistentWithCalibration,
            Prediction::NotCalibrated => report.verdict == Verdict::CalibrationViolated,
            Prediction::Inapplicable => true,
        };
        if !agrees {
            self.flags.push(Flag::NumericDisagreement { predicted: self.predicted, numeric: report.verdict });
        }
        self.cross_check = Some(CrossCheck {
            verdict: report.verdict,
            min_delta: report.minimum.as_ref().and_then(|m| m.value.value()),
            at: report.minimum.as_ref().map(|m| (m.epsilon, m.x_norm, m.eta)),
            agrees,
        });
        Ok(self)
    }
}

/// `n` points on `[lo, hi]` (without `lo` when `open_lo`), plus the given
/// kinks that fall inside.
pub fn condition_points(lo: f64, hi: f64, n: usize, open_lo: bool, kinks: &[f64]) -> Vec<f64> {
    let mut ts: Vec<f64> = linspace(lo, hi, n.max(2));
    ts.extend(kinks.iter().copied().filter(|&k| k >= lo && k <= hi));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if open_lo {
        ts.retain(|&t| t > lo);
    }
    ts
}

/// Bounded, continuous, non-increasing and quasi-concave even, as observed.
fn loss_standing(v: &mut TheoremVerdict, loss: &MarginLoss) {
    let r = verify_loss_properties(loss, &TGrid::STANDARD);
    v.conditions.push(Condition::holds("bounded", r.bounded.passed));
    v.conditions.push(Condition::holds("continuous", r.continuous.passed));
    v.conditions.push(Condition::holds("non_increasing", r.non_increasing.passed));
    v.conditions.push(Condition::holds("quasi_concave_even", r.quasi_concave_even()));
}

fn kinks_and_shifts(loss: &MarginLoss, shifts: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for k in loss.kinks() {
        for s in shifts {
            out.extend([k + s, k - s, -k + s, -k - s]);
        }
    }
    out
}

/// `ρ > 1`: the threshold for ramp losses on linear models when every `γ ∈ (0, 1)` is considered.
pub fn linear_rho_threshold(rho: f64) -> bool {
    rho > 1.0
}

/// `G ≥ ρ > γ` with `G > 1 + γ`: the window for ramp losses on ReLU models.
pub fn relu_rho_window(rho: f64, bias_bound: f64, gamma: f64) -> bool {
    bias_bound >= rho && rho > gamma && bias_bound > 1.0 + gamma
}

/// Quasi-concave even losses on linear models: calibrated iff
/// `φ(γ) + φ(−γ) > φ(t) + φ(−t)` for every `t ∈ (γ, 1]`.
pub fn check_qce_linear(loss: &MarginLoss, gamma: f64, points: usize) -> Result<TheoremVerdict> {
    check_gamma(gamma)?;
    let mut v = TheoremVerdict::new("qce-linear");
    let ts = condition_points(gamma, 1.0, points, true, &kinks_and_shifts(loss, &[0.0]));
    loss_standing(&mut v, loss);
    v.conditions.push(strict("phi(-t) > phi(t)", &ts, |t| loss.eval(-t) - loss.eval(t)));
    if !v.standing_ok() {
        v.note = Some(String::from("standing assumptions fail"));
        return Ok(v);
    }
    let anchor = loss.eval(gamma) + loss.eval(-gamma);
    let gap = strict("phi(gamma)+phi(-gamma) > phi(t)+phi(-t)", &ts, |t| anchor - loss.eval(t) - loss.eval(-t));
    v.predicted = if gap.passed { Prediction::Calibrated } else { Prediction::NotCalibrated };
    v.conditions.push(gap);
    if let LossKind::RhoMargin { rho } = loss.kind() {
        let above = linear_rho_threshold(*rho);
        if above != (v.predicted == Prediction::Calibrated) {
            v.flags.push(Flag::RhoThresholdDisagreement {
                rho: *rho,
                gamma,
                gap_condition: v.predicted,
                rho_above_one: above,
            });
        }
    }
    Ok(v)
}

/// Quasi-concave even losses on generalized linear models with link `g` and
/// bias bound `G`: calibrated iff for every `t ∈ [0, 1]`
/// `φ(G − g(−t)) + φ(g(−t) − G) = φ(g(t) + G) + φ(−g(t) − G)` and
/// `min{φ(Ā) + φ(−Ā), φ(A̲) + φ(−A̲)} > φ(G − g(−t)) + φ(g(−t) − G)`.
pub fn check_qce_glm(
    loss: &MarginLoss,
    link: &MonotoneFn,
    bias_bound: f64,
    gamma: f64,
    points: usize,
) -> Result<TheoremVerdict> {
    check_gamma(gamma)?;
    let mut v = TheoremVerdict::new("qce-glm");
    let g = |s: f64| link.eval(s);
    let mut shifts = vec![0.0, bias_bound, gamma];
    shifts.extend(link.kinks());
    let mut kinks = kinks_and_shifts(loss, &shifts);
    kinks.push(gamma);
    kinks.extend(link.kinks().iter().flat_map(|k| [*k, -k, k + gamma, k - gamma, gamma - k]));
    let ts = condition_points(0.0, 1.0, points, false, &kinks);
    loss_standing(&mut v, loss);
    v.conditions.push(Condition::holds("g(1+gamma) < G", g(1.0 + gamma) < bias_bound));
    v.conditions.push(Condition::holds("g(-1-gamma) > -G", g(-1.0 - gamma) > -bias_bound));
    v.conditions.push(strict("phi(g(-t)-G) > phi(G-g(-t))", &ts, |t| {
        loss.eval(g(-t) - bias_bound) - loss.eval(bias_bound - g(-t))
    }));
    let mut sym = strict("g(-t)+g(t) >= 0", &ts, |t| g(-t) + g(t));
    sym.passed = sym.slack >= 0.0;
    v.conditions.push(sym);
    if !v.standing_ok() {
        v.note = Some(String::from("standing assumptions fail"));
        return Ok(v);
    }
    let left = |t: f64| loss.eval(bias_bound - g(-t)) + loss.eval(g(-t) - bias_bound);
    let eq = equal("phi(G-g(-t))+phi(g(-t)-G) = phi(g(t)+G)+phi(-g(t)-G)", &ts, |t| {
        left(t) - loss.eval(g(t) + bias_bound) - loss.eval(-g(t) - bias_bound)
    });
    let mut bounds = Vec::with_capacity(ts.len());
    for &t in &ts {
        bounds.push(a_bounds(link, t, gamma, 2001)?);
    }
    let sum = |a: f64| loss.eval(a) + loss.eval(-a);
    let mut k = 0usize;
    let gap = strict("min(phi(A)+phi(-A)) > phi(G-g(-t))+phi(g(-t)-G)", &ts, |t| {
        let (up, down) = bounds[k];
        k += 1;
        sum(up).min(sum(down)) - left(t)
    });
    v.predicted = if eq.passed && gap.passed { Prediction::Calibrated } else { Prediction::NotCalibrated };
    v.conditions.push(eq);
    v.conditions.push(gap);
    Ok(v)
}

/// ReLU models with bias bound `G > 1 + γ`: calibrated iff
/// `φ(G) + φ(−G) = φ(t + G) + φ(−t − G)` on `[0, 1]` and
/// `φ(γ) + φ(−γ) > φ(G) + φ(−G)`.
pub fn check_relu_corollary(loss: &MarginLoss, bias_bound: f64, gamma: f64, points: usize) -> Result<TheoremVerdict> {
    check_gamma(gamma)?;
    let mut v = TheoremVerdict::new("relu-corollary");
    v.conditions.push(Condition::holds("G > 1+gamma", bias_bound > 1.0 + gamma));
    v.conditions.push(Condition::holds("phi(-G) > phi(G)", loss.eval(-bias_bound) > loss.eval(bias_bound)));
    if !v.standing_ok() {
        v.note = Some(String::from("standing assumptions fail"));
        return Ok(v);
    }
    let ts = condition_points(0.0, 1.0, points, false, &kinks_and_shifts(loss, &[bias_bound]));
    let base = loss.eval(bias_bound) + loss.eval(-bias_bound);
    let eq = equal("phi(G)+phi(-G) = phi(t+G)+phi(-t-G)", &ts, |t| {
        base - loss.eval(t + bias_bound) - loss.eval(-t - bias_bound)
    });
    let gap = strict("phi(gamma)+phi(-gamma) > phi(G)+phi(-G)", &[gamma], |_| {
        loss.eval(gamma) + loss.eval(-gamma) - base
    });
    v.predicted = if eq.passed && gap.passed { Prediction::Calibrated } else { Prediction::NotCalibrated };
    v.conditions.push(eq);
    v.conditions.push(gap);
    Ok(v)
}

/// Sup ramp losses on symmetric families are calibrated for every `ρ > 0`.
/// The verdict always carries a numeric cross-check.
pub fn sup_rho_positive_check(rho: f64, family: &Family, gamma: f64, opts: &VerdictOptions) -> Result<TheoremVerdict> {
    check_gamma(gamma)?;
    let mut v = TheoremVerdict::new("sup-rho-positive");
    v.conditions.push(Condition::holds("symmetric family", family.is_symmetric()));
    if !family.is_symmetric() {
        v.note = Some(format!("{} is not symmetric", family.describe()));
        return Ok(v);
    }
    v.predicted = Prediction::Calibrated;
    let surrogate = Surrogate::sup(MarginLoss::rho_margin(rho)?)?;
    v.cross_check(&surrogate, family, gamma, opts)
}

/// Without regular points every surrogate is calibrated.
///
/// When no `x = (‖x‖, 0, …)` with `‖x‖` in `x_norms` is regular the verdict
/// is `calibrated` and `δ_max` of the plain hinge loss is confirmed infinite
/// at every sampled point. Otherwise the verdict is `inapplicable`.
pub fn regularity_theorem_check(
    family: &Family,
    gamma: f64,
    x_norms: &[f64],
    params: &ParamGridSpec,
) -> Result<TheoremVerdict> {
    check_gamma(gamma)?;
    let mut v = TheoremVerdict::new("regularity");
    v.conditions.push(Condition::holds("symmetric family", family.is_symmetric()));
    if !family.is_symmetric() {
        v.note = Some(format!("{} is not symmetric", family.describe()));
        return Ok(v);
    }
    let mut regular_at = None;
    for &r in x_norms {
        if is_regular_at_with(family, &axis_point(family.dim(), r), gamma, params)? {
            regular_at = Some(r);
            break;
        }
    }
    v.conditions.push(Condition {
        name: String::from("no regular point"),
        passed: regular_at.is_none(),
        slack: if regular_at.is_none() { 0.0 } else { -1.0 },
        at: regular_at,
    });
    if regular_at.is_some() {
        v.note = Some(String::from("a regular point exists, so calibration is not automatic"));
        return Ok(v);
    }
    v.predicted = Prediction::Calibrated;
    let probe = Surrogate::plain(MarginLoss::hinge());
    let mut all_infinite = true;
    for &r in x_norms {
        for eps in [0.1, 0.5, 1.0] {
            for eta in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let q = CalibrationQuery::new(probe.clone(), family.clone(), gamma, eps, axis_point(family.dim(), r), eta)
                    .with_params(*params);
                all_infinite &= delta_max_reduced(&q)?.delta.is_infinite();
            }
        }
    }
    v.conditions.push(Condition::holds("delta_max infinite at sampled points", all_infinite));
    v.note = Some(String::from("no sampled point is regular; every surrogate is trivially calibrated there"));
    Ok(v)
}

/// A point `x₀` and a member `f₀` certifying `δ_max(½, x₀, ½) = 0`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Witness {
    pub x: Vec<f64>,
    pub hypothesis: Hypothesis,
    pub epsilon: f64,
    pub eta: f64,
    /// `C_φ(f₀, x₀, ½)`, plain or sup.
    pub surrogate_risk: f64,
    /// The analytic value `surrogate_risk` should equal.
    pub expected_risk: f64,
    pub adversarial_excess: f64,
    /// Brute-force `δ_max` with `f₀` added to the grid.
    pub delta_max: CalibrationValue,
}

/// Builds the witness for a convex surrogate.
///
/// Linear models use `x₀ = ((1+γ)/2, 0)` and `w ⟂ x₀`. Generalized linear
/// models use `x₀ = 0` with `b₀ = −g(0)` (plain) or
/// `b₀ = −(g(γ) + g(−γ))/2` (sup). Networks and free pairs use `f = 0` at
/// `x₀ = ((1+γ)/2, 0)`.
pub fn convex_negative_witness(surrogate: &Surrogate, family: &Family, gamma: f64, params: &ParamGridSpec) -> Result<Witness> {
    check_gamma(gamma)?;
    let loss = surrogate.loss();
    let report = verify_loss_properties(loss, &TGrid::STANDARD);
    if !report.convex.passed {
        return Err(Error::Inapplicable(format!("{} is not convex", loss.describe())));
    }
    let sup = surrogate.form() == SurrogateForm::Sup;
    if sup && !report.non_increasing.passed {
        return Err(Error::Inapplicable(format!("{} is not non-increasing", loss.describe())));
    }
    let d = family.dim();
    let off_origin = axis_point(d, 0.5 * (1.0 + gamma));
    let (x, h, expected) = match family.kind() {
        FamilyKind::Linear => {
            if d < 2 {
                return Err(Error::Inapplicable(String::from("no direction is orthogonal to x in one dimension")));
            }
            let mut w = vec![0.0; d];
            w[1] = 1.0;
            let expected = if sup { loss.eval(-gamma) } else { loss.eval(0.0) };
            (off_origin, family.linear_point(w)?, expected)
        }
        FamilyKind::Glm { link, bias_bound } => {
            let (up, down) = (link.eval(gamma), link.eval(-gamma));
            let b = if sup { -(up + down) / 2.0 } else { -link.eval(0.0) };
            if b.abs() > *bias_bound {
                return Err(Error::Inapplicable(format!("bias {b} exceeds the bound {bias_bound}")));
            }
            let expected = if sup { loss.eval((down - up) / 2.0) } else { loss.eval(0.0) };
            (vec![0.0; d], family.glm_point(axis_point(d, 1.0), b)?, expected)
        }
        FamilyKind::OneLayerNn { .. } | FamilyKind::AllMeasurable { .. } => {
            (off_origin, family.zero()?, loss.eval(0.0))
        }
    };
    let (epsilon, eta) = (0.5, 0.5);
    let surrogate_risk = inner_risk(surrogate.loss_form(), loss, family, &h, &x, eta, gamma)?;
    let adv = inner_risk(LossForm::Adv01, loss, family, &h, &x, eta, gamma)?;
    let adv_star = minimal_inner_risk(LossForm::Adv01, loss, family, &x, eta, gamma, params)?.value;
    let q = CalibrationQuery::new(surrogate.clone(), family.clone(), gamma, epsilon, x.clone(), eta).with_params(*params);
    let delta_max = delta_max_bruteforce_with(&q, core::slice::from_ref(&h))?;
    Ok(Witness {
        x,
        hypothesis: h,
        epsilon,
        eta,
        surrogate_risk,
        expected_risk: expected,
        adversarial_excess: adv - adv_star,
        delta_max,
    })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("gamma = {gamma} is outside (0, 1)")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rho(r: f64) -> MarginLoss {
        MarginLoss::rho_margin(r).unwrap()
    }

    #[test]
    fn linear_gap_cases() {
        assert_eq!(check_qce_linear(&rho(2.0), 0.2, 1001).unwrap().predicted, Prediction::Calibrated);
        assert_eq!(check_qce_linear(&rho(0.1), 0.2, 1001).unwrap().predicted, Prediction::NotCalibrated);
        let v = check_qce_linear(&rho(1.0), 0.2, 1001).unwrap();
        assert_eq!(v.predicted, Prediction::Calibrated);
        assert!(matches!(v.flags[0], Flag::RhoThresholdDisagreement { rho_above_one: false, .. }));
    }

    #[test]
    fn glm_cases() {
        let relu = MonotoneFn::Relu;
        assert_eq!(check_qce_glm(&rho(1.0), &relu, 1.5, 0.2, 1001).unwrap().predicted, Prediction::Calibrated);
        assert_eq!(check_qce_glm(&rho(2.0), &relu, 1.5, 0.2, 1001).unwrap().predicted, Prediction::NotCalibrated);
        assert_eq!(check_qce_glm(&rho(0.1), &relu, 1.5, 0.2, 1001).unwrap().predicted, Prediction::NotCalibrated);
        assert_eq!(check_relu_corollary(&rho(1.0), 1.5, 0.2, 1001).unwrap().predicted, Prediction::Calibrated);
        assert_eq!(check_relu_corollary(&rho(2.0), 1.5, 0.2, 1001).unwrap().predicted, Prediction::NotCalibrated);
        assert_eq!(check_relu_corollary(&rho(0.2), 1.5, 0.2, 1001).unwrap().predicted, Prediction::NotCalibrated);
        assert_eq!(check_relu_corollary(&rho(1.0), 1.1, 0.2, 1001).unwrap().predicted, Prediction::Inapplicable);
    }
}
