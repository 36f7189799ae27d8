//! Margin losses `φ(y f(x))`, their supremum-based lifts and the two-point
//! conditional risk
//!
//! ```text
//! C̄(t, η) = η φ(t) + (1 − η) φ(−t)
//! ```
//!
//! Every loss carries a set of declared analytic properties. Downstream code
//! only trusts a property through its declaration, and
//! [`verify_loss_properties`] checks declarations numerically on a grid.
//! Quasi-concave evenness is verified through its consequences for `C̄`:
//! quasi-concavity in `t` for every `η`, evenness and monotonicity of
//! `C̄(·, ½)`, one-sided monotonicity for `η ≠ ½`, and the endpoint rule
//! `inf_{[l,u]} C̄ = min{C̄(l), C̄(u)}`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::domain;
use crate::grid::{linspace, TGrid};
use crate::hypothesis::MarginPair;
use crate::math;
use crate::pwl::Pwl;
use crate::search::Shape;
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Tolerance for algebraic identities in the verifiers.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for monotonicity and convexity comparisons.
pub const ORDER_TOL: f64 = 1e-9;

/// Analytic properties a loss may declare.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Props {
    pub convex: bool,
    pub non_increasing: bool,
    pub bounded: bool,
    pub continuous: bool,
    pub quasi_concave_even: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LossKind {
    ZeroOne,
    RhoMargin { rho: f64 },
    Hinge,
    Logistic,
    Exponential,
    CustomTable(Pwl),
}

/// A margin loss `φ: ℝ → ℝ₊`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginLoss {
    kind: LossKind,
    declared: Props,
}

/// Binary label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Label {
    Pos,
    Neg,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }
}

impl MarginLoss {
    /// `1{t ≤ 0}`.
    pub fn zero_one() -> Self {
        Self {
            kind: LossKind::ZeroOne,
            declared: Props { non_increasing: true, bounded: true, quasi_concave_even: true, ..Props::default() },
        }
    }

    /// `min{1, max{0, 1 − t/ρ}}`.
    pub fn rho_margin(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidLoss(format!("rho_margin needs rho > 0, got {rho}")));
        }
        Ok(Self {
            kind: LossKind::RhoMargin { rho },
            declared: Props {
                non_increasing: true,
                bounded: true,
                continuous: true,
                quasi_concave_even: true,
                convex: false,
            },
        })
    }

    /// `max{0, 1 − t}`.
    pub fn hinge() -> Self {
        Self::convex_unbounded(LossKind::Hinge)
    }

    /// `log(1 + e^{−t})`.
    pub fn logistic() -> Self {
        Self::convex_unbounded(LossKind::Logistic)
    }

    /// `e^{−t}`.
    pub fn exponential() -> Self {
        Self::convex_unbounded(LossKind::Exponential)
    }

    fn convex_unbounded(kind: LossKind) -> Self {
        Self {
            kind,
            declared: Props { convex: true, non_increasing: true, continuous: true, ..Props::default() },
        }
    }

    /// Piecewise-linear loss through `knots`, constant beyond them.
    ///
    /// Values must be nonnegative and every declared property must pass
    /// [`verify_loss_properties`] on the standard grid.
    pub fn custom_table(knots: Vec<(f64, f64)>, declared: Props) -> Result<Self> {
        let table = Pwl::new(knots).map_err(|e| Error::InvalidLoss(format!("{e}")))?;
        if let Some((t, v)) = table.knots().iter().find(|k| k.1 < 0.0) {
            return Err(Error::InvalidLoss(format!("custom_table value {v} at t = {t} is negative")));
        }
        let loss = Self { kind: LossKind::CustomTable(table), declared };
        let report = verify_loss_properties(&loss, &TGrid::STANDARD);
        let failed = report.failed_declarations(&declared);
        if !failed.is_empty() {
            return Err(Error::InvalidLoss(format!(
                "custom_table declares properties that fail verification: {}",
                failed.join(", ")
            )));
        }
        Ok(loss)
    }

    pub fn kind(&self) -> &LossKind {
        &self.kind
    }

    pub fn declared(&self) -> Props {
        self.declared
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            LossKind::ZeroOne => "zero_one",
            LossKind::RhoMargin { .. } => "rho_margin",
            LossKind::Hinge => "hinge",
            LossKind::Logistic => "logistic",
            LossKind::Exponential => "exponential",
            LossKind::CustomTable(_) => "custom_table",
        }
    }

    /// Short label such as `rho_margin(rho=2)`.
    pub fn describe(&self) -> String {
        match &self.kind {
            LossKind::RhoMargin { rho } => format!("rho_margin(rho={rho})"),
            LossKind::CustomTable(p) => format!("custom_table({} knots)", p.knots().len()),
            _ => String::from(self.name()),
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match self.kind {
            LossKind::RhoMargin { rho } => Some(rho),
            _ => None,
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            LossKind::ZeroOne => {
                if t <= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            LossKind::RhoMargin { rho } => (1.0 - t / rho).clamp(0.0, 1.0),
            LossKind::Hinge => (1.0 - t).max(0.0),
            LossKind::Logistic => math::softplus_neg(t),
            LossKind::Exponential => math::exp(-t),
            LossKind::CustomTable(p) => p.eval(t),
        }
    }

    /// `C̄(t, η)`.
    pub fn cbar(&self, t: f64, eta: f64) -> Result<f64> {
        check_eta(eta)?;
        Ok(self.cbar_unchecked(t, eta))
    }

    #[inline]
    pub(crate) fn cbar_unchecked(&self, t: f64, eta: f64) -> f64 {
        eta * self.eval(t) + (1.0 - eta) * self.eval(-t)
    }

    /// `φ(inf_{‖x′−x‖≤γ} y f(x′))`, which is `φ(M̲)` for `y = +1` and
    /// `φ(−M̄)` for `y = −1` when `φ` is non-increasing.
    pub fn sup_value(&self, margins: MarginPair, y: Label) -> Result<f64> {
        self.require_non_increasing()?;
        if !(margins.lower <= margins.upper) {
            return Err(domain!("margin pair ({}, {}) is not ordered", margins.lower, margins.upper));
        }
        Ok(match y {
            Label::Pos => self.eval(margins.lower),
            Label::Neg => self.eval(-margins.upper),
        })
    }

    pub(crate) fn require_non_increasing(&self) -> Result<()> {
        if self.declared.non_increasing {
            Ok(())
        } else {
            Err(Error::UnsupportedReduction(format!(
                "{} is not declared non-increasing; its supremum-based lift has no margin form",
                self.describe()
            )))
        }
    }

    /// Points where `φ` may fail to be smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            LossKind::ZeroOne => vec![0.0],
            LossKind::RhoMargin { rho } => vec![0.0, *rho],
            LossKind::Hinge => vec![1.0],
            LossKind::Logistic | LossKind::Exponential => Vec::new(),
            LossKind::CustomTable(p) => p.abscissae().collect(),
        }
    }

    /// Piecewise linear or piecewise constant between [`kinks`](Self::kinks).
    pub fn is_piecewise_linear(&self) -> bool {
        !matches!(self.kind, LossKind::Logistic | LossKind::Exponential)
    }

    /// Whether the endpoint rule applies to `C̄(·, η)` on intervals.
    pub fn endpoint_rule_applies(&self) -> bool {
        let p = self.declared;
        p.quasi_concave_even && p.continuous && p.bounded && p.non_increasing
    }

    /// Shape of `t ↦ C̄(t, η)` for interval minimization.
    pub(crate) fn cbar_shape(&self) -> Shape {
        if self.endpoint_rule_applies() {
            Shape::QuasiConcave
        } else if self.is_piecewise_linear() {
            Shape::Breakpoints
        } else {
            Shape::Unknown
        }
    }

    /// Kinks of `C̄(·, η)`: `±k` for every kink `k` of `φ`.
    pub(crate) fn cbar_kinks(&self) -> Vec<f64> {
        self.kinks().into_iter().flat_map(|k| [k, -k]).collect()
    }
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(domain!("eta = {eta} is outside [0, 1]"))
    }
}

/// Infimum of `C̄(·, η)` on an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct IntervalInf {
    pub value: f64,
    pub at: f64,
    /// `false` when the value comes from the dense-grid fallback.
    pub exact: bool,
}

/// Points of the dense fallback grid in [`cbar_interval_inf`].
pub const INTERVAL_GRID_POINTS: usize = 10_001;

/// `inf_{t ∈ [l, u]} C̄(t, η)`.
///
/// Losses declaring quasi-concave evenness, continuity, boundedness and
/// monotonicity use the endpoint rule; all others fall back to a dense grid
/// and the result is flagged inexact.
pub fn cbar_interval_inf(loss: &MarginLoss, l: f64, u: f64, eta: f64) -> Result<IntervalInf> {
    check_eta(eta)?;
    if !(l <= u) {
        return Err(domain!("interval [{l}, {u}] is empty"));
    }
    let c = |t| loss.cbar_unchecked(t, eta);
    if loss.endpoint_rule_applies() || l == u {
        let (cl, cu) = (c(l), c(u));
        let (value, at) = if cl <= cu { (cl, l) } else { (cu, u) };
        return Ok(IntervalInf { value, at, exact: true });
    }
    let mut best = IntervalInf { value: f64::INFINITY, at: l, exact: false };
    for t in linspace(l, u, INTERVAL_GRID_POINTS) {
        let v = c(t);
        if v < best.value {
            best.value = v;
            best.at = t;
        }
    }
    Ok(best)
}

/// Outcome of one numerical property check.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Check {
    pub passed: bool,
    /// Largest violation seen (0 when none).
    pub worst: f64,
    /// Location of the largest violation.
    pub at: Option<f64>,
}

struct Tracker {
    tol: f64,
    passed: bool,
    worst: f64,
    at: Option<f64>,
}

impl Tracker {
    fn new(tol: f64) -> Self {
        Self { tol, passed: true, worst: 0.0, at: None }
    }

    fn see(&mut self, violation: f64, t: f64) {
        self.see_scaled(violation, t, 1.0);
    }

    fn see_scaled(&mut self, violation: f64, t: f64, scale: f64) {
        if violation.is_nan() || violation > self.tol * scale {
            self.passed = false;
        }
        if violation.is_nan() || violation > self.worst {
            self.worst = violation;
            self.at = Some(t);
        }
    }

    fn finish(self) -> Check {
        Check { passed: self.passed, worst: self.worst, at: self.at }
    }
}

/// Numerical evidence for each analytic property of a loss.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PropertyReport {
    pub convex: Check,
    pub non_increasing: Check,
    pub bounded: Check,
    pub continuous: Check,
    /// `C̄(·, η)` quasi-concave for every tested `η`.
    pub cbar_quasi_concave: Check,
    /// `C̄(t, ½) = C̄(−t, ½)`.
    pub half_even: Check,
    /// `C̄(·, ½)` non-increasing on `t ≥ 0`.
    pub half_monotone: Check,
    /// `C̄(·, η)` non-increasing on `t ≥ 0` for `η > ½`.
    pub upper_monotone: Check,
    /// `C̄(·, η)` non-decreasing on `t ≤ 0` for `η < ½`.
    pub lower_monotone: Check,
    /// Interval infimum attained at an endpoint.
    pub endpoint_rule: Check,
}

impl PropertyReport {
    pub fn quasi_concave_even(&self) -> bool {
        [
            self.cbar_quasi_concave,
            self.half_even,
            self.half_monotone,
            self.upper_monotone,
            self.lower_monotone,
            self.endpoint_rule,
        ]
        .iter()
        .all(|c| c.passed)
    }

    pub fn observed(&self) -> Props {
        Props {
            convex: self.convex.passed,
            non_increasing: self.non_increasing.passed,
            bounded: self.bounded.passed,
            continuous: self.continuous.passed,
            quasi_concave_even: self.quasi_concave_even(),
        }
    }

    /// Names of declared properties the report does not confirm.
    pub fn failed_declarations(&self, declared: &Props) -> Vec<&'static str> {
        let seen = self.observed();
        let mut out = Vec::new();
        let pairs = [
            (declared.convex, seen.convex, "convex"),
            (declared.non_increasing, seen.non_increasing, "non_increasing"),
            (declared.bounded, seen.bounded, "bounded"),
            (declared.continuous, seen.continuous, "continuous"),
            (declared.quasi_concave_even, seen.quasi_concave_even, "quasi_concave_even"),
        ];
        for (d, s, name) in pairs {
            if d && !s {
                out.push(name);
            }
        }
        out
    }
}

/// Checks every property on `grid`.
pub fn verify_loss_properties(loss: &MarginLoss, grid: &TGrid) -> PropertyReport {
    let ts = grid.points();
    let phi: Vec<f64> = ts.iter().map(|&t| loss.eval(t)).collect();
    let n = ts.len();

    let mut convex = Tracker::new(ORDER_TOL);
    let mut k = 1;
    while 2 * k < n {
        for i in k..n - k {
            let mid = 0.5 * (phi[i - k] + phi[i + k]);
            convex.see_scaled(phi[i] - mid, ts[i], 1.0 + phi[i].abs());
        }
        k *= 2;
    }

    let mut monotone = Tracker::new(ORDER_TOL);
    for i in 1..n {
        monotone.see(phi[i] - phi[i - 1], ts[i]);
    }

    let mut bounded = Tracker::new(ORDER_TOL);
    let top = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for probe in [-1e6, -1e3, 1e3, 1e6] {
        let v = loss.eval(probe);
        let excess = if v.is_finite() { v - top } else { f64::INFINITY };
        bounded.see(excess, probe);
    }

    let mut continuous = Tracker::new(1e-6);
    for i in 1..n {
        let (a, b) = (ts[i - 1], ts[i]);
        if (phi[i] - phi[i - 1]).abs() > ORDER_TOL {
            continuous.see(jump_size(loss, a, b), a);
        }
    }

    let half = cbar_checks(loss, &ts);
    PropertyReport {
        convex: convex.finish(),
        non_increasing: monotone.finish(),
        bounded: bounded.finish(),
        continuous: continuous.finish(),
        cbar_quasi_concave: half.quasi_concave,
        half_even: half.even,
        half_monotone: half.half_monotone,
        upper_monotone: half.upper,
        lower_monotone: half.lower,
        endpoint_rule: half.endpoint,
    }
}

/// Bisects toward the steeper half of `[a, b]`; a continuous function leaves a
/// vanishing difference, a jump leaves its height.
fn jump_size(loss: &MarginLoss, mut a: f64, mut b: f64) -> f64 {
    let (mut fa, mut fb) = (loss.eval(a), loss.eval(b));
    for _ in 0..48 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = loss.eval(m);
        if (fm - fa).abs() >= (fb - fm).abs() {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    (fb - fa).abs()
}

struct CbarChecks {
    quasi_concave: Check,
    even: Check,
    half_monotone: Check,
    upper: Check,
    lower: Check,
    endpoint: Check,
}

fn cbar_checks(loss: &MarginLoss, ts: &[f64]) -> CbarChecks {
    let n = ts.len();
    let row = |eta: f64| -> Vec<f64> { ts.iter().map(|&t| loss.cbar_unchecked(t, eta)).collect() };

    let mut qc = Tracker::new(ORDER_TOL);
    for eta in linspace(0.0, 1.0, 11) {
        let v = row(eta);
        let mut prefix = vec![f64::NEG_INFINITY; n];
        let mut suffix = vec![f64::NEG_INFINITY; n];
        for i in 0..n {
            prefix[i] = if i == 0 { v[0] } else { prefix[i - 1].max(v[i]) };
        }
        for i in (0..n).rev() {
            suffix[i] = if i == n - 1 { v[i] } else { suffix[i + 1].max(v[i]) };
        }
        for i in 0..n {
            qc.see(prefix[i].min(suffix[i]) - v[i], ts[i]);
        }
    }

    let mut even = Tracker::new(IDENTITY_TOL);
    let mut half_mono = Tracker::new(ORDER_TOL);
    let mut prev: Option<f64> = None;
    for &t in ts {
        let c = loss.cbar_unchecked(t, 0.5);
        even.see((c - loss.cbar_unchecked(-t, 0.5)).abs(), t);
        if t >= 0.0 {
            if let Some(p) = prev {
                half_mono.see(c - p, t);
            }
            prev = Some(c);
        }
    }

    let mut upper = Tracker::new(ORDER_TOL);
    for eta in [0.6, 0.7, 0.8, 0.9, 1.0] {
        let mut prev: Option<f64> = None;
        for &t in ts.iter().filter(|&&t| t >= 0.0) {
            let c = loss.cbar_unchecked(t, eta);
            if let Some(p) = prev {
                upper.see(c - p, t);
            }
            prev = Some(c);
        }
    }
    let mut lower = Tracker::new(ORDER_TOL);
    for eta in [0.0, 0.1, 0.2, 0.3, 0.4] {
        let mut prev: Option<f64> = None;
        for &t in ts.iter().filter(|&&t| t <= 0.0) {
            let c = loss.cbar_unchecked(t, eta);
            if let Some(p) = prev {
                lower.see(p - c, t);
            }
            prev = Some(c);
        }
    }

    let mut endpoint = Tracker::new(ORDER_TOL);
    let stride = (n / 16).max(1);
    for eta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let v = row(eta);
        for i in (0..n).step_by(stride) {
            let mut running = v[i];
            for j in i + 1..n {
                running = running.min(v[j]);
                if (j - i) % stride == 0 || j == n - 1 {
                    endpoint.see(v[i].min(v[j]) - running, ts[j]);
                }
            }
        }
    }

    CbarChecks {
        quasi_concave: qc.finish(),
        even: even.finish(),
        half_monotone: half_mono.finish(),
        upper: upper.finish(),
        lower: lower.finish(),
        endpoint: endpoint.finish(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_margin_values() {
        let l = MarginLoss::rho_margin(2.0).unwrap();
        assert_eq!(l.eval(1.0), 0.5);
        let l1 = MarginLoss::rho_margin(1.0).unwrap();
        assert_eq!(l1.eval(-0.3), 1.0);
        assert_eq!(MarginLoss::hinge().eval(0.0), 1.0);
        assert!(MarginLoss::rho_margin(0.0).is_err());
        assert!(MarginLoss::rho_margin(-1.0).is_err());
        assert!(MarginLoss::rho_margin(f64::NAN).is_err());
    }

    #[test]
    fn logistic_is_stable() {
        let l = MarginLoss::logistic();
        assert!((l.eval(0.0) - core::f64::consts::LN_2).abs() < 1e-15);
        assert!(l.eval(800.0) >= 0.0);
        assert!((l.eval(-800.0) - 800.0).abs() < 1e-9);
    }

    #[test]
    fn sup_value_cases() {
        let hinge = MarginLoss::hinge();
        let m = MarginPair::closed_form(-0.2, 0.4);
        assert!((hinge.sup_value(m, Label::Pos).unwrap() - 1.2).abs() < 1e-15);
        let r = MarginLoss::rho_margin(1.0).unwrap();
        assert_eq!(r.sup_value(MarginPair::closed_form(0.3, 0.7), Label::Neg).unwrap(), 1.0);
        assert_eq!(r.sup_value(MarginPair::closed_form(0.0, 0.0), Label::Pos).unwrap(), 1.0);
        let bumpy = MarginLoss::custom_table(vec![(0.0, 0.0), (1.0, 1.0)], Props::default()).unwrap();
        assert!(matches!(
            bumpy.sup_value(m, Label::Pos),
            Err(Error::UnsupportedReduction(_))
        ));
    }

    #[test]
    fn cbar_cases() {
        let r = MarginLoss::rho_margin(1.0).unwrap();
        assert_eq!(r.cbar(0.5, 0.5).unwrap(), 0.75);
        assert_eq!(r.cbar(0.0, 0.37).unwrap(), 1.0);
        assert!((MarginLoss::hinge().cbar(0.3, 1.0).unwrap() - 0.7).abs() < 1e-15);
        assert!(r.cbar(0.0, 1.5).is_err());
    }

    #[test]
    fn interval_inf_cases() {
        let r = MarginLoss::rho_margin(1.0).unwrap();
        let v = cbar_interval_inf(&r, -0.9, 0.2, 0.5).unwrap();
        assert!((v.value - 0.55).abs() < 1e-15 && v.exact);
        let r2 = MarginLoss::rho_margin(2.0).unwrap();
        assert!((cbar_interval_inf(&r2, -0.2, 0.2, 0.5).unwrap().value - 0.95).abs() < 1e-15);
        let h = MarginLoss::hinge();
        let d = cbar_interval_inf(&h, 0.4, 0.4, 0.3).unwrap();
        assert_eq!(d.value, h.cbar(0.4, 0.3).unwrap());
        assert!(cbar_interval_inf(&r, 1.0, 0.0, 0.5).is_err());
        assert!(!cbar_interval_inf(&h, -1.0, 1.0, 0.3).unwrap().exact);
    }

    #[test]
    fn builtin_declarations_verify() {
        for loss in [
            MarginLoss::zero_one(),
            MarginLoss::rho_margin(0.5).unwrap(),
            MarginLoss::rho_margin(2.0).unwrap(),
            MarginLoss::hinge(),
            MarginLoss::logistic(),
            MarginLoss::exponential(),
        ] {
            let report = verify_loss_properties(&loss, &TGrid::STANDARD);
            assert!(
                report.failed_declarations(&loss.declared()).is_empty(),
                "{}: {:?}",
                loss.describe(),
                report
            );
        }
    }

    #[test]
    fn verifier_separates_hinge_from_ramp() {
        let hinge = verify_loss_properties(&MarginLoss::hinge(), &TGrid::STANDARD);
        assert!(hinge.convex.passed);
        assert!(!hinge.quasi_concave_even());
        assert!(!hinge.bounded.passed);
        let ramp = verify_loss_properties(&MarginLoss::rho_margin(1.0).unwrap(), &TGrid::STANDARD);
        assert!(ramp.quasi_concave_even());
        assert!(!ramp.convex.passed);
        let exp = verify_loss_properties(&MarginLoss::exponential(), &TGrid::STANDARD);
        assert!(exp.convex.passed && exp.non_increasing.passed);
        let zo = verify_loss_properties(&MarginLoss::zero_one(), &TGrid::STANDARD);
        assert!(!zo.continuous.passed);
        assert!(zo.continuous.worst > 0.99);
    }

    #[test]
    fn custom_table_rejects_false_declaration() {
        let knots = vec![(-1.0, 2.0), (1.0, 0.0)];
        let ok = MarginLoss::custom_table(
            knots.clone(),
            Props { non_increasing: true, bounded: true, continuous: true, ..Props::default() },
        );
        assert!(ok.is_ok());
        let bad = MarginLoss::custom_table(knots, Props { convex: true, ..Props::default() });
        assert!(matches!(bad, Err(Error::InvalidLoss(_))));
        assert!(MarginLoss::custom_table(vec![(0.0, -1.0)], Props::default()).is_err());
    }
}
