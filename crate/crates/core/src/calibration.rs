//! The calibration function
//! `δ_max(ε, x, η) = inf { C_φ(f) − C*_φ : C_{ℓγ}(f) − C*_{ℓγ} ≥ ε }`
//! and grid verdicts built on it.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::grid::{axis_point, ParamGridSpec, VerdictGrid};
use crate::hypothesis::{
    a_bounds_with_args, check_point, sign_reach, Family, FamilyKind, Hypothesis, MarginPair, MonotoneFn, ParamGrid,
};
use crate::loss::{check_eta, MarginLoss};
use crate::risk::{evaluate, Surrogate, SurrogateForm};
use crate::search::{minimize_on, Shape};
use crate::error::domain;
use crate::{math, Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Slack used when comparing `ε` with `|2η − 1|`, `max{η, 1 − η}` and
/// adversarial excesses, so decimal inputs behave like the reals they denote.
pub const BRANCH_TOL: f64 = 1e-12;

/// Default positivity tolerance of a verdict.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Points used to locate `Ā` and `A̲` for tabulated links.
const A_BOUND_POINTS: usize = 2001;

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationQuery {
    pub surrogate: Surrogate,
    pub family: Family,
    pub gamma: f64,
    pub epsilon: f64,
    pub x: Vec<f64>,
    pub eta: f64,
    pub params: ParamGridSpec,
}

impl CalibrationQuery {
    pub fn new(surrogate: Surrogate, family: Family, gamma: f64, epsilon: f64, x: Vec<f64>, eta: f64) -> Self {
        Self { surrogate, family, gamma, epsilon, x, eta, params: ParamGridSpec::default() }
    }

    pub fn with_params(mut self, params: ParamGridSpec) -> Self {
        self.params = params;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    Brute,
    SymmetricReduction,
    GlmReduction,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::SymmetricReduction => "symmetric_reduction",
            Method::GlmReduction => "glm_reduction",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Delta {
    /// Attained (or approached) by `witness`.
    Finite { value: f64, witness: Hypothesis },
    /// No member reaches adversarial excess `ε`.
    Infinite,
}

impl Delta {
    pub fn value(&self) -> Option<f64> {
        match self {
            Delta::Finite { value, .. } => Some(*value),
            Delta::Infinite => None,
        }
    }

    pub fn witness(&self) -> Option<&Hypothesis> {
        match self {
            Delta::Finite { witness, .. } => Some(witness),
            Delta::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Delta::Infinite)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CalibrationValue {
    pub delta: Delta,
    pub method: Method,
    /// `false` when an infimum came from a grid or a dense scan.
    pub exact: bool,
}

impl CalibrationValue {
    pub fn value(&self) -> Option<f64> {
        self.delta.value()
    }
}

/// Constraint set of the reduction, in terms of the margins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Infinite,
    /// `M̲ ≤ 0 ≤ M̄`.
    Straddle,
    /// `M̲ ≤ 0` (`η > ½`).
    Lower,
    /// `M̄ ≥ 0` (`η < ½`).
    Upper,
}

fn branch(epsilon: f64, eta: f64) -> Branch {
    let top = eta.max(1.0 - eta);
    let side = (eta - (1.0 - eta)).abs();
    if epsilon > top + BRANCH_TOL {
        Branch::Infinite
    } else if eta != 0.5 && epsilon <= side + BRANCH_TOL {
        if eta > 0.5 {
            Branch::Lower
        } else {
            Branch::Upper
        }
    } else {
        Branch::Straddle
    }
}

impl Branch {
    fn admits(self, m: MarginPair) -> bool {
        match self {
            Branch::Infinite => false,
            Branch::Straddle => m.lower <= 0.0 && m.upper >= 0.0,
            Branch::Lower => m.lower <= 0.0,
            Branch::Upper => m.upper >= 0.0,
        }
    }

    fn admits_cat(self, c: Cat) -> bool {
        match self {
            Branch::Infinite => false,
            Branch::Straddle => c == Cat::Straddle,
            Branch::Lower => c != Cat::Pos,
            Branch::Upper => c != Cat::Neg,
        }
    }
}

/// Sign pattern of the margins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cat {
    Straddle = 0,
    Pos = 1,
    Neg = 2,
}

const CATS: [Cat; 3] = [Cat::Straddle, Cat::Pos, Cat::Neg];

impl Cat {
    fn of(m: MarginPair) -> Self {
        if m.upper < 0.0 {
            Cat::Neg
        } else if m.lower > 0.0 {
            Cat::Pos
        } else {
            Cat::Straddle
        }
    }

    fn adv(self, eta: f64) -> f64 {
        match self {
            Cat::Straddle => 1.0,
            Cat::Pos => 1.0 - eta,
            Cat::Neg => eta,
        }
    }
}

/// Surrogate risk `η·pos + (1 − η)·neg` of one hypothesis at a fixed `x`.
#[derive(Debug, Clone, Copy)]
struct Rec {
    pos: f64,
    neg: f64,
    cat: Cat,
}

/// Per-category minima `(risk, index)`.
type CatMin = [Option<(f64, usize)>; 3];

/// Every grid member (and extra hypothesis) evaluated at one `x`.
struct Table {
    grid: ParamGrid,
    extra: Vec<Hypothesis>,
    recs: Vec<Rec>,
}

impl Table {
    fn build(
        surrogate: &Surrogate,
        family: &Family,
        params: &ParamGridSpec,
        extra: &[Hypothesis],
        x: &[f64],
        gamma: f64,
    ) -> Result<Self> {
        for h in extra {
            family.validate(h)?;
        }
        let grid = ParamGrid::new(family, params)?;
        let loss = surrogate.loss();
        let mut recs = Vec::with_capacity(grid.len() + extra.len());
        let mut push = |h: &Hypothesis| -> Result<()> {
            let ev = evaluate(family, h, x, gamma)?;
            let (pos, neg) = match surrogate.form() {
                SurrogateForm::Plain => (loss.eval(ev.value), loss.eval(-ev.value)),
                SurrogateForm::Sup => (loss.eval(ev.margins.lower), loss.eval(-ev.margins.upper)),
            };
            recs.push(Rec { pos, neg, cat: Cat::of(ev.margins) });
            Ok(())
        };
        for h in grid.iter() {
            push(&h)?;
        }
        for h in extra {
            push(h)?;
        }
        Ok(Self { grid, extra: extra.to_vec(), recs })
    }

    fn hypothesis(&self, i: usize) -> Hypothesis {
        if i < self.grid.len() {
            self.grid.get(i)
        } else {
            self.extra[i - self.grid.len()].clone()
        }
    }

    fn minima(&self, eta: f64) -> CatMin {
        let mut best: CatMin = [None; 3];
        for (i, r) in self.recs.iter().enumerate() {
            let v = eta * r.pos + (1.0 - eta) * r.neg;
            let slot = &mut best[r.cat as usize];
            if slot.map_or(true, |(b, _)| v < b) {
                *slot = Some((v, i));
            }
        }
        best
    }
}

fn overall_min(m: &CatMin) -> f64 {
    m.iter().flatten().map(|p| p.0).fold(f64::INFINITY, f64::min)
}

/// Smallest risk among admitted categories; ties go to the lower index.
fn pick(m: &CatMin, admit: impl Fn(Cat) -> bool) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for c in CATS {
        if let (true, Some((v, i))) = (admit(c), m[c as usize]) {
            if best.map_or(true, |(bv, bi)| v < bv || (v == bv && i < bi)) {
                best = Some((v, i));
            }
        }
    }
    best
}

/// Objective of an interval reduction, as a function of one scalar `t`.
#[derive(Debug, Clone, Copy)]
enum Objective {
    /// `C̄(t, η)`.
    Cbar,
    /// `η φ(t − γ) + (1 − η) φ(−t − γ)`: sup loss of a linear model with `w·x = t`.
    ShiftedCbar { gamma: f64 },
}

impl Objective {
    fn eval(self, loss: &MarginLoss, t: f64, eta: f64) -> f64 {
        match self {
            Objective::Cbar => loss.cbar_unchecked(t, eta),
            Objective::ShiftedCbar { gamma } => eta * loss.eval(t - gamma) + (1.0 - eta) * loss.eval(-t - gamma),
        }
    }

    fn kinks(self, loss: &MarginLoss) -> Vec<f64> {
        match self {
            Objective::Cbar => loss.cbar_kinks(),
            Objective::ShiftedCbar { gamma } => loss.kinks().into_iter().flat_map(|k| [k + gamma, -k - gamma]).collect(),
        }
    }

    fn shape(self, loss: &MarginLoss) -> Shape {
        match self {
            Objective::Cbar => loss.cbar_shape(),
            Objective::ShiftedCbar { .. } if loss.is_piecewise_linear() => Shape::Breakpoints,
            Objective::ShiftedCbar { .. } => Shape::Unknown,
        }
    }
}

/// How a scalar `t` becomes a family member.
#[derive(Debug, Clone)]
enum Builder {
    /// Unit `w` with `w·x = t`.
    Linear { e: Vec<f64>, r: f64 },
    /// Unit `w` with `w·x = s` and `b = t − g(s)`.
    Glm { e: Vec<f64>, r: f64, link: MonotoneFn, s_up: f64, s_down: f64 },
    /// The pair `(t, t)`.
    Diagonal,
    /// The pair `(t, R)`.
    LowerValue { range: f64 },
}

/// Reachable intervals of `t` and the objective over them.
#[derive(Debug, Clone)]
struct Plan {
    objective: Objective,
    full: (f64, f64),
    straddle: (f64, f64),
    lower: (f64, f64),
    upper: (f64, f64),
    builder: Builder,
}

impl Plan {
    fn interval(&self, b: Branch) -> (f64, f64) {
        match b {
            Branch::Straddle => self.straddle,
            Branch::Lower => self.lower,
            Branch::Upper => self.upper,
            Branch::Infinite => self.full,
        }
    }
}

/// Unit vector along `x` (or the first axis when `x = 0`) and its rotation by a quarter turn.
fn frame(x: &[f64]) -> (Vec<f64>, f64) {
    let r = math::norm(x);
    let e = if r > 0.0 { x.iter().map(|v| v / r).collect() } else { axis_point(x.len(), 1.0) };
    (e, r)
}

fn unit_with_projection(e: &[f64], r: f64, s: f64) -> Vec<f64> {
    if r == 0.0 {
        return e.to_vec();
    }
    let c = (s / r).clamp(-1.0, 1.0);
    let q = math::sqrt((1.0 - c * c).max(0.0));
    alloc::vec![c * e[0] - q * e[1], c * e[1] + q * e[0]]
}

/// How a family is reduced at a given `x`.
enum Mode {
    Interval(Plan),
    /// Branch predicates applied to grid minima.
    LemmaGrid { regular: bool, table: Table },
    Brute(Table),
}

/// Evaluates `δ_max(·, x, ·)` at one `x` for many `(ε, η)`.
struct Evaluator<'a> {
    surrogate: &'a Surrogate,
    family: &'a Family,
    gamma: f64,
    x: Vec<f64>,
    method: Method,
    mode: Mode,
}

impl<'a> Evaluator<'a> {
    fn brute(
        surrogate: &'a Surrogate,
        family: &'a Family,
        gamma: f64,
        x: &[f64],
        params: &ParamGridSpec,
        extra: &[Hypothesis],
    ) -> Result<Self> {
        check_point(family, x, gamma)?;
        let table = Table::build(surrogate, family, params, extra, x, gamma)?;
        Ok(Self { surrogate, family, gamma, x: x.to_vec(), method: Method::Brute, mode: Mode::Brute(table) })
    }

    fn reduced(
        surrogate: &'a Surrogate,
        family: &'a Family,
        gamma: f64,
        x: &[f64],
        params: &ParamGridSpec,
    ) -> Result<Self> {
        check_point(family, x, gamma)?;
        let (method, mode) = match family.kind() {
            FamilyKind::Glm { link, bias_bound } => {
                let (pos, neg) = sign_reach(family, x, gamma, params)?;
                if !(pos && neg) {
                    return Err(Error::UnsupportedReduction(format!(
                        "{} cannot separate the {gamma}-ball around x in both directions",
                        family.describe()
                    )));
                }
                let global = link.eval(1.0 + gamma) < *bias_bound && link.eval(-1.0 - gamma) > -*bias_bound;
                let mode = if global && family.dim() == 2 && surrogate.form() == SurrogateForm::Plain {
                    Mode::Interval(glm_plan(link, *bias_bound, x, gamma)?)
                } else {
                    Mode::LemmaGrid { regular: true, table: Table::build(surrogate, family, params, &[], x, gamma)? }
                };
                (Method::GlmReduction, mode)
            }
            _ => {
                let mode = match symmetric_plan(surrogate, family, x, gamma) {
                    Some(plan) => Mode::Interval(plan),
                    None => {
                        let (pos, _) = sign_reach(family, x, gamma, params)?;
                        Mode::LemmaGrid { regular: pos, table: Table::build(surrogate, family, params, &[], x, gamma)? }
                    }
                };
                (Method::SymmetricReduction, mode)
            }
        };
        Ok(Self { surrogate, family, gamma, x: x.to_vec(), method, mode })
    }

    fn infinite(&self, exact: bool) -> CalibrationValue {
        CalibrationValue { delta: Delta::Infinite, method: self.method, exact }
    }

    /// `δ_max(ε, x, η)` for every `ε`, in order.
    fn eval(&self, epsilons: &[f64], eta: f64) -> Result<Vec<CalibrationValue>> {
        check_eta(eta)?;
        for &e in epsilons {
            if !(e > 0.0 && e.is_finite()) {
                return Err(domain!("epsilon = {e} must be positive and finite"));
            }
        }
        match &self.mode {
            Mode::Brute(table) => {
                let m = table.minima(eta);
                let c_sur = overall_min(&m);
                let c_adv = CATS.iter().filter(|c| m[**c as usize].is_some()).map(|c| c.adv(eta)).fold(1.0, f64::min);
                Ok(epsilons
                    .iter()
                    .map(|&e| match pick(&m, |c| c.adv(eta) - c_adv >= e - BRANCH_TOL) {
                        Some((v, i)) => CalibrationValue {
                            delta: Delta::Finite { value: v - c_sur, witness: table.hypothesis(i) },
                            method: Method::Brute,
                            exact: false,
                        },
                        None => self.infinite(false),
                    })
                    .collect())
            }
            Mode::LemmaGrid { regular, table } => {
                let m = table.minima(eta);
                let c_sur = overall_min(&m);
                Ok(epsilons
                    .iter()
                    .map(|&e| {
                        let b = branch(e, eta);
                        if !regular || b == Branch::Infinite {
                            return self.infinite(true);
                        }
                        match pick(&m, |c| b.admits_cat(c)) {
                            Some((v, i)) => CalibrationValue {
                                delta: Delta::Finite { value: (v - c_sur).max(0.0), witness: table.hypothesis(i) },
                                method: self.method,
                                exact: false,
                            },
                            None => self.infinite(false),
                        }
                    })
                    .collect())
            }
            Mode::Interval(plan) => {
                let loss = self.surrogate.loss();
                let obj = |t: f64| plan.objective.eval(loss, t, eta);
                let kinks = plan.objective.kinks(loss);
                let shape = plan.objective.shape(loss);
                let cstar = minimize_on(obj, plan.full.0, plan.full.1, &kinks, shape);
                let mut out = Vec::with_capacity(epsilons.len());
                for &e in epsilons {
                    let b = branch(e, eta);
                    if b == Branch::Infinite {
                        out.push(self.infinite(true));
                        continue;
                    }
                    let (l, u) = plan.interval(b);
                    if l > u {
                        out.push(self.infinite(true));
                        continue;
                    }
                    let con = minimize_on(obj, l, u, &kinks, shape);
                    let witness = self.build_witness(plan, con.at, (l, u), b)?;
                    out.push(CalibrationValue {
                        delta: Delta::Finite { value: (con.value - cstar.value).max(0.0), witness },
                        method: self.method,
                        exact: con.exact && cstar.exact,
                    });
                }
                Ok(out)
            }
        }
    }

    fn build_one(&self, plan: &Plan, t: f64) -> Option<Hypothesis> {
        match &plan.builder {
            Builder::Linear { e, r } => Some(Hypothesis::Linear { w: unit_with_projection(e, *r, t) }),
            Builder::Glm { e, r, link, s_up, s_down } => {
                let (_, bias_bound) = self.family.glm_parts()?;
                let mut cands = if t >= 0.0 { [*s_up, *r, -*r] } else { [*s_down, -*r, *r] };
                if *r == 0.0 {
                    cands = [0.0; 3];
                }
                cands.iter().find_map(|&s| {
                    let w = unit_with_projection(e, *r, s);
                    let b = t - link.eval(math::dot(&w, &self.x));
                    (b.abs() <= bias_bound).then_some(Hypothesis::Glm { w, b })
                })
            }
            Builder::Diagonal => Some(Hypothesis::Pair { lo: t, hi: t }),
            Builder::LowerValue { range } => Some(Hypothesis::Pair { lo: t, hi: *range }),
        }
    }

    /// Member realizing `t` inside the constraint set, nudging `t` toward the
    /// interior when rounding pushes it out.
    fn build_witness(&self, plan: &Plan, t: f64, (l, u): (f64, f64), b: Branch) -> Result<Hypothesis> {
        let mid = 0.5 * (l + u);
        let dir = if mid >= t { 1.0 } else { -1.0 };
        let mut step = f64::EPSILON * (1.0 + t.abs());
        let mut last = None;
        for _ in 0..48 {
            let tt = t + dir * (step - f64::EPSILON * (1.0 + t.abs()));
            let tt = if dir > 0.0 { tt.min(mid) } else { tt.max(mid) };
            if let Some(h) = self.build_one(plan, tt) {
                let m = self.family.margins_unchecked(&h, &self.x, self.gamma)?;
                if b.admits(m) {
                    return Ok(h);
                }
                last = Some(h);
            }
            step *= 2.0;
        }
        last.ok_or_else(|| domain!("no member realizes the value {t}"))
    }
}

fn symmetric_plan(surrogate: &Surrogate, family: &Family, x: &[f64], gamma: f64) -> Option<Plan> {
    let (e, r) = frame(x);
    let sup = surrogate.form() == SurrogateForm::Sup;
    match family.kind() {
        FamilyKind::Linear if family.dim() == 2 => {
            if r <= gamma {
                // X1: every branch is infinite, the intervals are never used.
                return Some(Plan {
                    objective: Objective::Cbar,
                    full: (0.0, 0.0),
                    straddle: (1.0, 0.0),
                    lower: (1.0, 0.0),
                    upper: (1.0, 0.0),
                    builder: Builder::Linear { e, r },
                });
            }
            let objective = if sup { Objective::ShiftedCbar { gamma } } else { Objective::Cbar };
            Some(Plan {
                objective,
                full: (-r, r),
                straddle: (-gamma, gamma),
                lower: (-r, gamma),
                upper: (-gamma, r),
                builder: Builder::Linear { e, r },
            })
        }
        FamilyKind::AllMeasurable { range } => {
            let big = *range;
            Some(if sup {
                Plan {
                    objective: Objective::Cbar,
                    full: (-big, big),
                    straddle: (0.0, 0.0),
                    lower: (-big, 0.0),
                    upper: (0.0, big),
                    builder: Builder::Diagonal,
                }
            } else {
                Plan {
                    objective: Objective::Cbar,
                    full: (-big, big),
                    straddle: (-big, 0.0),
                    lower: (-big, 0.0),
                    upper: (-big, big),
                    builder: Builder::LowerValue { range: big },
                }
            })
        }
        _ => None,
    }
}

fn glm_plan(link: &MonotoneFn, bias_bound: f64, x: &[f64], gamma: f64) -> Result<Plan> {
    let (e, r) = frame(x);
    let ((a_up, a_down), (s_up, s_down)) = a_bounds_with_args(link, r, gamma, A_BOUND_POINTS)?;
    let lo = link.eval(-r) - bias_bound;
    let hi = link.eval(r) + bias_bound;
    Ok(Plan {
        objective: Objective::Cbar,
        full: (lo, hi),
        straddle: (a_down, a_up),
        lower: (lo, a_up),
        upper: (a_down, hi),
        builder: Builder::Glm { e, r, link: link.clone(), s_up, s_down },
    })
}

/// `δ_max` by enumerating the parameter grid.
pub fn delta_max_bruteforce(q: &CalibrationQuery) -> Result<CalibrationValue> {
    delta_max_bruteforce_with(q, &[])
}

/// [`delta_max_bruteforce`] over the grid together with `extra` members.
pub fn delta_max_bruteforce_with(q: &CalibrationQuery, extra: &[Hypothesis]) -> Result<CalibrationValue> {
    let ev = Evaluator::brute(&q.surrogate, &q.family, q.gamma, &q.x, &q.params, extra)?;
    Ok(ev.eval(&[q.epsilon], q.eta)?.remove(0))
}

/// `δ_max` by reducing the infimum to reachable margin sets.
///
/// Linear models in the plane, free margin pairs, and plain losses on
/// generalized linear models with `g(1+γ) < G` and `g(−1−γ) > −G` reduce to
/// one-dimensional intervals. Networks, one-dimensional inputs and sup losses
/// on generalized linear models apply the same branch predicates to the
/// parameter grid.
pub fn delta_max_reduced(q: &CalibrationQuery) -> Result<CalibrationValue> {
    let ev = Evaluator::reduced(&q.surrogate, &q.family, q.gamma, &q.x, &q.params)?;
    Ok(ev.eval(&[q.epsilon], q.eta)?.remove(0))
}

/// Which engine a verdict uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MethodChoice {
    /// Reduction where supported, brute force otherwise.
    #[default]
    Auto,
    Brute,
    Reduced,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct VerdictOptions {
    pub grid: VerdictGrid,
    pub params: ParamGridSpec,
    pub tol: f64,
    pub method: MethodChoice,
}

impl VerdictOptions {
    pub fn default_for(gamma: f64) -> Self {
        Self {
            grid: VerdictGrid::default_for(gamma),
            params: ParamGridSpec::default(),
            tol: DEFAULT_TOL,
            method: MethodChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GridEntry {
    pub epsilon: f64,
    pub x_norm: f64,
    pub eta: f64,
    pub value: CalibrationValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    /// No finite value at or below the tolerance on the grid.
    ConsistentWithCalibration,
    CalibrationViolated,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::ConsistentWithCalibration => "consistent-with-calibration",
            Verdict::CalibrationViolated => "calibration-violated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct VerdictReport {
    pub surrogate: String,
    pub family: String,
    pub gamma: f64,
    pub tol: f64,
    pub verdict: Verdict,
    /// Smallest finite value, first in `(ε, ‖x‖, η)` order.
    pub minimum: Option<GridEntry>,
    pub evaluated: usize,
    pub finite: usize,
    pub entries: Vec<GridEntry>,
}

/// Entries for one `‖x‖`, ordered by `ε` then `η`. `x = (‖x‖, 0, …)`.
pub fn verdict_row(
    surrogate: &Surrogate,
    family: &Family,
    gamma: f64,
    x_norm: f64,
    opts: &VerdictOptions,
) -> Result<Vec<GridEntry>> {
    let x = axis_point(family.dim(), x_norm);
    let ev = match opts.method {
        MethodChoice::Brute => Evaluator::brute(surrogate, family, gamma, &x, &opts.params, &[])?,
        MethodChoice::Reduced => Evaluator::reduced(surrogate, family, gamma, &x, &opts.params)?,
        MethodChoice::Auto => match Evaluator::reduced(surrogate, family, gamma, &x, &opts.params) {
            Err(Error::UnsupportedReduction(_)) => Evaluator::brute(surrogate, family, gamma, &x, &opts.params, &[])?,
            other => other?,
        },
    };
    let eps = &opts.grid.epsilons;
    let mut by_eta = Vec::with_capacity(opts.grid.etas.len());
    for &eta in &opts.grid.etas {
        by_eta.push(ev.eval(eps, eta)?);
    }
    let mut out = Vec::with_capacity(eps.len() * by_eta.len());
    for (i, &epsilon) in eps.iter().enumerate() {
        for (j, &eta) in opts.grid.etas.iter().enumerate() {
            out.push(GridEntry { epsilon, x_norm, eta, value: by_eta[j][i].clone() });
        }
    }
    Ok(out)
}

/// Combines rows from [`verdict_row`], given in `x_norms` order, into a report.
pub fn assemble_verdict(
    surrogate: &Surrogate,
    family: &Family,
    gamma: f64,
    opts: &VerdictOptions,
    rows: Vec<Vec<GridEntry>>,
) -> Result<VerdictReport> {
    if !(opts.tol > 0.0) {
        return Err(Error::Config(format!("tolerance {} must be positive", opts.tol)));
    }
    let n_eta = opts.grid.etas.len();
    let n_eps = opts.grid.epsilons.len();
    if rows.len() != opts.grid.x_norms.len() || rows.iter().any(|r| r.len() != n_eps * n_eta) {
        return Err(Error::Config(String::from("verdict rows do not match the grid")));
    }
    let mut entries = Vec::with_capacity(rows.len() * n_eps * n_eta);
    for i in 0..n_eps {
        for row in &rows {
            entries.extend_from_slice(&row[i * n_eta..(i + 1) * n_eta]);
        }
    }
    let mut minimum: Option<&GridEntry> = None;
    let mut finite = 0;
    for e in &entries {
        if let Some(v) = e.value.value() {
            finite += 1;
            if minimum.map_or(true, |m| v < m.value.value().unwrap_or(f64::INFINITY)) {
                minimum = Some(e);
            }
        }
    }
    let minimum = minimum.cloned();
    let violated = minimum.as_ref().and_then(|m| m.value.value()).is_some_and(|v| v <= opts.tol);
    Ok(VerdictReport {
        surrogate: surrogate.describe(),
        family: family.describe(),
        gamma,
        tol: opts.tol,
        verdict: if violated { Verdict::CalibrationViolated } else { Verdict::ConsistentWithCalibration },
        minimum,
        evaluated: entries.len(),
        finite,
        entries,
    })
}

/// Evaluates `δ_max` over the `(ε, ‖x‖, η)` grid.
///
/// A violation is any finite value at or below `tol`. Absence of one is
/// evidence on the grid, not a proof of calibration.
pub fn calibration_verdict(
    surrogate: &Surrogate,
    family: &Family,
    gamma: f64,
    opts: &VerdictOptions,
) -> Result<VerdictReport> {
    let rows = opts
        .grid
        .x_norms
        .iter()
        .map(|&r| verdict_row(surrogate, family, gamma, r, opts))
        .collect::<Result<Vec<_>>>()?;
    assemble_verdict(surrogate, family, gamma, opts, rows)
}

/// Smallest finite `δ_max(ε, x, η)` over the `(‖x‖, η)` grid, or `None` when
/// every entry is infinite.
pub fn uniform_delta(
    surrogate: &Surrogate,
    family: &Family,
    gamma: f64,
    epsilon: f64,
    opts: &VerdictOptions,
) -> Result<Option<GridEntry>> {
    let mut o = opts.clone();
    o.grid.epsilons = alloc::vec![epsilon];
    Ok(calibration_verdict(surrogate, family, gamma, &o)?.minimum)
}
