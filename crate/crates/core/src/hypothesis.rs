//! Hypothesis families and adversarial margins
//!
//! ```text
//! M̲(f, x, γ) = inf_{‖x′−x‖≤γ} f(x′),   M̄(f, x, γ) = sup_{‖x′−x‖≤γ} f(x′).
//! ```
//!
//! Linear models and generalized linear models have closed forms. One-layer
//! ReLU networks are piecewise linear with all breaklines through the origin,
//! so their extrema over a disk sit on a short list of candidate points
//! (see [`MarginMethod::VertexEnumeration`]). The all-measurable class is
//! modelled at each `x` by a free margin pair `(a, b)`, `−R ≤ a ≤ b ≤ R`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::domain;
use crate::grid::{linspace, ParamGridSpec};
use crate::math;
use crate::pwl::Pwl;
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// How a margin pair was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MarginMethod {
    ClosedForm,
    /// Exact extremum over the finitely many points where a piecewise-linear
    /// function can attain it on a disk.
    VertexEnumeration,
    /// Extremum over a uniform ball grid; approximate.
    GridOracle,
}

/// Adversarial margins `(M̲, M̄)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MarginPair {
    pub lower: f64,
    pub upper: f64,
    pub method: MarginMethod,
}

impl MarginPair {
    pub fn closed_form(lower: f64, upper: f64) -> Self {
        Self { lower, upper, method: MarginMethod::ClosedForm }
    }

    /// Margins of `−f`.
    pub fn negate(self) -> Self {
        Self { lower: -self.upper, upper: -self.lower, method: self.method }
    }

    /// `M̲ ≤ 0 ≤ M̄`.
    pub fn straddles_zero(&self) -> bool {
        self.lower <= 0.0 && 0.0 <= self.upper
    }
}

/// Non-decreasing continuous link function of a generalized linear model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MonotoneFn {
    Identity,
    Relu,
    Table(Pwl),
}

impl MonotoneFn {
    /// Piecewise-linear link; values must not decrease.
    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        let p = Pwl::new(knots)?;
        if !p.is_non_decreasing() {
            return Err(Error::InvalidFamily(String::from("link table must be non-decreasing")));
        }
        Ok(MonotoneFn::Table(p))
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            MonotoneFn::Identity => s,
            MonotoneFn::Relu => s.max(0.0),
            MonotoneFn::Table(p) => p.eval(s),
        }
    }

    pub fn kinks(&self) -> Vec<f64> {
        match self {
            MonotoneFn::Identity => Vec::new(),
            MonotoneFn::Relu => vec![0.0],
            MonotoneFn::Table(p) => p.abscissae().collect(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MonotoneFn::Identity => "identity",
            MonotoneFn::Relu => "relu",
            MonotoneFn::Table(_) => "table",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// `x ↦ w·x`, `‖w‖ = 1`.
    Linear,
    /// `x ↦ g(w·x) + b`, `‖w‖ = 1`, `|b| ≤ G`.
    Glm { link: MonotoneFn, bias_bound: f64 },
    /// `x ↦ Σⱼ uⱼ (wⱼ·x)₊`, `‖u‖₁ ≤ Λ`, `‖wⱼ‖ ≤ W`.
    OneLayerNn { width: usize, lambda: f64, w_bound: f64 },
    /// Free margin pair `(a, b)` with `−R ≤ a ≤ b ≤ R`.
    AllMeasurable { range: f64 },
}

/// A hypothesis set on the closed unit ball of `ℝᵈ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    kind: FamilyKind,
    dim: usize,
}

/// Parameters of one member of a [`Family`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Hypothesis {
    Linear { w: Vec<f64> },
    Glm { w: Vec<f64>, b: f64 },
    Nn { u: Vec<f64>, w: Vec<Vec<f64>> },
    Pair { lo: f64, hi: f64 },
}

impl Hypothesis {
    /// Parameters flattened in declaration order.
    pub fn params(&self) -> Vec<f64> {
        match self {
            Hypothesis::Linear { w } => w.clone(),
            Hypothesis::Glm { w, b } => w.iter().copied().chain([*b]).collect(),
            Hypothesis::Nn { u, w } => u.iter().copied().chain(w.iter().flatten().copied()).collect(),
            Hypothesis::Pair { lo, hi } => vec![*lo, *hi],
        }
    }
}

/// Relative slack allowed on norm constraints.
const NORM_SLACK: f64 = 1e-12;

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidFamily(format!("{name} must be positive and finite, got {v}")))
    }
}

fn unit(w: Vec<f64>) -> Result<Vec<f64>> {
    let n = math::norm(&w);
    if !(n.is_finite() && n > 0.0) {
        return Err(domain!("weight vector has zero or non-finite norm"));
    }
    if (n - 1.0).abs() <= NORM_SLACK {
        Ok(w)
    } else {
        Ok(w.into_iter().map(|v| v / n).collect())
    }
}

impl Family {
    pub fn linear(dim: usize) -> Result<Self> {
        Self::new(FamilyKind::Linear, dim)
    }

    pub fn glm(dim: usize, link: MonotoneFn, bias_bound: f64) -> Result<Self> {
        if !(bias_bound.is_finite() && bias_bound >= 0.0) {
            return Err(Error::InvalidFamily(format!("bias bound must be ≥ 0, got {bias_bound}")));
        }
        Self::new(FamilyKind::Glm { link, bias_bound }, dim)
    }

    pub fn relu_glm(dim: usize, bias_bound: f64) -> Result<Self> {
        Self::glm(dim, MonotoneFn::Relu, bias_bound)
    }

    pub fn one_layer_nn(dim: usize, width: usize, lambda: f64, w_bound: f64) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidFamily(String::from("network width must be at least 1")));
        }
        positive("lambda", lambda)?;
        positive("w_bound", w_bound)?;
        Self::new(FamilyKind::OneLayerNn { width, lambda, w_bound }, dim)
    }

    pub fn all_measurable(dim: usize, range: f64) -> Result<Self> {
        positive("range", range)?;
        Self::new(FamilyKind::AllMeasurable { range }, dim)
    }

    fn new(kind: FamilyKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidFamily(String::from("dimension must be at least 1")));
        }
        Ok(Self { kind, dim })
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &'static str {
        match &self.kind {
            FamilyKind::Linear => "linear",
            FamilyKind::Glm { link: MonotoneFn::Relu, .. } => "relu_glm",
            FamilyKind::Glm { .. } => "glm",
            FamilyKind::OneLayerNn { .. } => "one_layer_nn",
            FamilyKind::AllMeasurable { .. } => "all_measurable",
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            FamilyKind::Linear => format!("linear(d={})", self.dim),
            FamilyKind::Glm { link, bias_bound } => {
                format!("glm(d={}, g={}, G={})", self.dim, link.name(), bias_bound)
            }
            FamilyKind::OneLayerNn { width, lambda, w_bound } => {
                format!("one_layer_nn(d={}, n={}, Λ={}, W={})", self.dim, width, lambda, w_bound)
            }
            FamilyKind::AllMeasurable { range } => format!("all_measurable(d={}, R={})", self.dim, range),
        }
    }

    /// Closed under `f ↦ −f`.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self.kind, FamilyKind::Glm { .. })
    }

    /// `(g, G)` for generalized linear models.
    pub fn glm_parts(&self) -> Option<(&MonotoneFn, f64)> {
        match &self.kind {
            FamilyKind::Glm { link, bias_bound } => Some((link, *bias_bound)),
            _ => None,
        }
    }

    /// Linear member with direction `w`, normalized.
    pub fn linear_point(&self, w: Vec<f64>) -> Result<Hypothesis> {
        let h = Hypothesis::Linear { w: unit(w)? };
        self.validate(&h)?;
        Ok(h)
    }

    pub fn glm_point(&self, w: Vec<f64>, b: f64) -> Result<Hypothesis> {
        let h = Hypothesis::Glm { w: unit(w)?, b };
        self.validate(&h)?;
        Ok(h)
    }

    pub fn nn_point(&self, u: Vec<f64>, w: Vec<Vec<f64>>) -> Result<Hypothesis> {
        let h = Hypothesis::Nn { u, w };
        self.validate(&h)?;
        Ok(h)
    }

    pub fn pair_point(&self, lo: f64, hi: f64) -> Result<Hypothesis> {
        let h = Hypothesis::Pair { lo, hi };
        self.validate(&h)?;
        Ok(h)
    }

    /// The zero function, when the family contains it.
    pub fn zero(&self) -> Result<Hypothesis> {
        match &self.kind {
            FamilyKind::OneLayerNn { width, .. } => {
                self.nn_point(vec![0.0; *width], vec![vec![0.0; self.dim]; *width])
            }
            FamilyKind::AllMeasurable { .. } => self.pair_point(0.0, 0.0),
            _ => Err(Error::UnsupportedFamily(format!("{} does not contain f = 0", self.describe()))),
        }
    }

    /// Checks that `h` satisfies the parameter constraints of this family.
    pub fn validate(&self, h: &Hypothesis) -> Result<()> {
        let d = self.dim;
        let bad = |msg: String| Err(Error::InvalidFamily(msg));
        match (&self.kind, h) {
            (FamilyKind::Linear, Hypothesis::Linear { w }) | (FamilyKind::Glm { .. }, Hypothesis::Glm { w, .. }) => {
                if w.len() != d {
                    return bad(format!("weight has dimension {}, family has {d}", w.len()));
                }
                let n = math::norm(w);
                if (n - 1.0).abs() > 1e-9 {
                    return bad(format!("weight norm {n} is not 1"));
                }
                if let (FamilyKind::Glm { bias_bound, .. }, Hypothesis::Glm { b, .. }) = (&self.kind, h) {
                    if !(b.abs() <= bias_bound * (1.0 + NORM_SLACK)) {
                        return bad(format!("bias {b} exceeds bound {bias_bound}"));
                    }
                }
                Ok(())
            }
            (FamilyKind::OneLayerNn { width, lambda, w_bound }, Hypothesis::Nn { u, w }) => {
                if u.len() != *width || w.len() != *width {
                    return bad(format!("network needs {width} units"));
                }
                if w.iter().any(|wj| wj.len() != d) {
                    return bad(format!("hidden weights must have dimension {d}"));
                }
                let l1: f64 = u.iter().map(|v| v.abs()).sum();
                if !(l1 <= lambda * (1.0 + NORM_SLACK)) {
                    return bad(format!("‖u‖₁ = {l1} exceeds Λ = {lambda}"));
                }
                if let Some(wj) = w.iter().find(|wj| !(math::norm(wj) <= w_bound * (1.0 + NORM_SLACK))) {
                    return bad(format!("hidden weight norm {} exceeds W = {w_bound}", math::norm(wj)));
                }
                Ok(())
            }
            (FamilyKind::AllMeasurable { range }, Hypothesis::Pair { lo, hi }) => {
                if !(lo <= hi && lo.abs() <= *range && hi.abs() <= *range) {
                    return bad(format!("pair ({lo}, {hi}) must satisfy −{range} ≤ a ≤ b ≤ {range}"));
                }
                Ok(())
            }
            _ => bad(format!("parameters do not belong to {}", self.describe())),
        }
    }

    /// `−f` for symmetric families.
    pub fn negate(&self, h: &Hypothesis) -> Result<Hypothesis> {
        match h {
            Hypothesis::Linear { w } => Ok(Hypothesis::Linear { w: w.iter().map(|v| -v).collect() }),
            Hypothesis::Nn { u, w } => Ok(Hypothesis::Nn { u: u.iter().map(|v| -v).collect(), w: w.clone() }),
            Hypothesis::Pair { lo, hi } => Ok(Hypothesis::Pair { lo: -hi, hi: -lo }),
            Hypothesis::Glm { .. } => Err(Error::UnsupportedFamily(String::from(
                "generalized linear models are not closed under negation",
            ))),
        }
    }

    #[inline]
    pub(crate) fn value_unchecked(&self, h: &Hypothesis, x: &[f64]) -> f64 {
        match h {
            Hypothesis::Linear { w } => math::dot(w, x),
            Hypothesis::Glm { w, b } => self.link().eval(math::dot(w, x)) + b,
            Hypothesis::Nn { u, w } => nn_value(u, w, x),
            Hypothesis::Pair { lo, .. } => *lo,
        }
    }

    fn link(&self) -> &MonotoneFn {
        match &self.kind {
            FamilyKind::Glm { link, .. } => link,
            _ => &MonotoneFn::Identity,
        }
    }

    pub(crate) fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(domain!("input has dimension {}, family has {}", x.len(), self.dim));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(domain!("input is not finite"));
        }
        Ok(())
    }

    /// Margins without input validation.
    pub(crate) fn margins_unchecked(&self, h: &Hypothesis, x: &[f64], gamma: f64) -> Result<MarginPair> {
        match h {
            Hypothesis::Linear { w } => {
                let v = math::dot(w, x);
                Ok(MarginPair::closed_form(v - gamma, v + gamma))
            }
            Hypothesis::Glm { w, b } => {
                let s = math::dot(w, x);
                let g = self.link();
                Ok(MarginPair::closed_form(g.eval(s - gamma) + b, g.eval(s + gamma) + b))
            }
            Hypothesis::Nn { u, w } => nn_margins(u, w, x, gamma),
            Hypothesis::Pair { lo, hi } => Ok(MarginPair::closed_form(*lo, *hi)),
        }
    }
}

fn nn_value(u: &[f64], w: &[Vec<f64>], x: &[f64]) -> f64 {
    u.iter().zip(w).map(|(uj, wj)| uj * math::dot(wj, x).max(0.0)).sum()
}

/// Largest width handled by vertex enumeration (2^width activation patterns).
pub const MAX_ENUMERATED_WIDTH: usize = 16;

fn nn_margins(u: &[f64], w: &[Vec<f64>], x: &[f64], gamma: f64) -> Result<MarginPair> {
    let f = |p: &[f64]| nn_value(u, w, p);
    let mut lo = f(x);
    let mut hi = lo;
    let mut offer = |p: &[f64]| {
        let v = f(p);
        lo = lo.min(v);
        hi = hi.max(v);
    };
    match x.len() {
        1 => {
            offer(&[x[0] - gamma]);
            offer(&[x[0] + gamma]);
            if x[0].abs() <= gamma {
                offer(&[0.0]);
            }
        }
        2 => {
            let n = u.len();
            if n > MAX_ENUMERATED_WIDTH {
                return Err(Error::UnsupportedFamily(format!(
                    "exact network margins support width ≤ {MAX_ENUMERATED_WIDTH}, got {n}"
                )));
            }
            // Within one activation pattern f is linear with gradient Σ uⱼwⱼ
            // over the active units; its extremes on the circle are x ± γ ĝ.
            for mask in 0u32..(1u32 << n) {
                let mut g = [0.0f64; 2];
                for j in 0..n {
                    if mask & (1 << j) != 0 {
                        g[0] += u[j] * w[j][0];
                        g[1] += u[j] * w[j][1];
                    }
                }
                let gn = math::norm(&g);
                if gn > 0.0 {
                    let s = gamma / gn;
                    offer(&[x[0] + s * g[0], x[1] + s * g[1]]);
                    offer(&[x[0] - s * g[0], x[1] - s * g[1]]);
                }
            }
            // Breaklines wⱼ·p = 0 meet the circle at the corners of each piece.
            for wj in w {
                let wn2 = wj[0] * wj[0] + wj[1] * wj[1];
                if wn2 == 0.0 {
                    continue;
                }
                let c = (wj[0] * x[0] + wj[1] * x[1]) / wn2;
                let foot = [x[0] - c * wj[0], x[1] - c * wj[1]];
                let dist2 = c * c * wn2;
                if dist2 <= gamma * gamma {
                    let h = math::sqrt((gamma * gamma - dist2) / wn2);
                    offer(&[foot[0] - h * wj[1], foot[1] + h * wj[0]]);
                    offer(&[foot[0] + h * wj[1], foot[1] - h * wj[0]]);
                }
            }
            // All breaklines pass through the origin.
            if math::norm(x) <= gamma {
                offer(&[0.0, 0.0]);
            }
        }
        d => return Err(Error::UnsupportedDimension(d)),
    }
    Ok(MarginPair { lower: lo, upper: hi, method: MarginMethod::VertexEnumeration })
}

/// Validates `γ`, the dimension of `x` and `‖x‖ ≤ 1`.
pub(crate) fn check_point(family: &Family, x: &[f64], gamma: f64) -> Result<()> {
    check_gamma(gamma)?;
    family.check_x(x)?;
    check_in_ball(x)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(domain!("gamma = {gamma} is outside (0, 1)"))
    }
}

fn check_in_ball(x: &[f64]) -> Result<()> {
    let n = math::norm(x);
    if n <= 1.0 + 1e-12 {
        Ok(())
    } else {
        Err(domain!("‖x‖ = {n} exceeds 1"))
    }
}

/// `f(x)`. Free margin pairs evaluate to their lower value.
pub fn eval_hypothesis(family: &Family, h: &Hypothesis, x: &[f64]) -> Result<f64> {
    family.check_x(x)?;
    family.validate(h)?;
    Ok(family.value_unchecked(h, x))
}

/// `(M̲, M̄)` of `h` at `x`.
pub fn adversarial_margins(family: &Family, h: &Hypothesis, x: &[f64], gamma: f64) -> Result<MarginPair> {
    check_gamma(gamma)?;
    family.check_x(x)?;
    check_in_ball(x)?;
    family.validate(h)?;
    family.margins_unchecked(h, x, gamma)
}

/// Minimum per-axis resolution accepted by [`margins_oracle`].
pub const MIN_ORACLE_RESOLUTION: usize = 50;

/// Extremes of `f` over a uniform grid covering the `γ`-ball around `x`,
/// intersected with the ball of radius `1 + γ`.
pub fn margins_oracle(
    family: &Family,
    h: &Hypothesis,
    x: &[f64],
    gamma: f64,
    per_axis: usize,
) -> Result<MarginPair> {
    check_gamma(gamma)?;
    family.check_x(x)?;
    family.validate(h)?;
    if family.dim() > 2 {
        return Err(Error::UnsupportedDimension(family.dim()));
    }
    if per_axis < MIN_ORACLE_RESOLUTION {
        return Err(domain!("oracle resolution {per_axis} is below {MIN_ORACLE_RESOLUTION}"));
    }
    if let Hypothesis::Pair { lo, hi } = h {
        return Ok(MarginPair { lower: *lo, upper: *hi, method: MarginMethod::GridOracle });
    }
    let offsets = linspace(-gamma, gamma, per_axis);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let limit = 1.0 + gamma;
    let mut visit = |p: &[f64]| {
        if math::norm(p) <= limit * (1.0 + 1e-12) {
            let v = family.value_unchecked(h, p);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    };
    if family.dim() == 1 {
        for &o in &offsets {
            visit(&[x[0] + o]);
        }
    } else {
        // Square-grid points outside the disk are pulled radially onto its
        // boundary, so the circle is sampled as densely as the interior.
        for &a in &offsets {
            for &b in &offsets {
                let n = math::sqrt(a * a + b * b);
                let s = if n > gamma { gamma / n } else { 1.0 };
                visit(&[x[0] + s * a, x[1] + s * b]);
            }
        }
    }
    Ok(MarginPair { lower: lo, upper: hi, method: MarginMethod::GridOracle })
}

/// Whether some member has `M̲ > 0` and some member has `M̄ < 0` at `x`.
pub fn is_regular_at(family: &Family, x: &[f64], gamma: f64) -> Result<bool> {
    is_regular_at_with(family, x, gamma, &ParamGridSpec::default())
}

/// [`is_regular_at`] with an explicit grid for the network search.
pub fn is_regular_at_with(family: &Family, x: &[f64], gamma: f64, spec: &ParamGridSpec) -> Result<bool> {
    check_gamma(gamma)?;
    family.check_x(x)?;
    check_in_ball(x)?;
    let (pos, neg) = sign_reach(family, x, gamma, spec)?;
    Ok(pos && neg)
}

/// Whether some member has `M̲ > 0`, and whether some member has `M̄ < 0`.
pub(crate) fn sign_reach(family: &Family, x: &[f64], gamma: f64, spec: &ParamGridSpec) -> Result<(bool, bool)> {
    let r = math::norm(x);
    Ok(match &family.kind {
        FamilyKind::Linear => (r > gamma, r > gamma),
        FamilyKind::Glm { link, bias_bound } => {
            (link.eval(r - gamma) + bias_bound > 0.0, link.eval(gamma - r) - bias_bound < 0.0)
        }
        FamilyKind::AllMeasurable { .. } => (true, true),
        FamilyKind::OneLayerNn { .. } => {
            let mut pos = false;
            let mut neg = false;
            for h in ParamGrid::new(family, spec)?.iter() {
                let m = family.margins_unchecked(&h, x, gamma)?;
                pos |= m.lower > 0.0;
                neg |= m.upper < 0.0;
                if pos && neg {
                    break;
                }
            }
            (pos, neg)
        }
    })
}

/// `(Ā(t), A̲(t))` with `Ā(t) = max_{s∈[−t,t]} g(s) − g(s−γ)` and
/// `A̲(t) = min_{s∈[−t,t]} g(s) − g(s+γ)`.
///
/// Identity and ReLU use closed forms. Tables scan `grid_points` values of
/// `s` together with every knot-induced breakpoint, which is exact for
/// piecewise-linear links.
pub fn a_bounds(g: &MonotoneFn, t: f64, gamma: f64, grid_points: usize) -> Result<(f64, f64)> {
    Ok(a_bounds_with_args(g, t, gamma, grid_points)?.0)
}

/// [`a_bounds`] plus the maximizing and minimizing `s`.
pub(crate) fn a_bounds_with_args(
    g: &MonotoneFn,
    t: f64,
    gamma: f64,
    grid_points: usize,
) -> Result<((f64, f64), (f64, f64))> {
    if !(t >= 0.0) {
        return Err(domain!("a_bounds needs t ≥ 0, got {t}"));
    }
    match g {
        MonotoneFn::Identity => Ok(((gamma, -gamma), (0.0, 0.0))),
        MonotoneFn::Relu => Ok(((t.min(gamma), -gamma), (t.min(gamma), 0.0))),
        MonotoneFn::Table(_) => {
            let mut cands = linspace(-t, t, grid_points.max(2));
            for k in g.kinks() {
                for c in [k, k + gamma, k - gamma] {
                    if c >= -t && c <= t {
                        cands.push(c);
                    }
                }
            }
            let mut up = (f64::NEG_INFINITY, 0.0);
            let mut down = (f64::INFINITY, 0.0);
            for s in cands {
                let a = g.eval(s) - g.eval(s - gamma);
                let b = g.eval(s) - g.eval(s + gamma);
                if a > up.0 {
                    up = (a, s);
                }
                if b < down.0 {
                    down = (b, s);
                }
            }
            Ok(((up.0, down.0), (up.1, down.1)))
        }
    }
}

/// Unit directions: `{±1}` for `d = 1`, `n` equally spaced angles for `d = 2`.
pub fn directions(dim: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    match dim {
        1 => Ok(vec![vec![1.0], vec![-1.0]]),
        2 => {
            if n == 0 {
                return Err(Error::Config(String::from("angle grid is empty")));
            }
            Ok((0..n).map(|k| unit_at_angle(k, n)).collect())
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// `(cos θ, sin θ)` for `θ = 2πk/n`, exact at quarter turns.
pub fn unit_at_angle(k: usize, n: usize) -> Vec<f64> {
    if (4 * k) % n == 0 {
        return match (4 * k / n) % 4 {
            0 => vec![1.0, 0.0],
            1 => vec![0.0, 1.0],
            2 => vec![-1.0, 0.0],
            _ => vec![0.0, -1.0],
        };
    }
    let th = core::f64::consts::TAU * k as f64 / n as f64;
    vec![math::cos(th), math::sin(th)]
}

/// Polar angle of a planar vector in `(−π, π]`.
pub fn angle_of(w: &[f64]) -> f64 {
    math::atan2(w[1], w[0])
}

/// Largest parameter grid [`ParamGrid`] will index.
pub const MAX_GRID_POINTS: usize = 20_000_000;

/// Discretization of a family's parameter space, indexed without
/// materializing its members.
#[derive(Debug, Clone)]
pub struct ParamGrid {
    layout: Layout,
    len: usize,
}

#[derive(Debug, Clone)]
enum Layout {
    Linear(Vec<Vec<f64>>),
    Glm { dirs: Vec<Vec<f64>>, biases: Vec<f64> },
    Nn { us: Vec<Vec<f64>>, units: Vec<Vec<f64>>, width: usize },
    Pairs { values: Vec<f64>, index: Vec<(usize, usize)> },
}

impl ParamGrid {
    /// Angles on the unit circle (`{±1}` in one dimension), a uniform bias
    /// grid on `[−G, G]`, network weights on radius × angle grids with `u`
    /// at the origin, the vertices and the edge midpoints of the `ℓ₁` sphere,
    /// or ordered pairs from a uniform grid on `[−R, R]`.
    pub fn new(family: &Family, spec: &ParamGridSpec) -> Result<Self> {
        let d = family.dim;
        if d > 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        let layout = match &family.kind {
            FamilyKind::Linear => Layout::Linear(directions(d, spec.angles)?),
            FamilyKind::Glm { bias_bound, .. } => {
                let biases =
                    if *bias_bound == 0.0 { vec![0.0] } else { linspace(-bias_bound, *bias_bound, spec.biases) };
                Layout::Glm { dirs: directions(d, spec.angles)?, biases }
            }
            FamilyKind::OneLayerNn { width, lambda, w_bound } => {
                let dirs = if d == 1 { directions(1, 0)? } else { directions(2, spec.nn_angles)? };
                let mut units = Vec::new();
                for k in 1..=spec.nn_radii {
                    let r = w_bound * k as f64 / spec.nn_radii as f64;
                    for dir in &dirs {
                        units.push(dir.iter().map(|v| v * r).collect());
                    }
                }
                Layout::Nn { us: l1_sphere_points(*width, *lambda), units, width: *width }
            }
            FamilyKind::AllMeasurable { range } => {
                let values = linspace(-range, *range, spec.pairs);
                let n = values.len();
                let index = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
                Layout::Pairs { values, index }
            }
        };
        let len = match &layout {
            Layout::Linear(dirs) => Some(dirs.len()),
            Layout::Glm { dirs, biases } => dirs.len().checked_mul(biases.len()),
            Layout::Nn { us, units, width } => {
                units.len().checked_pow(*width as u32).and_then(|c| c.checked_mul(us.len()))
            }
            Layout::Pairs { index, .. } => Some(index.len()),
        };
        let len = match len {
            Some(0) => {
                return Err(Error::Config(format!("parameter grid for {} is empty", family.describe())))
            }
            Some(n) if n <= MAX_GRID_POINTS => n,
            _ => {
                return Err(Error::Config(format!(
                    "parameter grid for {} exceeds {MAX_GRID_POINTS} points",
                    family.describe()
                )))
            }
        };
        Ok(Self { layout, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Member `i`, `i < len()`.
    pub fn get(&self, i: usize) -> Hypothesis {
        match &self.layout {
            Layout::Linear(dirs) => Hypothesis::Linear { w: dirs[i].clone() },
            Layout::Glm { dirs, biases } => {
                let nb = biases.len();
                Hypothesis::Glm { w: dirs[i / nb].clone(), b: biases[i % nb] }
            }
            Layout::Nn { us, units, width } => {
                let mut combo = i / us.len();
                let mut w = Vec::with_capacity(*width);
                for _ in 0..*width {
                    w.push(units[combo % units.len()].clone());
                    combo /= units.len();
                }
                Hypothesis::Nn { u: us[i % us.len()].clone(), w }
            }
            Layout::Pairs { values, index } => {
                let (a, b) = index[i];
                Hypothesis::Pair { lo: values[a], hi: values[b] }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Hypothesis> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

fn l1_sphere_points(width: usize, lambda: f64) -> Vec<Vec<f64>> {
    let mut us: Vec<Vec<f64>> = vec![vec![0.0; width]];
    for i in 0..width {
        for s in [1.0, -1.0] {
            let mut u = vec![0.0; width];
            u[i] = s * lambda;
            us.push(u);
        }
    }
    for i in 0..width {
        for j in i + 1..width {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut u = vec![0.0; width];
                u[i] = si * lambda / 2.0;
                u[j] = sj * lambda / 2.0;
                us.push(u);
            }
        }
    }
    us
}

/// Every member of the [`ParamGrid`] for `family`.
pub fn param_grid(family: &Family, spec: &ParamGridSpec) -> Result<Vec<Hypothesis>> {
    let grid = ParamGrid::new(family, spec)?;
    Ok(grid.iter().collect())
}
