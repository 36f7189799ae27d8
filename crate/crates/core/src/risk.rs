//! Conditional (inner) risks `C_ℓ(f, x, η) = η ℓ(f, x, +1) + (1 − η) ℓ(f, x, −1)`
//! and their infima over a hypothesis family.

use alloc::format;
use alloc::string::String;

use crate::grid::ParamGridSpec;
use crate::hypothesis::{param_grid, sign_reach, Family, FamilyKind, Hypothesis, MarginPair};
use crate::loss::{cbar_interval_inf, check_eta, MarginLoss};
use crate::{math, Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Which loss an inner risk is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LossForm {
    /// `φ(y f(x))`.
    Plain,
    /// `φ(inf_{‖x′−x‖≤γ} y f(x′))`.
    Sup,
    /// Adversarial 0/1 loss `1{inf_{‖x′−x‖≤γ} y f(x′) ≤ 0}`.
    Adv01,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SurrogateForm {
    Plain,
    Sup,
}

/// A surrogate: a margin loss used plainly or through its supremum lift.
#[derive(Debug, Clone, PartialEq)]
pub struct Surrogate {
    form: SurrogateForm,
    loss: MarginLoss,
}

impl Surrogate {
    pub fn plain(loss: MarginLoss) -> Self {
        Self { form: SurrogateForm::Plain, loss }
    }

    /// The supremum lift needs a non-increasing loss.
    pub fn sup(loss: MarginLoss) -> Result<Self> {
        loss.require_non_increasing()?;
        Ok(Self { form: SurrogateForm::Sup, loss })
    }

    pub fn new(form: SurrogateForm, loss: MarginLoss) -> Result<Self> {
        match form {
            SurrogateForm::Plain => Ok(Self::plain(loss)),
            SurrogateForm::Sup => Self::sup(loss),
        }
    }

    pub fn form(&self) -> SurrogateForm {
        self.form
    }

    pub fn loss(&self) -> &MarginLoss {
        &self.loss
    }

    pub fn loss_form(&self) -> LossForm {
        match self.form {
            SurrogateForm::Plain => LossForm::Plain,
            SurrogateForm::Sup => LossForm::Sup,
        }
    }

    pub fn describe(&self) -> String {
        match self.form {
            SurrogateForm::Plain => self.loss.describe(),
            SurrogateForm::Sup => format!("sup {}", self.loss.describe()),
        }
    }
}

#[inline]
pub(crate) fn sup_risk(loss: &MarginLoss, m: MarginPair, eta: f64) -> f64 {
    eta * loss.eval(m.lower) + (1.0 - eta) * loss.eval(-m.upper)
}

/// `f(x)` together with its margins at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Eval {
    pub value: f64,
    pub margins: MarginPair,
}

pub(crate) fn evaluate(family: &Family, h: &Hypothesis, x: &[f64], gamma: f64) -> Result<Eval> {
    Ok(Eval { value: family.value_unchecked(h, x), margins: family.margins_unchecked(h, x, gamma)? })
}

/// `1` if `M̲ ≤ 0 ≤ M̄`, `η` if `M̄ < 0`, `1 − η` if `M̲ > 0`.
///
/// Comparisons against zero are exact.
#[inline]
pub fn adv01_inner_risk(m: MarginPair, eta: f64) -> f64 {
    if m.upper < 0.0 {
        eta
    } else if m.lower > 0.0 {
        1.0 - eta
    } else {
        1.0
    }
}

/// `C_ℓ(h, x, η)` for the chosen loss form.
pub fn inner_risk(
    form: LossForm,
    loss: &MarginLoss,
    family: &Family,
    h: &Hypothesis,
    x: &[f64],
    eta: f64,
    gamma: f64,
) -> Result<f64> {
    check_eta(eta)?;
    let m = crate::hypothesis::adversarial_margins(family, h, x, gamma)?;
    Ok(match form {
        LossForm::Plain => loss.cbar_unchecked(family.value_unchecked(h, x), eta),
        LossForm::Sup => {
            loss.require_non_increasing()?;
            sup_risk(loss, m, eta)
        }
        LossForm::Adv01 => adv01_inner_risk(m, eta),
    })
}

/// Input regions of a symmetric family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Region {
    /// Every member has `M̲ ≤ 0 ≤ M̄`.
    X1,
    /// Some member has `M̲ > 0`.
    X2,
}

pub fn region_classify(family: &Family, x: &[f64], gamma: f64) -> Result<Region> {
    region_classify_with(family, x, gamma, &ParamGridSpec::default())
}

/// Region tag; network families decide it by searching the given grid.
pub fn region_classify_with(family: &Family, x: &[f64], gamma: f64, spec: &ParamGridSpec) -> Result<Region> {
    if !family.is_symmetric() {
        return Err(Error::UnsupportedFamily(format!(
            "{} is not symmetric; region tags are undefined",
            family.describe()
        )));
    }
    crate::hypothesis::is_regular_at_with(family, x, gamma, spec)?;
    let (pos, _) = sign_reach(family, x, gamma, spec)?;
    Ok(if pos { Region::X2 } else { Region::X1 })
}

/// `inf_{f ∈ H} C_{ℓγ}(f, x, η)` from which sign patterns are reachable.
pub(crate) fn adv01_minimum(family: &Family, x: &[f64], eta: f64, gamma: f64, spec: &ParamGridSpec) -> Result<f64> {
    let (pos, neg) = sign_reach(family, x, gamma, spec)?;
    let mut best = 1.0f64;
    if neg {
        best = best.min(eta);
    }
    if pos {
        best = best.min(1.0 - eta);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MinimumMethod {
    /// Closed form over reachable sign patterns (adversarial 0/1 loss).
    Analytic,
    /// Endpoint rule over the reachable interval of `f(x)`.
    EndpointRule,
    /// Minimum over the parameter grid.
    Grid,
}

/// Minimal inner risk `C*_{ℓ,H}(x, η)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MinimalRisk {
    pub value: f64,
    pub method: MinimumMethod,
    /// Grid minimum, when a grid was scanned.
    pub grid_value: Option<f64>,
}

/// Reachable interval of `f(x)` over the family, when it is an interval.
pub(crate) fn value_interval(family: &Family, r: f64) -> Option<(f64, f64)> {
    if family.dim() < 2 {
        return None;
    }
    match family.kind() {
        FamilyKind::Linear => Some((-r, r)),
        FamilyKind::Glm { link, bias_bound } => Some((link.eval(-r) - bias_bound, link.eval(r) + bias_bound)),
        _ => None,
    }
}

/// `C*_{ℓ,H}(x, η)`.
///
/// The adversarial 0/1 loss is handled analytically. Surrogates take the
/// parameter-grid minimum, replaced by the exact endpoint-rule value for
/// quasi-concave even plain losses on linear and generalized linear models.
pub fn minimal_inner_risk(
    form: LossForm,
    loss: &MarginLoss,
    family: &Family,
    x: &[f64],
    eta: f64,
    gamma: f64,
    spec: &ParamGridSpec,
) -> Result<MinimalRisk> {
    check_eta(eta)?;
    if form == LossForm::Adv01 {
        // Validates x and gamma as a side effect.
        crate::hypothesis::is_regular_at_with(family, x, gamma, spec)?;
        return Ok(MinimalRisk {
            value: adv01_minimum(family, x, eta, gamma, spec)?,
            method: MinimumMethod::Analytic,
            grid_value: None,
        });
    }
    if form == LossForm::Sup {
        loss.require_non_increasing()?;
    }
    let mut grid_min = f64::INFINITY;
    for h in param_grid(family, spec)? {
        grid_min = grid_min.min(inner_risk(form, loss, family, &h, x, eta, gamma)?);
    }
    if form == LossForm::Plain && loss.endpoint_rule_applies() {
        if let Some((l, u)) = value_interval(family, math::norm(x)) {
            let v = cbar_interval_inf(loss, l, u, eta)?.value;
            return Ok(MinimalRisk { value: v, method: MinimumMethod::EndpointRule, grid_value: Some(grid_min) });
        }
    }
    Ok(MinimalRisk { value: grid_min, method: MinimumMethod::Grid, grid_value: Some(grid_min) })
}
