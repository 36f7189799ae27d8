//! JSON descriptors for losses, links, families and surrogates.

use advcal_core::hypothesis::{Family, MonotoneFn};
use advcal_core::loss::{MarginLoss, Props};
use advcal_core::risk::{Surrogate, SurrogateForm};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `{"kind": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossSpec {
    ZeroOne,
    RhoMargin {
        rho: f64,
    },
    Hinge,
    Logistic,
    Exponential,
    CustomTable {
        knots: Vec<(f64, f64)>,
        #[serde(default)]
        declared: Props,
    },
}

impl LossSpec {
    pub fn build(&self) -> Result<MarginLoss, CliError> {
        Ok(match self {
            LossSpec::ZeroOne => MarginLoss::zero_one(),
            LossSpec::RhoMargin { rho } => MarginLoss::rho_margin(*rho)?,
            LossSpec::Hinge => MarginLoss::hinge(),
            LossSpec::Logistic => MarginLoss::logistic(),
            LossSpec::Exponential => MarginLoss::exponential(),
            LossSpec::CustomTable { knots, declared } => MarginLoss::custom_table(knots.clone(), *declared)?,
        })
    }

    /// Bare kind names for parameterless losses, e.g. `hinge`.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "zero_one" => LossSpec::ZeroOne,
            "hinge" => LossSpec::Hinge,
            "logistic" => LossSpec::Logistic,
            "exponential" => LossSpec::Exponential,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LinkSpec {
    Identity,
    Relu,
    /// Knots `[s, g(s)]` of a piecewise-linear link.
    Table(Vec<(f64, f64)>),
}

impl LinkSpec {
    pub fn build(&self) -> Result<MonotoneFn, CliError> {
        Ok(match self {
            LinkSpec::Identity => MonotoneFn::Identity,
            LinkSpec::Relu => MonotoneFn::Relu,
            LinkSpec::Table(k) => MonotoneFn::table(k.clone())?,
        })
    }
}

fn two() -> usize {
    2
}

/// `{"kind": ..., "dim": ..., ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Linear {
        #[serde(default = "two")]
        dim: usize,
    },
    Glm {
        #[serde(default = "two")]
        dim: usize,
        link: LinkSpec,
        bias_bound: f64,
    },
    ReluGlm {
        #[serde(default = "two")]
        dim: usize,
        bias_bound: f64,
    },
    OneLayerNn {
        #[serde(default = "two")]
        dim: usize,
        width: usize,
        lambda: f64,
        w_bound: f64,
    },
    AllMeasurable {
        #[serde(default = "two")]
        dim: usize,
        range: f64,
    },
}

impl FamilySpec {
    pub fn build(&self) -> Result<Family, CliError> {
        Ok(match self {
            FamilySpec::Linear { dim } => Family::linear(*dim)?,
            FamilySpec::Glm { dim, link, bias_bound } => Family::glm(*dim, link.build()?, *bias_bound)?,
            FamilySpec::ReluGlm { dim, bias_bound } => Family::relu_glm(*dim, *bias_bound)?,
            FamilySpec::OneLayerNn { dim, width, lambda, w_bound } => {
                Family::one_layer_nn(*dim, *width, *lambda, *w_bound)?
            }
            FamilySpec::AllMeasurable { dim, range } => Family::all_measurable(*dim, *range)?,
        })
    }
}

/// A loss together with the way it is applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurrogateSpec {
    pub loss: LossSpec,
    #[serde(default = "plain")]
    pub form: SurrogateForm,
}

fn plain() -> SurrogateForm {
    SurrogateForm::Plain
}

impl SurrogateSpec {
    pub fn build(&self) -> Result<Surrogate, CliError> {
        Ok(Surrogate::new(self.form, self.loss.build()?)?)
    }
}
