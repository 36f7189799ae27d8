//! Calibration analysis for margin-based surrogate losses under `ℓ₂`
//! adversarial perturbations.
//!
//! The crate answers one question numerically: given a surrogate loss `φ`,
//! a hypothesis class `H` and a perturbation radius `γ`, does driving the
//! surrogate excess risk to zero force the adversarial 0/1 excess risk to
//! zero? The answer is organized around the calibration function
//! `δ_max(ε, x, η)`, computed either by brute force over a parameter grid or
//! through closed-form interval reductions.
//!
//! - [`loss`]: margin losses, two-point risk `C̄`, property verifiers.
//! - [`hypothesis`]: hypothesis families, adversarial margins, regularity.
//! - [`risk`]: inner risks and their minima.
//! - [`calibration`]: `δ_max`, uniform diagnostic, grid verdicts.
//! - [`theorems`]: executable calibration conditions and negative witnesses.
//! - [`consistency`]: realizable synthetic experiments.
//!
//! The crate is `no_std` with `alloc`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;
mod search;

pub mod calibration;
pub mod consistency;
pub mod grid;
pub mod hypothesis;
pub mod loss;
pub mod pwl;
pub mod risk;
pub mod theorems;

pub use error::{Error, Result};
