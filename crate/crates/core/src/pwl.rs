//! Piecewise-linear tables with constant extrapolation.

use alloc::vec::Vec;

use crate::error::domain;
use crate::Result;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Linear interpolation through `(t, v)` knots, constant outside the knot range.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>"))]
pub struct Pwl {
    knots: Vec<(f64, f64)>,
}

impl Pwl {
    /// Knots must be finite with strictly increasing abscissae.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(domain!("piecewise-linear table needs at least one knot"));
        }
        if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(domain!("piecewise-linear table has a non-finite entry"));
        }
        if let Some(w) = knots.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(domain!(
                "piecewise-linear abscissae must increase strictly ({} then {})",
                w[0].0,
                w[1].0
            ));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn abscissae(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots.iter().map(|k| k.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        let first = k[0];
        let last = k[k.len() - 1];
        if t <= first.0 {
            return first.1;
        }
        if t >= last.0 {
            return last.1;
        }
        // First knot strictly right of t; exists because t < last.0.
        let i = k.partition_point(|p| p.0 <= t);
        let (t0, v0) = k[i - 1];
        let (t1, v1) = k[i];
        if t == t0 {
            return v0;
        }
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.knots.windows(2).all(|w| w[1].1 >= w[0].1)
    }
}

impl TryFrom<Vec<(f64, f64)>> for Pwl {
    type Error = crate::Error;

    fn try_from(knots: Vec<(f64, f64)>) -> Result<Self> {
        Pwl::new(knots)
    }
}

impl From<Pwl> for Vec<(f64, f64)> {
    fn from(p: Pwl) -> Self {
        p.knots
    }
}
