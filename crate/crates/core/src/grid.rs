//! Grid specifications shared by the engines.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// `n` evenly spaced points from `lo` to `hi`, both included.
///
/// Points are computed as `lo + (hi - lo) * i / (n - 1)` so that symmetric
/// grids hit zero exactly.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * (i as f64) / last
                    }
                })
                .collect()
        }
    }
}

/// Uniform grid on a real interval.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct TGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl TGrid {
    /// 2001 points on `[-3, 3]`.
    pub const STANDARD: TGrid = TGrid { lo: -3.0, hi: 3.0, n: 2001 };

    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }
}

impl Default for TGrid {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// Resolution of the parameter grids used to discretize `inf_{f ∈ H}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ParamGridSpec {
    /// Directions on the unit circle (d = 2).
    pub angles: usize,
    /// Bias values on `[-G, G]`.
    pub biases: usize,
    /// Values per axis on `[-R, R]` for free margin pairs.
    pub pairs: usize,
    /// Directions per hidden unit of a ReLU network.
    pub nn_angles: usize,
    /// Radii per hidden unit, `W·k/nn_radii` for `k = 1..=nn_radii`.
    pub nn_radii: usize,
}

impl Default for ParamGridSpec {
    fn default() -> Self {
        Self { angles: 7200, biases: 41, pairs: 41, nn_angles: 24, nn_radii: 2 }
    }
}

/// The `(ε, ‖x‖, η)` grid of a calibration verdict.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct VerdictGrid {
    pub epsilons: Vec<f64>,
    pub x_norms: Vec<f64>,
    pub etas: Vec<f64>,
}

impl VerdictGrid {
    /// `ε ∈ {0.1, 0.25, 0.5, 0.75, 1}`, eleven norms in `(γ, 1]`, 21 values of `η`.
    pub fn default_for(gamma: f64) -> Self {
        let step = (1.0 - gamma) / 11.0;
        Self {
            epsilons: alloc::vec![0.1, 0.25, 0.5, 0.75, 1.0],
            x_norms: (1..=11)
                .map(|k| if k == 11 { 1.0 } else { gamma + step * k as f64 })
                .collect(),
            etas: (0..=20).map(|k| k as f64 / 20.0).collect(),
        }
    }
}

/// Point on the first axis with the given norm, `(r, 0, …, 0)`.
pub fn axis_point(dim: usize, r: f64) -> Vec<f64> {
    let mut x = alloc::vec![0.0; dim];
    if dim > 0 {
        x[0] = r;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_zero_and_ends() {
        let g = linspace(-2.0, 2.0, 41);
        assert_eq!(g[20], 0.0);
        assert_eq!(g[0], -2.0);
        assert_eq!(g[40], 2.0);
        assert_eq!(TGrid::STANDARD.points()[1000], 0.0);
    }

    #[test]
    fn default_verdict_grid_shape() {
        let g = VerdictGrid::default_for(0.2);
        assert_eq!(g.x_norms.len(), 11);
        assert!(g.x_norms.iter().all(|&r| r > 0.2 && r <= 1.0));
        assert_eq!(g.etas.len(), 21);
        assert_eq!(g.etas[10], 0.5);
    }
}
