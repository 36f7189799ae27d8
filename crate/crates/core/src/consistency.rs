//! Synthetic realizable distributions, empirical surrogate minimization and
//! traces relating surrogate gaps to adversarial 0/1 risk.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{ParamGridSpec, TGrid};
use crate::hypothesis::{Family, FamilyKind, Hypothesis, ParamGrid};
use crate::loss::{verify_loss_properties, LossKind, MarginLoss};
use crate::risk::{evaluate, LossForm, Surrogate, SurrogateForm};
use crate::theorems::{check_qce_linear, Prediction, CONDITION_POINTS};
use crate::{math, Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Labels follow the sign of `f*(x) = w*·x`; every point has `y w*·x ≥ r_min`.
///
/// Points are `x = a y w* + c w⊥` with `a` uniform on `[r_min, 1]` and `c`
/// uniform on `[−√(1−a²), √(1−a²)]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SyntheticDistribution {
    pub dim: usize,
    /// Angle of `w*` in degrees (ignored when `dim = 1`).
    #[cfg_attr(feature = "serde", serde(default))]
    pub rule_angle: f64,
    pub r_min: f64,
    pub gamma: f64,
    /// `P(y = +1)`.
    #[cfg_attr(feature = "serde", serde(default = "half"))]
    pub class_weight: f64,
    pub seed: u64,
}

#[cfg(feature = "serde")]
fn half() -> f64 {
    0.5
}

impl SyntheticDistribution {
    pub fn new(dim: usize, r_min: f64, gamma: f64, seed: u64) -> Self {
        Self { dim, rule_angle: 0.0, r_min, gamma, class_weight: 0.5, seed }
    }

    /// `w*`.
    pub fn rule(&self) -> Vec<f64> {
        if self.dim == 1 {
            return vec![1.0];
        }
        let a = self.rule_angle.to_radians();
        vec![math::cos(a), math::sin(a)]
    }

    pub fn id(&self) -> String {
        format!("halfspace(d={},angle={},r_min={},gamma={})", self.dim, self.rule_angle, self.r_min, self.gamma)
    }

    fn validate(&self) -> Result<()> {
        if !(self.dim == 1 || self.dim == 2) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Config(format!("gamma = {} is outside (0, 1)", self.gamma)));
        }
        if !(self.r_min > self.gamma && self.r_min <= 1.0) {
            return Err(Error::Config(format!(
                "r_min = {} must lie in (gamma, 1] for the sample to be realizable",
                self.r_min
            )));
        }
        if !(0.0..=1.0).contains(&self.class_weight) {
            return Err(Error::Config(format!("class weight {} is outside [0, 1]", self.class_weight)));
        }
        if !self.rule_angle.is_finite() {
            return Err(Error::Config(String::from("rule angle must be finite")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Sample {
    pub points: Vec<(Vec<f64>, f64)>,
    pub seed: u64,
    pub distribution: String,
}

impl Sample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n` draws; identical seeds give identical samples.
pub fn sample_distribution(dist: &SyntheticDistribution, n: usize) -> Result<Sample> {
    dist.validate()?;
    if n == 0 {
        return Err(Error::Config(String::from("sample size must be at least 1")));
    }
    let w = dist.rule();
    let mut rng = ChaCha8Rng::seed_from_u64(dist.seed);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let y = if rng.gen::<f64>() < dist.class_weight { 1.0 } else { -1.0 };
        let a = dist.r_min + (1.0 - dist.r_min) * rng.gen::<f64>();
        let x = if dist.dim == 1 {
            vec![a * y]
        } else {
            let c = (2.0 * rng.gen::<f64>() - 1.0) * math::sqrt((1.0 - a * a).max(0.0));
            vec![a * y * w[0] - c * w[1], a * y * w[1] + c * w[0]]
        };
        let margin = y * math::dot(&w, &x);
        if !(margin - dist.gamma > 0.0 && math::norm(&x) <= 1.0 + 1e-12) {
            return Err(Error::Config(format!("drawn point {x:?} breaks realizability")));
        }
        points.push((x, y));
    }
    Ok(Sample { points, seed: dist.seed, distribution: dist.id() })
}

/// Mean per-point loss of `h`.
pub fn empirical_risk(
    form: LossForm,
    loss: &MarginLoss,
    family: &Family,
    h: &Hypothesis,
    sample: &Sample,
    gamma: f64,
) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::Domain(String::from("empirical risk of an empty sample")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma = {gamma} is outside (0, 1)")));
    }
    family.validate(h)?;
    let mut total = 0.0;
    for (x, y) in &sample.points {
        family.check_x(x)?;
        total += point_loss(form, loss, family, h, x, *y, gamma)?;
    }
    Ok(total / sample.len() as f64)
}

fn point_loss(
    form: LossForm,
    loss: &MarginLoss,
    family: &Family,
    h: &Hypothesis,
    x: &[f64],
    y: f64,
    gamma: f64,
) -> Result<f64> {
    let ev = evaluate(family, h, x, gamma)?;
    let m = if y > 0.0 { ev.margins } else { ev.margins.negate() };
    Ok(match form {
        LossForm::Plain => loss.eval(y * ev.value),
        LossForm::Sup => loss.eval(m.lower),
        LossForm::Adv01 => {
            if m.lower <= 0.0 {
                1.0
            } else {
                0.0
            }
        }
    })
}

fn surrogate_risk(s: &Surrogate, family: &Family, h: &Hypothesis, sample: &Sample, gamma: f64) -> Result<f64> {
    empirical_risk(s.loss_form(), s.loss(), family, h, sample, gamma)
}

fn adv_risk(family: &Family, h: &Hypothesis, sample: &Sample, gamma: f64) -> Result<f64> {
    empirical_risk(LossForm::Adv01, &MarginLoss::zero_one(), family, h, sample, gamma)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum Optimizer {
    /// Exhaustive minimum over the parameter grid.
    Grid,
    /// A 1° scan of the angle from `initial_angle`, then `rounds` rounds of
    /// halving steps around the incumbent. Biases of generalized linear
    /// models are refined the same way from steps of `G/20`.
    CoordinateRefine {
        #[cfg_attr(feature = "serde", serde(default = "default_initial_angle"))]
        initial_angle: f64,
        #[cfg_attr(feature = "serde", serde(default = "default_rounds"))]
        rounds: usize,
    },
}

#[cfg(feature = "serde")]
fn default_initial_angle() -> f64 {
    180.0
}

#[cfg(feature = "serde")]
fn default_rounds() -> usize {
    12
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::CoordinateRefine { initial_angle: 180.0, rounds: 12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TraceEntry {
    pub iteration: usize,
    pub surrogate_risk: f64,
    /// `surrogate_risk − R*`.
    pub gap: f64,
    pub adv_risk: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TrainTrace {
    pub entries: Vec<TraceEntry>,
    /// `R*`: the smallest empirical surrogate risk seen on the parameter
    /// grid or along the optimizer path.
    pub reference_risk: f64,
    pub grid_minimum: f64,
    pub final_hypothesis: Hypothesis,
}

/// Accepted iterates before gaps are known.
struct Path {
    steps: Vec<(usize, f64, Hypothesis)>,
    evaluations: usize,
    best: f64,
}

impl Path {
    fn new() -> Self {
        Self { steps: Vec::new(), evaluations: 0, best: f64::INFINITY }
    }

    fn offer(&mut self, risk: f64, h: Hypothesis) -> bool {
        self.evaluations += 1;
        if self.steps.is_empty() || risk < self.current() {
            self.steps.push((self.evaluations, risk, h));
            self.best = self.best.min(risk);
            true
        } else {
            false
        }
    }

    fn current(&self) -> f64 {
        self.steps.last().map_or(f64::INFINITY, |s| s.1)
    }

    fn incumbent(&self) -> &Hypothesis {
        &self.steps.last().expect("path has a start").2
    }
}

fn angle_point(family: &Family, deg: f64, bias: Option<f64>) -> Result<Hypothesis> {
    let a = deg.to_radians();
    let w = vec![math::cos(a), math::sin(a)];
    match bias {
        None => family.linear_point(w),
        Some(b) => family.glm_point(w, b),
    }
}

/// Minimizes the empirical surrogate risk and traces every accepted iterate.
pub fn minimize_surrogate(
    surrogate: &Surrogate,
    family: &Family,
    sample: &Sample,
    gamma: f64,
    optimizer: &Optimizer,
    params: &ParamGridSpec,
) -> Result<(Hypothesis, TrainTrace)> {
    if sample.is_empty() {
        return Err(Error::Domain(String::from("cannot minimize over an empty sample")));
    }
    let risk = |h: &Hypothesis| surrogate_risk(surrogate, family, h, sample, gamma);
    let grid = ParamGrid::new(family, params)?;
    let mut grid_best: Option<(f64, usize)> = None;
    for i in 0..grid.len() {
        let v = risk(&grid.get(i))?;
        if grid_best.map_or(true, |(b, _)| v < b) {
            grid_best = Some((v, i));
        }
    }
    let (grid_minimum, grid_arg) = grid_best.expect("grid is non-empty");
    let mut path = Path::new();
    match optimizer {
        Optimizer::Grid => {
            path.offer(grid_minimum, grid.get(grid_arg));
        }
        Optimizer::CoordinateRefine { initial_angle, rounds } => {
            let bias_bound = match family.kind() {
                FamilyKind::Linear if family.dim() == 2 => None,
                FamilyKind::Glm { bias_bound, .. } if family.dim() == 2 => Some(*bias_bound),
                _ => {
                    return Err(Error::UnsupportedFamily(format!(
                        "coordinate refinement needs a planar linear or generalized linear model, got {}",
                        family.describe()
                    )))
                }
            };
            let mut angle = *initial_angle;
            let mut bias = bias_bound.map(|_| 0.0);
            let h = angle_point(family, angle, bias)?;
            path.offer(risk(&h)?, h);
            let start = angle;
            for k in 1..360 {
                let a = start + k as f64;
                let h = angle_point(family, a, bias)?;
                if path.offer(risk(&h)?, h) {
                    angle = a;
                }
            }
            let mut a_step = 1.0;
            let mut b_step = bias_bound.map(|g| g / 20.0);
            for _ in 0..*rounds {
                a_step /= 2.0;
                b_step = b_step.map(|s| s / 2.0);
                loop {
                    let mut moved = false;
                    for cand in [angle + a_step, angle - a_step] {
                        let h = angle_point(family, cand, bias)?;
                        if path.offer(risk(&h)?, h) {
                            angle = cand;
                            moved = true;
                        }
                    }
                    if let (Some(b), Some(s), Some(g)) = (bias, b_step, bias_bound) {
                        for cand in [b + s, b - s] {
                            if cand.abs() <= g {
                                let h = angle_point(family, angle, Some(cand))?;
                                if path.offer(risk(&h)?, h) {
                                    bias = Some(cand);
                                    moved = true;
                                }
                            }
                        }
                    }
                    if !moved {
                        break;
                    }
                }
            }
        }
    }
    let reference = grid_minimum.min(path.best);
    let mut entries = Vec::with_capacity(path.steps.len());
    for (iteration, r, h) in &path.steps {
        entries.push(TraceEntry {
            iteration: *iteration,
            surrogate_risk: *r,
            gap: r - reference,
            adv_risk: adv_risk(family, h, sample, gamma)?,
        });
    }
    let final_h = path.incumbent().clone();
    Ok((final_h.clone(), TrainTrace { entries, reference_risk: reference, grid_minimum, final_hypothesis: final_h }))
}

/// Largest adversarial risk among trace entries with gap at most `gap`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PairingRow {
    pub gap: f64,
    pub max_adv_risk: f64,
}

/// One row per distinct gap, in increasing order of gap.
pub fn pairing_table(trace: &TrainTrace) -> Vec<PairingRow> {
    let mut gaps: Vec<f64> = trace.entries.iter().map(|e| e.gap).collect();
    gaps.sort_by(f64::total_cmp);
    gaps.dedup();
    gaps.into_iter()
        .map(|g| PairingRow {
            gap: g,
            max_adv_risk: trace.entries.iter().filter(|e| e.gap <= g).map(|e| e.adv_risk).fold(0.0, f64::max),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub surrogate: Surrogate,
    pub family: Family,
    pub distribution: SyntheticDistribution,
    pub n_train: usize,
    pub n_test: usize,
    pub optimizer: Optimizer,
    pub params: ParamGridSpec,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ExperimentReport {
    pub surrogate: String,
    pub family: String,
    pub distribution: String,
    pub train_seed: u64,
    /// The held-out sample uses `train_seed + 1`.
    pub test_seed: u64,
    pub predicted: Prediction,
    pub trace: TrainTrace,
    pub pairing: Vec<PairingRow>,
    pub final_train_adv_risk: f64,
    pub heldout_adv_risk: f64,
    /// Whether zero adversarial risk was asserted (calibrated surrogates only).
    pub asserted: bool,
    pub assertion_passed: Option<bool>,
}

/// What the checkers say about the surrogate on the family.
///
/// Sup ramp losses on symmetric families are calibrated; plain losses on
/// planar linear models use the gap condition; everything else is left
/// inapplicable.
pub fn predicted_calibration(surrogate: &Surrogate, family: &Family, gamma: f64) -> Result<Prediction> {
    let loss = surrogate.loss();
    Ok(match (surrogate.form(), loss.kind()) {
        (SurrogateForm::Sup, LossKind::RhoMargin { .. }) if family.is_symmetric() => Prediction::Calibrated,
        (SurrogateForm::Plain, _) if matches!(family.kind(), FamilyKind::Linear) && family.dim() == 2 => {
            if verify_loss_properties(loss, &TGrid::STANDARD).quasi_concave_even() {
                check_qce_linear(loss, gamma, CONDITION_POINTS)?.predicted
            } else {
                Prediction::Inapplicable
            }
        }
        _ => Prediction::Inapplicable,
    })
}

/// Trains on one sample, evaluates on a held-out one and, for calibrated
/// surrogates, asserts zero adversarial risk on both.
pub fn consistency_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let dist = &cfg.distribution;
    if cfg.family.dim() != dist.dim {
        return Err(Error::Config(format!(
            "family dimension {} differs from distribution dimension {}",
            cfg.family.dim(),
            dist.dim
        )));
    }
    let gamma = dist.gamma;
    let train = sample_distribution(dist, cfg.n_train)?;
    let test_dist = SyntheticDistribution { seed: dist.seed.wrapping_add(1), ..dist.clone() };
    let test = sample_distribution(&test_dist, cfg.n_test)?;
    if let Ok(star) = cfg.family.linear_point(dist.rule()) {
        if adv_risk(&cfg.family, &star, &train, gamma)? != 0.0 {
            return Err(Error::Config(String::from("the rule does not separate the training sample")));
        }
    }
    let (final_h, trace) = minimize_surrogate(&cfg.surrogate, &cfg.family, &train, gamma, &cfg.optimizer, &cfg.params)?;
    let predicted = predicted_calibration(&cfg.surrogate, &cfg.family, gamma)?;
    let final_train_adv_risk = adv_risk(&cfg.family, &final_h, &train, gamma)?;
    let heldout_adv_risk = adv_risk(&cfg.family, &final_h, &test, gamma)?;
    let asserted = predicted == Prediction::Calibrated;
    let assertion_passed = asserted.then(|| {
        let last_gap = trace.entries.last().map_or(0.0, |e| e.gap);
        let echo = trace.entries.iter().filter(|e| e.gap <= last_gap).all(|e| e.adv_risk == 0.0);
        echo && final_train_adv_risk == 0.0 && heldout_adv_risk == 0.0
    });
    Ok(ExperimentReport {
        surrogate: cfg.surrogate.describe(),
        family: cfg.family.describe(),
        distribution: dist.id(),
        train_seed: dist.seed,
        test_seed: test_dist.seed,
        predicted,
        pairing: pairing_table(&trace),
        trace,
        final_train_adv_risk,
        heldout_adv_risk,
        asserted,
        assertion_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use MarginLoss;

    #[test]
    fn sampling_is_realizable_and_deterministic() {
        let d = SyntheticDistribution::new(2, 0.4, 0.2, 7);
        let s = sample_distribution(&d, 1000).unwrap();
        assert!(s.points.iter().all(|(x, y)| y * x[0] >= 0.4));
        assert_eq!(s, sample_distribution(&d, 1000).unwrap());
        assert!(sample_distribution(&d, 0).is_err());
        assert!(sample_distribution(&SyntheticDistribution::new(2, 0.2, 0.2, 7), 5).is_err());
    }

    #[test]
    fn flipped_rule_has_full_adversarial_risk() {
        let fam = Family::linear(2).unwrap();
        let s = sample_distribution(&SyntheticDistribution::new(2, 0.4, 0.2, 3), 200).unwrap();
        let zo = MarginLoss::zero_one();
        let f = fam.linear_point(vec![1.0, 0.0]).unwrap();
        let g = fam.linear_point(vec![-1.0, 0.0]).unwrap();
        assert_eq!(empirical_risk(LossForm::Adv01, &zo, &fam, &f, &s, 0.2).unwrap(), 0.0);
        assert_eq!(empirical_risk(LossForm::Adv01, &zo, &fam, &g, &s, 0.2).unwrap(), 1.0);
    }
}
