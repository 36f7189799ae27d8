//! One runner per subcommand. Each takes its JSON config and returns the
//! rendered artifacts plus an optional failed expectation.

use std::str::FromStr;

use advcal_core::calibration::{
    assemble_verdict, delta_max_bruteforce, delta_max_reduced, verdict_row, CalibrationQuery, CalibrationValue,
    GridEntry, MethodChoice, Verdict, VerdictOptions, VerdictReport, DEFAULT_TOL,
};
use advcal_core::consistency::{
    consistency_experiment, ExperimentConfig, ExperimentReport, Optimizer, SyntheticDistribution, TrainTrace,
};
use advcal_core::grid::{ParamGridSpec, TGrid, VerdictGrid};
use advcal_core::hypothesis::{adversarial_margins, margins_oracle, Family, Hypothesis};
use advcal_core::loss::{verify_loss_properties, MarginLoss, PropertyReport, Props};
use advcal_core::risk::{inner_risk, minimal_inner_risk, LossForm, Surrogate, SurrogateForm};
use advcal_core::theorems::{
    check_qce_glm, check_qce_linear, check_relu_corollary, convex_negative_witness, regularity_theorem_check,
    sup_rho_positive_check, Prediction, TheoremVerdict, CONDITION_POINTS,
};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::output::{csv_table, fmt17, Artifact};
use crate::spec::{FamilySpec, LinkSpec, LossSpec, SurrogateSpec};
use crate::{config_err, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Losses,
    Margins,
    Risk,
    DeltaMax,
    Verdict,
    CheckTheorem,
    Witness,
    Experiment,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Losses => "losses",
            Command::Margins => "margins",
            Command::Risk => "risk",
            Command::DeltaMax => "delta-max",
            Command::Verdict => "verdict",
            Command::CheckTheorem => "check-theorem",
            Command::Witness => "witness",
            Command::Experiment => "experiment",
        }
    }

    pub fn default_format(self) -> Format {
        match self {
            Command::Losses | Command::Margins | Command::Risk | Command::DeltaMax => Format::Csv,
            _ => Format::Json,
        }
    }

    /// Values accepted by `--expect`.
    pub fn expectations(self) -> &'static [&'static str] {
        match self {
            Command::Verdict | Command::CheckTheorem => &["calibrated", "not-calibrated"],
            Command::Experiment => &["consistent"],
            _ => &[],
        }
    }
}

/// What a run produced.
#[derive(Debug)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    /// Set when `--expect` was given and the finding contradicts it.
    pub unmet: Option<String>,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub format: Option<Format>,
    pub expect: Option<String>,
    pub seed: Option<u64>,
}

fn parse<T: DeserializeOwned>(cfg: Value) -> Result<T, CliError> {
    serde_json::from_value(cfg).map_err(|e| config_err(e.to_string()))
}

fn json_artifact<T: Serialize>(v: &T) -> Result<Artifact, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| config_err(e.to_string()))?;
    s.push('\n');
    Ok(Artifact { suffix: "", extension: "json", content: s })
}

fn csv_artifact(header: &[&str], rows: &[Vec<String>]) -> Result<Artifact, CliError> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    Ok(Artifact { suffix: "", extension: "csv", content: csv_table(&header, rows)? })
}

fn surrogate(loss: &LossSpec, form: SurrogateForm) -> Result<Surrogate, CliError> {
    SurrogateSpec { loss: loss.clone(), form }.build()
}

fn plain() -> SurrogateForm {
    SurrogateForm::Plain
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn check_x(family: &Family, x: &[f64]) -> Result<(), CliError> {
    if x.len() != family.dim() {
        return Err(config_err(format!("point {x:?} has dimension {}, expected {}", x.len(), family.dim())));
    }
    Ok(())
}

pub fn run(command: Command, cfg: Value, opts: &RunOptions) -> Result<RunOutput, CliError> {
    let format = opts.format.unwrap_or(command.default_format());
    if let Some(e) = &opts.expect {
        if !command.expectations().contains(&e.as_str()) {
            let allowed = command.expectations();
            return Err(if allowed.is_empty() {
                config_err(format!("{} does not take --expect", command.name()))
            } else {
                config_err(format!("--expect {e:?} is not one of {allowed:?}"))
            });
        }
    }
    let expect = opts.expect.as_deref();
    match command {
        Command::Losses => losses(parse(cfg)?, format),
        Command::Margins => margins(parse(cfg)?, format),
        Command::Risk => risk(parse(cfg)?, format),
        Command::DeltaMax => delta_max(parse(cfg)?, format),
        Command::Verdict => verdict(parse(cfg)?, format, expect),
        Command::CheckTheorem => check_theorem(parse(cfg)?, format, expect),
        Command::Witness => witness(parse(cfg)?, format),
        Command::Experiment => {
            let mut c: ExperimentCfg = parse(cfg)?;
            if let Some(seed) = opts.seed {
                c.distribution.seed = seed;
            }
            experiment(c, format, expect)
        }
    }
}

fn json_only(command: Command, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(config_err(format!("{} only writes json", command.name()))),
    }
}

// ---- losses ----

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossesCfg {
    pub losses: Vec<LossSpec>,
    #[serde(default)]
    pub t_grid: TGrid,
}

#[derive(Debug, Serialize)]
pub struct LossEntry {
    pub loss: String,
    pub declared: Props,
    pub properties: PropertyReport,
    pub values: Vec<(f64, f64)>,
}

fn losses(cfg: LossesCfg, format: Format) -> Result<RunOutput, CliError> {
    if cfg.losses.is_empty() {
        return Err(config_err("no losses given"));
    }
    if cfg.t_grid.n < 2 || !(cfg.t_grid.lo < cfg.t_grid.hi) {
        return Err(config_err("t_grid needs lo < hi and at least two points"));
    }
    let ts = cfg.t_grid.points();
    let built: Vec<MarginLoss> = cfg.losses.iter().map(LossSpec::build).collect::<Result<_, _>>()?;
    let artifact = match format {
        Format::Csv => {
            let mut rows = Vec::with_capacity(ts.len() * built.len());
            for l in &built {
                for &t in &ts {
                    rows.push(vec![l.describe(), fmt17(t), fmt17(l.eval(t))]);
                }
            }
            csv_artifact(&["loss", "t", "phi"], &rows)?
        }
        Format::Json => {
            let entries: Vec<LossEntry> = built
                .iter()
                .map(|l| LossEntry {
                    loss: l.describe(),
                    declared: l.declared(),
                    properties: verify_loss_properties(l, &cfg.t_grid),
                    values: ts.iter().map(|&t| (t, l.eval(t))).collect(),
                })
                .collect();
            json_artifact(&entries)?
        }
    };
    Ok(RunOutput { artifacts: vec![artifact], unmet: None })
}

// ---- margins ----

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginsCfg {
    pub family: FamilySpec,
    pub gamma: f64,
    pub hypotheses: Vec<Hypothesis>,
    pub points: Vec<Vec<f64>>,
    /// Ball-grid points per axis for the numerical cross-check.
    #[serde(default)]
    pub oracle_points: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct MarginRow {
    pub hypothesis: usize,
    pub x: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub method: String,
    pub oracle: Option<(f64, f64)>,
}

fn margins(cfg: MarginsCfg, format: Format) -> Result<RunOutput, CliError> {
    let family = cfg.family.build()?;
    for h in &cfg.hypotheses {
        family.validate(h)?;
    }
    let mut out = Vec::new();
    for (i, h) in cfg.hypotheses.iter().enumerate() {
        for x in &cfg.points {
            check_x(&family, x)?;
            let m = adversarial_margins(&family, h, x, cfg.gamma)?;
            let oracle = match cfg.oracle_points {
                Some(n) => {
                    let o = margins_oracle(&family, h, x, cfg.gamma, n)?;
                    Some((o.lower, o.upper))
                }
                None => None,
            };
            let method = serde_json::to_value(m.method)?.as_str().unwrap_or_default().to_string();
            out.push(MarginRow { hypothesis: i, x: x.clone(), lower: m.lower, upper: m.upper, method, oracle });
        }
    }
    let artifact = match format {
        Format::Json => json_artifact(&out)?,
        Format::Csv => {
            let d = family.dim();
            let mut header: Vec<String> = vec![String::from("hypothesis")];
            header.extend((0..d).map(|k| format!("x_{k}")));
            header.extend(["lower", "upper", "method", "oracle_lower", "oracle_upper"].map(String::from));
            let rows: Vec<Vec<String>> = out
                .iter()
                .map(|r| {
                    let mut row = vec![r.hypothesis.to_string()];
                    row.extend(r.x.iter().map(|&v| fmt17(v)));
                    row.extend([fmt17(r.lower), fmt17(r.upper), r.method.clone()]);
                    match r.oracle {
                        Some((a, b)) => row.extend([fmt17(a), fmt17(b)]),
                        None => row.extend([String::new(), String::new()]),
                    }
                    row
                })
                .collect();
            Artifact { suffix: "", extension: "csv", content: csv_table(&header, &rows)? }
        }
    };
    Ok(RunOutput { artifacts: vec![artifact], unmet: None })
}

// ---- risk ----

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskCfg {
    pub loss: LossSpec,
    #[serde(default = "plain")]
    pub form: SurrogateForm,
    pub family: FamilySpec,
    pub gamma: f64,
    pub hypothesis: Hypothesis,
    pub x: Vec<f64>,
    pub etas: Vec<f64>,
    #[serde(default)]
    pub params: ParamGridSpec,
}

#[derive(Debug, Serialize)]
pub struct RiskRow {
    pub eta: f64,
    pub risk: f64,
    pub minimal: f64,
    pub excess: f64,
    pub adv01_risk: f64,
    pub adv01_minimal: f64,
    pub adv01_excess: f64,
}

fn risk(cfg: RiskCfg, format: Format) -> Result<RunOutput, CliError> {
    let family = cfg.family.build()?;
    family.validate(&cfg.hypothesis)?;
    check_x(&family, &cfg.x)?;
    let s = surrogate(&cfg.loss, cfg.form)?;
    let zo = MarginLoss::zero_one();
    let mut out = Vec::with_capacity(cfg.etas.len());
    for &eta in &cfg.etas {
        let r = inner_risk(s.loss_form(), s.loss(), &family, &cfg.hypothesis, &cfg.x, eta, cfg.gamma)?;
        let m = minimal_inner_risk(s.loss_form(), s.loss(), &family, &cfg.x, eta, cfg.gamma, &cfg.params)?.value;
        let a = inner_risk(LossForm::Adv01, &zo, &family, &cfg.hypothesis, &cfg.x, eta, cfg.gamma)?;
        let am = minimal_inner_risk(LossForm::Adv01, &zo, &family, &cfg.x, eta, cfg.gamma, &cfg.params)?.value;
        out.push(RiskRow {
            eta,
            risk: r,
            minimal: m,
            excess: r - m,
            adv01_risk: a,
            adv01_minimal: am,
            adv01_excess: a - am,
        });
    }
    let artifact = match format {
        Format::Json => json_artifact(&out)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = out
                .iter()
                .map(|r| {
                    [r.eta, r.risk, r.minimal, r.excess, r.adv01_risk, r.adv01_minimal, r.adv01_excess]
                        .map(fmt17)
                        .to_vec()
                })
                .collect();
            csv_artifact(&["eta", "risk", "minimal", "excess", "adv01_risk", "adv01_minimal", "adv01_excess"], &rows)?
        }
    };
    Ok(RunOutput { artifacts: vec![artifact], unmet: None })
}

// ---- delta-max ----

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryCfg {
    pub epsilon: f64,
    pub x: Vec<f64>,
    pub eta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaMaxCfg {
    pub loss: LossSpec,
    #[serde(default = "plain")]
    pub form: SurrogateForm,
    pub family: FamilySpec,
    pub gamma: f64,
    /// Explicit points; without them the `grid` (or the default grid) is used.
    #[serde(default)]
    pub queries: Option<Vec<QueryCfg>>,
    #[serde(default)]
    pub grid: Option<VerdictGrid>,
    #[serde(default)]
    pub method: MethodChoice,
    #[serde(default)]
    pub params: ParamGridSpec,
}

#[derive(Debug, Serialize)]
pub struct DeltaRow {
    pub epsilon: f64,
    pub x: Vec<f64>,
    pub x_norm: f64,
    pub eta: f64,
    #[serde(flatten)]
    pub value: CalibrationValue,
}

fn one_query(q: &CalibrationQuery, method: MethodChoice) -> Result<CalibrationValue, CliError> {
    Ok(match method {
        MethodChoice::Brute => delta_max_bruteforce(q)?,
        MethodChoice::Reduced => delta_max_reduced(q)?,
        MethodChoice::Auto => match delta_max_reduced(q) {
            Err(advcal_core::Error::UnsupportedReduction(_)) => delta_max_bruteforce(q)?,
            other => other?,
        },
    })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn rows_for_grid(
    s: &Surrogate,
    family: &Family,
    gamma: f64,
    opts: &VerdictOptions,
) -> Result<Vec<Vec<GridEntry>>, CliError> {
    opts.grid
        .x_norms
        .par_iter()
        .map(|&r| verdict_row(s, family, gamma, r, opts).map_err(CliError::from))
        .collect()
}

fn delta_max(cfg: DeltaMaxCfg, format: Format) -> Result<RunOutput, CliError> {
    let family = cfg.family.build()?;
    let s = surrogate(&cfg.loss, cfg.form)?;
    let rows: Vec<DeltaRow> = match (&cfg.queries, &cfg.grid) {
        (Some(_), Some(_)) => return Err(config_err("give either queries or grid, not both")),
        (Some(qs), None) => qs
            .par_iter()
            .map(|q| {
                check_x(&family, &q.x)?;
                let cq = CalibrationQuery::new(s.clone(), family.clone(), cfg.gamma, q.epsilon, q.x.clone(), q.eta)
                    .with_params(cfg.params);
                Ok(DeltaRow {
                    epsilon: q.epsilon,
                    x: q.x.clone(),
                    x_norm: norm(&q.x),
                    eta: q.eta,
                    value: one_query(&cq, cfg.method)?,
                })
            })
            .collect::<Result<_, CliError>>()?,
        (None, grid) => {
            let grid = grid.clone().unwrap_or_else(|| VerdictGrid::default_for(cfg.gamma));
            let opts = VerdictOptions { grid, params: cfg.params, tol: DEFAULT_TOL, method: cfg.method };
            let d = family.dim();
            rows_for_grid(&s, &family, cfg.gamma, &opts)?
                .into_iter()
                .flatten()
                .map(|e| {
                    let mut x = vec![0.0; d];
                    x[0] = e.x_norm;
                    DeltaRow { epsilon: e.epsilon, x, x_norm: e.x_norm, eta: e.eta, value: e.value }
                })
                .collect()
        }
    };
    let artifact = match format {
        Format::Json => json_artifact(&rows)?,
        Format::Csv => {
            let width = rows.iter().filter_map(|r| r.value.delta.witness()).map(|h| h.params().len()).max().unwrap_or(0);
            let mut header: Vec<String> = ["epsilon", "x_norm", "eta", "delta_max", "method"].map(String::from).to_vec();
            header.extend((0..width).map(|k| format!("witness_{k}")));
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let v = r.value.value().unwrap_or(f64::INFINITY);
                    let mut row = vec![fmt17(r.epsilon), fmt17(r.x_norm), fmt17(r.eta), fmt17(v)];
                    row.push(r.value.method.name().to_string());
                    if let Some(h) = r.value.delta.witness() {
                        row.extend(h.params().into_iter().map(fmt17));
                    }
                    row
                })
                .collect();
            Artifact { suffix: "", extension: "csv", content: csv_table(&header, &table)? }
        }
    };
    Ok(RunOutput { artifacts: vec![artifact], unmet: None })
}

// ---- verdict ----

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictCfg {
    pub loss: LossSpec,
    #[serde(default = "plain")]
    pub form: SurrogateForm,
    pub family: FamilySpec,
    pub gamma: f64,
    #[serde(default)]
    pub grid: Option<VerdictGrid>,
    #[serde(default)]
    pub params: ParamGridSpec,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub method: MethodChoice,
}

pub fn verdict_report(cfg: &VerdictCfg) -> Result<VerdictReport, CliError> {
    let family = cfg.family.build()?;
    let s = surrogate(&cfg.loss, cfg.form)?;
    let grid = cfg.grid.clone().unwrap_or_else(|| VerdictGrid::default_for(cfg.gamma));
    let opts = VerdictOptions { grid, params: cfg.params, tol: cfg.tol, method: cfg.method };
    let rows = rows_for_grid(&s, &family, cfg.gamma, &opts)?;
    Ok(assemble_verdict(&s, &family, cfg.gamma, &opts, rows)?)
}

fn verdict(cfg: VerdictCfg, format: Format, expect: Option<&str>) -> Result<RunOutput, CliError> {
    let report = verdict_report(&cfg)?;
    let artifact = match format {
        Format::Json => json_artifact(&report)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .entries
                .iter()
                .map(|e| {
                    vec![
                        fmt17(e.epsilon),
                        fmt17(e.x_norm),
                        fmt17(e.eta),
                        fmt17(e.value.value().unwrap_or(f64::INFINITY)),
                        e.value.method.name().to_string(),
                    ]
                })
                .collect();
            csv_artifact(&["epsilon", "x_norm", "eta", "delta_max", "method"], &rows)?
        }
    };
    let unmet = expect.and_then(|e| {
        let want = if e == "calibrated" { Verdict::ConsistentWithCalibration } else { Verdict::CalibrationViolated };
        (report.verdict != want).then(|| format!("expected {e}, verdict is {}", report.verdict.name()))
    });
    Ok(RunOutput { artifacts: vec![artifact], unmet })
}

// ---- check-theorem ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    QceLinear,
    QceGlm,
    ReluCorollary,
    SupRhoPositive,
    Regularity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckTheoremCfg {
    pub id: TheoremId,
    pub gamma: f64,
    #[serde(default)]
    pub loss: Option<LossSpec>,
    #[serde(default)]
    pub link: Option<LinkSpec>,
    #[serde(default)]
    pub bias_bound: Option<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub x_norms: Option<Vec<f64>>,
    #[serde(default)]
    pub points: Option<usize>,
    /// Also run a numeric verdict on the matching family.
    #[serde(default)]
    pub cross_check: bool,
    #[serde(default)]
    pub grid: Option<VerdictGrid>,
    #[serde(default)]
    pub params: ParamGridSpec,
}

fn need<T: Clone>(v: &Option<T>, what: &str, id: TheoremId) -> Result<T, CliError> {
    v.clone().ok_or_else(|| config_err(format!("{id:?} needs `{what}`")))
}

fn check_theorem(cfg: CheckTheoremCfg, format: Format, expect: Option<&str>) -> Result<RunOutput, CliError> {
    json_only(Command::CheckTheorem, format)?;
    let points = cfg.points.unwrap_or(CONDITION_POINTS);
    let opts = VerdictOptions {
        grid: cfg.grid.clone().unwrap_or_else(|| VerdictGrid::default_for(cfg.gamma)),
        params: cfg.params,
        tol: DEFAULT_TOL,
        method: MethodChoice::Auto,
    };
    let id = cfg.id;
    let cross = |v: TheoremVerdict, loss: &MarginLoss, family: Family| -> Result<TheoremVerdict, CliError> {
        if cfg.cross_check {
            Ok(v.cross_check(&Surrogate::plain(loss.clone()), &family, cfg.gamma, &opts)?)
        } else {
            Ok(v)
        }
    };
    let verdict = match id {
        TheoremId::QceLinear => {
            let loss = need(&cfg.loss, "loss", id)?.build()?;
            let v = check_qce_linear(&loss, cfg.gamma, points)?;
            cross(v, &loss, Family::linear(2)?)?
        }
        TheoremId::QceGlm => {
            let loss = need(&cfg.loss, "loss", id)?.build()?;
            let link = need(&cfg.link, "link", id)?.build()?;
            let g = need(&cfg.bias_bound, "bias_bound", id)?;
            let v = check_qce_glm(&loss, &link, g, cfg.gamma, points)?;
            cross(v, &loss, Family::glm(2, link, g)?)?
        }
        TheoremId::ReluCorollary => {
            let loss = need(&cfg.loss, "loss", id)?.build()?;
            let g = need(&cfg.bias_bound, "bias_bound", id)?;
            let v = check_relu_corollary(&loss, g, cfg.gamma, points)?;
            cross(v, &loss, Family::relu_glm(2, g)?)?
        }
        TheoremId::SupRhoPositive => {
            let rho = need(&cfg.rho, "rho", id)?;
            let family = need(&cfg.family, "family", id)?.build()?;
            sup_rho_positive_check(rho, &family, cfg.gamma, &opts)?
        }
        TheoremId::Regularity => {
            let family = need(&cfg.family, "family", id)?.build()?;
            let norms = cfg.x_norms.clone().unwrap_or_else(|| VerdictGrid::default_for(cfg.gamma).x_norms);
            regularity_theorem_check(&family, cfg.gamma, &norms, &cfg.params)?
        }
    };
    let unmet = expect.and_then(|e| {
        let want = if e == "calibrated" { Prediction::Calibrated } else { Prediction::NotCalibrated };
        (verdict.predicted != want).then(|| format!("expected {e}, checker predicts {:?}", verdict.predicted))
    });
    Ok(RunOutput { artifacts: vec![json_artifact(&verdict)?], unmet })
}

// ---- witness ----

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessCfg {
    pub loss: LossSpec,
    #[serde(default = "plain")]
    pub form: SurrogateForm,
    pub family: FamilySpec,
    pub gamma: f64,
    #[serde(default)]
    pub params: ParamGridSpec,
}

fn witness(cfg: WitnessCfg, format: Format) -> Result<RunOutput, CliError> {
    json_only(Command::Witness, format)?;
    let family = cfg.family.build()?;
    let s = surrogate(&cfg.loss, cfg.form)?;
    let w = convex_negative_witness(&s, &family, cfg.gamma, &cfg.params)?;
    Ok(RunOutput { artifacts: vec![json_artifact(&w)?], unmet: None })
}

// ---- experiment ----

fn default_family() -> FamilySpec {
    FamilySpec::Linear { dim: 2 }
}

fn thousand() -> usize {
    1000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentCfg {
    pub loss: LossSpec,
    #[serde(default = "plain")]
    pub form: SurrogateForm,
    #[serde(default = "default_family")]
    pub family: FamilySpec,
    pub distribution: SyntheticDistribution,
    #[serde(default = "thousand")]
    pub n_train: usize,
    #[serde(default = "thousand")]
    pub n_test: usize,
    #[serde(default)]
    pub optimizer: Optimizer,
    #[serde(default)]
    pub params: ParamGridSpec,
}

pub fn experiment_report(cfg: &ExperimentCfg) -> Result<ExperimentReport, CliError> {
    let ec = ExperimentConfig {
        surrogate: surrogate(&cfg.loss, cfg.form)?,
        family: cfg.family.build()?,
        distribution: cfg.distribution.clone(),
        n_train: cfg.n_train,
        n_test: cfg.n_test,
        optimizer: cfg.optimizer.clone(),
        params: cfg.params,
    };
    Ok(consistency_experiment(&ec)?)
}

fn trace_csv(trace: &TrainTrace) -> Result<String, CliError> {
    let header = ["iteration", "surrogate_risk", "gap", "adv_risk"].map(String::from);
    let rows: Vec<Vec<String>> = trace
        .entries
        .iter()
        .map(|e| vec![e.iteration.to_string(), fmt17(e.surrogate_risk), fmt17(e.gap), fmt17(e.adv_risk)])
        .collect();
    csv_table(&header, &rows)
}

fn experiment(cfg: ExperimentCfg, format: Format, expect: Option<&str>) -> Result<RunOutput, CliError> {
    let report = experiment_report(&cfg)?;
    let trace = trace_csv(&report.trace)?;
    let artifacts = match format {
        Format::Json => vec![json_artifact(&report)?, Artifact { suffix: ".trace", extension: "csv", content: trace }],
        Format::Csv => vec![Artifact { suffix: "", extension: "csv", content: trace }],
    };
    let unmet = expect.and_then(|_| match report.assertion_passed {
        Some(true) => None,
        Some(false) => Some(format!(
            "consistency assertion failed: adversarial risk {} on training, {} held out",
            report.final_train_adv_risk, report.heldout_adv_risk
        )),
        None => Some(String::from("no consistency assertion: the surrogate is not predicted calibrated")),
    });
    Ok(RunOutput { artifacts, unmet })
}
