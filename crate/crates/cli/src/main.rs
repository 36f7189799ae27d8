use std::path::{Path, PathBuf};
use std::process::ExitCode;

use advcal::commands::{run, Command, Format, RunOptions};
use advcal::output::{destination, emit};
use advcal::{config_err, CliError};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

/// Adversarial calibration toolkit for margin-based surrogate losses.
#[derive(Parser, Debug)]
#[command(name = "advcal", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Loss values on a t-grid, with property reports in json.
    Losses,
    /// Adversarial margins of hypotheses at points.
    Margins,
    /// Inner risks and excesses at one point.
    Risk,
    /// Calibration function values on queries or a grid.
    DeltaMax,
    /// Calibration verdict over an (epsilon, |x|, eta) grid.
    Verdict,
    /// Evaluates one of the calibration criteria.
    CheckTheorem,
    /// Zero-excess witness for a convex surrogate.
    Witness,
    /// Consistency experiment on synthetic separable data.
    Experiment,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config file; inline flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file. Defaults to $ADVCAL_OUTPUT_DIR/<command>.<ext>, else stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Loss kind (e.g. hinge) or a JSON descriptor.
    #[arg(long, global = true)]
    loss: Option<String>,
    /// Ramp parameter; implies --loss rho_margin.
    #[arg(long, global = true)]
    rho: Option<f64>,
    /// plain or sup.
    #[arg(long, global = true)]
    form: Option<String>,
    /// Family kind (e.g. linear) or a JSON descriptor.
    #[arg(long, global = true)]
    family: Option<String>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Criterion id for check-theorem.
    #[arg(long, global = true)]
    id: Option<String>,
    /// Exit 1 when the finding differs from this value.
    #[arg(long, global = true)]
    expect: Option<String>,
    /// Overrides every seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

impl Cmd {
    fn command(self) -> Command {
        match self {
            Cmd::Losses => Command::Losses,
            Cmd::Margins => Command::Margins,
            Cmd::Risk => Command::Risk,
            Cmd::DeltaMax => Command::DeltaMax,
            Cmd::Verdict => Command::Verdict,
            Cmd::CheckTheorem => Command::CheckTheorem,
            Cmd::Witness => Command::Witness,
            Cmd::Experiment => Command::Experiment,
        }
    }
}

fn descriptor(raw: &str) -> Result<Value, CliError> {
    if raw.trim_start().starts_with('{') {
        serde_json::from_str(raw).map_err(|e| config_err(format!("bad descriptor {raw:?}: {e}")))
    } else {
        Ok(json!({ "kind": raw }))
    }
}

fn load(path: Option<&Path>) -> Result<Map<String, Value>, CliError> {
    let Some(path) = path else { return Ok(Map::new()) };
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))? {
        Value::Object(m) => Ok(m),
        _ => Err(config_err(format!("{}: config must be a JSON object", path.display()))),
    }
}

fn overlay(c: &Common, cfg: &mut Map<String, Value>) -> Result<(), CliError> {
    match (&c.loss, c.rho) {
        (Some(l), rho) => {
            let mut v = descriptor(l)?;
            if let Some(r) = rho {
                if v["kind"] != "rho_margin" {
                    return Err(config_err("--rho only applies to rho_margin"));
                }
                v["params"] = json!({ "rho": r });
            }
            cfg.insert("loss".into(), v);
        }
        (None, Some(r)) if cfg.contains_key("id") || c.id.as_deref() == Some("sup-rho-positive") => {
            cfg.insert("rho".into(), json!(r));
        }
        (None, Some(r)) => {
            cfg.insert("loss".into(), json!({ "kind": "rho_margin", "params": { "rho": r } }));
        }
        (None, None) => {}
    }
    if let Some(f) = &c.form {
        cfg.insert("form".into(), json!(f));
    }
    if let Some(f) = &c.family {
        cfg.insert("family".into(), descriptor(f)?);
    }
    if let Some(g) = c.gamma {
        cfg.insert("gamma".into(), json!(g));
    }
    if let Some(id) = &c.id {
        cfg.insert("id".into(), json!(id));
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Option<String>, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads)
        .build_global()
        .map_err(|e| config_err(e.to_string()))?;
    let command = cli.command.command();
    let mut cfg = load(cli.common.config.as_deref())?;
    overlay(&cli.common, &mut cfg)?;
    let opts = RunOptions { format: cli.common.format, expect: cli.common.expect.clone(), seed: cli.common.seed };
    let out = run(command, Value::Object(cfg), &opts)?;
    let ext = out.artifacts.first().map_or("json", |a| a.extension);
    let dest = destination(command.name(), cli.common.output.as_deref(), ext);
    emit(&out.artifacts, dest.as_deref())?;
    Ok(out.unmet)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            eprintln!("advcal: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(unmet)) => {
            eprintln!("advcal: {unmet}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("advcal: {}", e.to_string().replace('\n', " "));
            ExitCode::from(2)
        }
    }
}
