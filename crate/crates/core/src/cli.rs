//! Command-line driver: resolves the scenario, runs the requested experiment
//! and writes the CSV output next to a TOML run manifest.
//!
//! The scenario is resolved in layers: the `--config` document (or the
//! preset's scenario, or the baseline), then `V2X_SECRECY_*` environment
//! overrides, then command-line flags. A manifest can be passed back through
//! `--config` to replay a run exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::channel::ChannelMode;
use crate::config::{apply_env_overrides, parse_table, validate_config, ScenarioConfig, Technique};
use crate::engine::{
    compare_with_oracle, default_oracle_grid, derive_seed, estimate_sop, realization_rng, run_sweep, OracleComparison,
    Preset, SopEstimate, SweepAxis, SweepGrid, SweepResult, SweepSpec,
};
use crate::error::{Error, Result};
use crate::geometry::{generate_network, NetworkRealization};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Realizations per point for `validate-oracle` unless `--realizations` is given.
pub const ORACLE_REALIZATIONS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "v2x-secrecy", version, about = "Secrecy outage Monte Carlo for AN/CJ in stochastic V2X networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Scenario TOML document or a run manifest to replay.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV path; the manifest is written to `<out>.manifest.toml`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub realizations: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, global = true, value_enum)]
    pub technique: Option<Technique>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ChannelMode>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Dump one network realization as CSV.
    Generate,
    /// Estimate the SOP at a single operating point.
    Sop,
    /// Sweep one parameter, optionally one curve per value of a second one.
    Sweep(SweepArgs),
    /// Compare Monte Carlo AN outage against the closed form.
    ValidateOracle(OracleArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: Option<SweepAxis>,
    /// Comma-separated, strictly increasing axis values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Vec<f64>,
    #[arg(long, value_enum)]
    pub series: Option<SweepAxis>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub series_values: Vec<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OracleArgs {
    /// Points that must agree for a zero exit status; defaults to all.
    #[arg(long)]
    pub min_pass: Option<usize>,
}

/// What a finished command produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub outputs: Vec<PathBuf>,
    pub summary: String,
    pub success: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    tool: String,
    tool_version: String,
    command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_pass: Option<usize>,
    scenario: Table,
}

/// Parses `args` (program name first) and runs the command.
pub fn execute<I, T, E, K, V>(args: I, env: E) -> Result<RunReport>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    E: IntoIterator<Item = (K, V)>,
    K: AsRef<str>,
    V: AsRef<str>,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Parse {
        what: "command line".into(),
        message: e.to_string().trim().to_string(),
    })?;
    run(&cli, env)
}

pub fn run<E, K, V>(cli: &Cli, env: E) -> Result<RunReport>
where
    E: IntoIterator<Item = (K, V)>,
    K: AsRef<str>,
    V: AsRef<str>,
{
    let common = &cli.common;
    let loaded = match &common.config {
        Some(path) => Some(load_document(path)?),
        None => None,
    };
    let mut realizations_default = None;
    if matches!(cli.command, Command::ValidateOracle(_)) {
        realizations_default = Some(ORACLE_REALIZATIONS);
    }
    let config = resolve_config(common, loaded.as_ref(), env, realizations_default)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;

    pool.install(|| match &cli.command {
        Command::Generate => cmd_generate(common, &config),
        Command::Sop => cmd_sop(common, &config),
        Command::Sweep(args) => cmd_sweep(common, args, loaded.as_ref(), &config),
        Command::ValidateOracle(args) => cmd_validate_oracle(common, args, loaded.as_ref(), &config),
    })
}

/// A `--config` document: a flat scenario or a manifest.
struct LoadedDocument {
    scenario: Table,
    manifest: Option<Manifest>,
}

fn load_document(path: &Path) -> Result<LoadedDocument> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let table = parse_table(&text)?;
    if table.get("scenario").is_some_and(Value::is_table) {
        let manifest: Manifest = Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::Parse {
            what: format!("manifest {}", path.display()),
            message: e.to_string().trim().to_string(),
        })?;
        Ok(LoadedDocument {
            scenario: manifest.scenario.clone(),
            manifest: Some(manifest),
        })
    } else {
        Ok(LoadedDocument { scenario: table, manifest: None })
    }
}

fn resolve_config<E, K, V>(
    common: &CommonArgs,
    loaded: Option<&LoadedDocument>,
    env: E,
    realizations_default: Option<usize>,
) -> Result<ScenarioConfig>
where
    E: IntoIterator<Item = (K, V)>,
    K: AsRef<str>,
    V: AsRef<str>,
{
    let mut table = match (loaded, common.preset) {
        (Some(doc), _) => doc.scenario.clone(),
        (None, Some(preset)) => preset.scenario().to_table(),
        (None, None) => ScenarioConfig::fig3_baseline().to_table(),
    };
    let replaying = loaded.is_some_and(|d| d.manifest.is_some());
    if let (Some(n), false) = (realizations_default, replaying) {
        table.insert("realizations".into(), Value::Integer(n as i64));
    }
    apply_env_overrides(&mut table, env)?;
    if let Some(seed) = common.seed {
        table.insert("seed".into(), seed_value(seed));
    }
    if let Some(n) = common.realizations {
        table.insert("realizations".into(), Value::Integer(i64::try_from(n).unwrap_or(i64::MAX)));
    }
    if let Some(t) = common.technique {
        table.insert("technique".into(), Value::String(t.as_str().into()));
    }
    if let Some(m) = common.mode {
        table.insert("channel_mode".into(), Value::String(m.as_str().into()));
    }
    validate_config(&table)
}

fn seed_value(seed: u64) -> Value {
    match i64::try_from(seed) {
        Ok(v) => Value::Integer(v),
        Err(_) => Value::String(seed.to_string()),
    }
}

fn out_path(common: &CommonArgs, default: &str) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.toml");
    PathBuf::from(s)
}

fn write_manifest(out: &Path, manifest: &Manifest) -> Result<PathBuf> {
    let path = manifest_path(out);
    let text = toml::to_string(manifest).map_err(|e| Error::Parse {
        what: "manifest".into(),
        message: e.to_string(),
    })?;
    fs::write(&path, text).map_err(|source| Error::Io { path: path.clone(), source })?;
    Ok(path)
}

fn manifest(command: &str, config: &ScenarioConfig) -> Manifest {
    Manifest {
        tool: TOOL_NAME.into(),
        tool_version: TOOL_VERSION.into(),
        command: command.into(),
        preset: None,
        sweep: None,
        min_pass: None,
        scenario: config.to_table(),
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::Writer::from_writer(file))
}

fn finish<W: Write>(mut w: csv::Writer<W>, path: &Path) -> Result<()> {
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One row of a realization dump.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct NodeRecord {
    pub kind: String,
    pub x_m: f64,
    pub y_m: f64,
    pub p_m: Option<f64>,
    pub theta_rad: Option<f64>,
    pub len_m: Option<f64>,
}

/// Flattens a realization into dump rows; streets are listed by midpoint.
pub fn realization_records(net: &NetworkRealization) -> Vec<NodeRecord> {
    let node = |kind: &str, p: &crate::geometry::Point2D| NodeRecord {
        kind: kind.into(),
        x_m: p.x,
        y_m: p.y,
        p_m: None,
        theta_rad: None,
        len_m: None,
    };
    let mut rows = vec![node("alice", &net.alice)];
    for s in &net.streets {
        let m = s.midpoint();
        rows.push(NodeRecord {
            kind: "street".into(),
            x_m: m.x,
            y_m: m.y,
            p_m: Some(s.midpoint_radius),
            theta_rad: Some(s.angle),
            len_m: Some(s.length),
        });
    }
    rows.extend(net.planar_eves.iter().map(|p| node("planar_eve", p)));
    rows.extend(net.planar_charlies.iter().map(|p| node("planar_charlie", p)));
    rows.extend(net.vehicular_eves.iter().map(|p| node("veh_eve", p)));
    rows.extend(net.vehicular_charlies.iter().map(|p| node("veh_charlie", p)));
    rows
}

fn cmd_generate(common: &CommonArgs, config: &ScenarioConfig) -> Result<RunReport> {
    let out = out_path(common, "realization.csv");
    let net = generate_network(config, &mut realization_rng(config.seed, 0))?;
    let mut w = csv_writer(&out)?;
    for rec in realization_records(&net) {
        w.serialize(rec)?;
    }
    finish(w, &out)?;
    let m = write_manifest(&out, &manifest("generate", config))?;
    Ok(RunReport {
        summary: format!(
            "{} streets, {} Eves, {} Charlies -> {}",
            net.streets.len(),
            net.eve_count(),
            net.charlie_count(),
            out.display()
        ),
        outputs: vec![out, m],
        success: true,
    })
}

/// One row of a SOP table.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SopRecord {
    pub axis_name: String,
    pub axis_value: f64,
    pub technique: Technique,
    pub sop: f64,
    pub std_err: f64,
    pub realizations: usize,
    pub seed: u64,
    pub series_name: Option<String>,
    pub series_value: Option<f64>,
}

pub fn sweep_records(result: &SweepResult) -> Vec<SopRecord> {
    result
        .rows
        .iter()
        .map(|r| SopRecord {
            axis_name: result.axis_name.clone(),
            axis_value: r.axis_value,
            technique: r.technique,
            sop: r.estimate.sop,
            std_err: r.estimate.std_err,
            realizations: r.estimate.realizations,
            seed: r.estimate.seed,
            series_name: result.series_name.clone(),
            series_value: r.series_value,
        })
        .collect()
}

fn write_sop_records(path: &Path, records: &[SopRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for rec in records {
        w.serialize(rec)?;
    }
    finish(w, path)
}

fn cmd_sop(common: &CommonArgs, config: &ScenarioConfig) -> Result<RunReport> {
    let out = out_path(common, "sop.csv");
    let est: SopEstimate = estimate_sop(config, config.realizations, config.seed)?;
    let record = SopRecord {
        axis_name: "phi".into(),
        axis_value: config.phi,
        technique: config.technique,
        sop: est.sop,
        std_err: est.std_err,
        realizations: est.realizations,
        seed: est.seed,
        series_name: None,
        series_value: None,
    };
    write_sop_records(&out, &[record])?;
    let m = write_manifest(&out, &manifest("sop", config))?;
    Ok(RunReport {
        summary: format!(
            "{} sop={} std_err={} over {} realizations -> {}",
            config.technique,
            est.sop,
            est.std_err,
            est.realizations,
            out.display()
        ),
        outputs: vec![out, m],
        success: true,
    })
}

fn sweep_spec(
    common: &CommonArgs,
    args: &SweepArgs,
    loaded: Option<&LoadedDocument>,
) -> Result<(SweepSpec, Option<Preset>)> {
    let (mut spec, preset) = if let Some(axis) = args.axis {
        let series = match args.series {
            Some(s) => Some(SweepGrid::new(s, args.series_values.clone())?),
            None => None,
        };
        (
            SweepSpec {
                axis: SweepGrid::new(axis, args.values.clone())?,
                series,
                techniques: Technique::ALL.to_vec(),
            },
            None,
        )
    } else if let Some(preset) = common.preset {
        (preset.spec(), Some(preset))
    } else if let Some(m) = loaded.and_then(|d| d.manifest.as_ref()) {
        match &m.sweep {
            Some(spec) => (spec.clone(), m.preset),
            None => {
                return Err(Error::Grid {
                    axis: "sweep".into(),
                    message: "manifest has no sweep section".into(),
                })
            }
        }
    } else {
        return Err(Error::Grid {
            axis: "sweep".into(),
            message: "pass --preset or --axis with --values".into(),
        });
    };
    if let Some(t) = common.technique {
        spec.techniques = vec![t];
    }
    Ok((spec, preset))
}

fn cmd_sweep(
    common: &CommonArgs,
    args: &SweepArgs,
    loaded: Option<&LoadedDocument>,
    config: &ScenarioConfig,
) -> Result<RunReport> {
    let (spec, preset) = sweep_spec(common, args, loaded)?;
    let default_name = format!("{}.csv", preset.map_or("sweep", |p| p.name()));
    let out = out_path(common, &default_name);
    let result = run_sweep(config, &spec)?;
    let records = sweep_records(&result);
    write_sop_records(&out, &records)?;
    let mut man = manifest("sweep", config);
    man.preset = preset;
    man.sweep = Some(spec);
    let m = write_manifest(&out, &man)?;
    Ok(RunReport {
        summary: format!("{} rows over `{}` -> {}", records.len(), result.axis_name, out.display()),
        outputs: vec![out, m],
        success: true,
    })
}

#[derive(Debug, Serialize)]
struct OracleRecord {
    n_a: usize,
    phi: f64,
    beta: f64,
    sop: f64,
    std_err: f64,
    realizations: usize,
    seed: u64,
    analytic_sop: f64,
    tolerance: f64,
    pass: bool,
    poisson_mean_sop: f64,
}

impl From<&OracleComparison> for OracleRecord {
    fn from(c: &OracleComparison) -> Self {
        OracleRecord {
            n_a: c.n_a,
            phi: c.phi,
            beta: c.beta,
            sop: c.estimate.sop,
            std_err: c.estimate.std_err,
            realizations: c.estimate.realizations,
            seed: c.estimate.seed,
            analytic_sop: c.analytic,
            tolerance: c.tolerance,
            pass: c.pass,
            poisson_mean_sop: c.poisson_mean_analytic,
        }
    }
}

fn cmd_validate_oracle(
    common: &CommonArgs,
    args: &OracleArgs,
    loaded: Option<&LoadedDocument>,
    config: &ScenarioConfig,
) -> Result<RunReport> {
    let out = out_path(common, "oracle.csv");
    let grid = default_oracle_grid();
    let min_pass = args
        .min_pass
        .or_else(|| loaded.and_then(|d| d.manifest.as_ref()).and_then(|m| m.min_pass))
        .unwrap_or(grid.len());
    let mut rows = Vec::with_capacity(grid.len());
    for (i, &(n_a, phi, beta)) in grid.iter().enumerate() {
        let seed = derive_seed(config.seed, 0, i as u64, Technique::An);
        rows.push(compare_with_oracle(config, n_a, phi, beta, config.realizations, seed)?);
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let mut w = csv_writer(&out)?;
    for r in &rows {
        w.serialize(OracleRecord::from(r))?;
    }
    finish(w, &out)?;
    let mut man = manifest("validate-oracle", config);
    man.min_pass = Some(min_pass);
    let m = write_manifest(&out, &man)?;
    let success = passed >= min_pass;
    Ok(RunReport {
        summary: format!(
            "{} {passed}/{} points within 3 standard errors (need {min_pass}) -> {}",
            if success { "PASS" } else { "FAIL" },
            rows.len(),
            out.display()
        ),
        outputs: vec![out, m],
        success,
    })
}
