//! Run configuration: a TOML file with top-level `master_seed` and
//! `output_dir` plus one section per command, overridable from the command
//! line.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{CliError, Result};

pub const COMMANDS: [&str; 8] = [
    "theorem1",
    "maxstats",
    "capstats",
    "gpucb",
    "tournament",
    "tbon",
    "identify",
    "summarize",
];

pub const DEFAULT_OUTPUT_DIR: &str = "results";
pub const OUTPUT_DIR_ENV: &str = "TBON_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem1Params {
    pub d: usize,
    pub epsilon: f64,
    /// Defaults to `epsilon / 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
    /// Edit validity radius; the default field-derived radius is smaller
    /// than `epsilon` in this setup.
    pub validity_radius: f64,
    pub n_values: Vec<usize>,
    pub trials: usize,
    /// Also emit the ascent-fraction table.
    pub ascent: bool,
}

impl Default for Theorem1Params {
    fn default() -> Self {
        Theorem1Params {
            d: 8,
            epsilon: 0.05,
            sigma0: None,
            validity_radius: 1.0,
            n_values: vec![2, 8, 64, 512, 4096, 16384],
            trials: 2000,
            ascent: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxstatsParams {
    pub n_values: Vec<u64>,
    pub trials: usize,
}

impl Default for MaxstatsParams {
    fn default() -> Self {
        MaxstatsParams {
            n_values: vec![10_000],
            trials: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapstatsParams {
    pub d_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub trials: usize,
}

impl Default for CapstatsParams {
    fn default() -> Self {
        CapstatsParams {
            d_values: vec![2, 3, 8],
            n_values: (2..=10).map(|k| 1 << k).collect(),
            trials: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpucbParams {
    /// `sinusoid`, `quadratic` or `branin`.
    pub function: String,
    pub d: usize,
    /// `se` or `matern`.
    pub kernel: String,
    pub nu: f64,
    pub lengthscale: f64,
    pub noise_sd: f64,
    /// `constant` or `log`.
    pub schedule: String,
    pub beta: f64,
    pub iterations: usize,
    pub seeds: usize,
    pub n_starts: usize,
    /// Also run uniform random search on the same seeds.
    pub baseline: bool,
}

impl Default for GpucbParams {
    fn default() -> Self {
        GpucbParams {
            function: "sinusoid".into(),
            d: 1,
            kernel: "se".into(),
            nu: 2.5,
            lengthscale: 0.3,
            noise_sd: 0.1,
            schedule: "constant".into(),
            beta: 2.0,
            iterations: 30,
            seeds: 50,
            n_starts: 8,
            baseline: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TournamentParams {
    pub n: usize,
    pub accuracy: f64,
    pub repeats: u32,
    pub trials: usize,
}

impl Default for TournamentParams {
    fn default() -> Self {
        TournamentParams {
            n: 16,
            accuracy: 0.9,
            repeats: 4,
            trials: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TbonConfig {
    /// `synthetic` or `mock`.
    pub backend: String,
    /// Synthetic field: `linear`, `quadratic`, `sinusoid` or `branin`.
    pub model: String,
    pub d: usize,
    pub epsilon: f64,
    pub sigma0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validity_radius: Option<f64>,
    /// Every trajectory starts at this value in each coordinate.
    pub start: f64,
    pub noise_sd: f64,
    pub table_size: usize,
    pub iterations: usize,
    pub trajectories: usize,
    pub gradient_steps: usize,
    pub candidates: usize,
    pub eval_samples: usize,
    /// `oracle` or `tournament`.
    pub selector: String,
    pub repeats: u32,
    pub judge_accuracy: f64,
}

impl Default for TbonConfig {
    fn default() -> Self {
        TbonConfig {
            backend: "synthetic".into(),
            model: "quadratic".into(),
            d: 2,
            epsilon: 0.05,
            sigma0: 0.1,
            validity_radius: None,
            start: 1.0,
            noise_sd: 0.1,
            table_size: 16,
            iterations: 20,
            trajectories: 4,
            gradient_steps: 2,
            candidates: 8,
            eval_samples: 4,
            selector: "oracle".into(),
            repeats: 2,
            judge_accuracy: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentifyParams {
    pub arms: usize,
    pub spacing: f64,
    pub sd: f64,
    pub budget: usize,
    pub k_worst: usize,
    pub reps: usize,
    pub score_range: f64,
    pub delta: f64,
}

impl Default for IdentifyParams {
    fn default() -> Self {
        IdentifyParams {
            arms: 64,
            spacing: 0.1,
            sd: 0.5,
            budget: 5000,
            k_worst: 5,
            reps: 200,
            score_range: 1.0,
            delta: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SummarizeParams {
    pub inputs: Vec<PathBuf>,
    pub group_by: Vec<String>,
    /// Columns to summarize; empty means every non-group column.
    pub metrics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Theorem1(Theorem1Params),
    Maxstats(MaxstatsParams),
    Capstats(CapstatsParams),
    Gpucb(GpucbParams),
    Tournament(TournamentParams),
    Tbon(TbonConfig),
    Identify(IdentifyParams),
    Summarize(SummarizeParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Theorem1(_) => "theorem1",
            Command::Maxstats(_) => "maxstats",
            Command::Capstats(_) => "capstats",
            Command::Gpucb(_) => "gpucb",
            Command::Tournament(_) => "tournament",
            Command::Tbon(_) => "tbon",
            Command::Identify(_) => "identify",
            Command::Summarize(_) => "summarize",
        }
    }

    pub fn is_randomized(&self) -> bool {
        !matches!(self, Command::Summarize(_))
    }

    fn to_value(&self) -> Value {
        let v = match self {
            Command::Theorem1(p) => Value::try_from(p),
            Command::Maxstats(p) => Value::try_from(p),
            Command::Capstats(p) => Value::try_from(p),
            Command::Gpucb(p) => Value::try_from(p),
            Command::Tournament(p) => Value::try_from(p),
            Command::Tbon(p) => Value::try_from(p),
            Command::Identify(p) => Value::try_from(p),
            Command::Summarize(p) => Value::try_from(p),
        };
        v.expect("parameter blocks serialize to TOML")
    }
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub master_seed: Option<u64>,
    pub output_dir: PathBuf,
}

/// Command-line inputs layered over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// `key=value` or `section.key=value`; values use TOML syntax, bare words
    /// are taken as strings.
    pub set: Vec<String>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    /// Value of the output-directory environment variable, if set.
    pub env_output_dir: Option<PathBuf>,
}

fn parse_value(raw: &str) -> Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => Value::String(raw.to_string()),
    }
}

fn apply_set(table: &mut Table, command: &str, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Parse(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let value = parse_value(raw.trim());
    let path: Vec<&str> = key.split('.').collect();
    let (section, field) = match path.as_slice() {
        [field] if *field == "master_seed" || *field == "output_dir" => (None, *field),
        [field] => (Some(command), *field),
        [section, field] => (Some(*section), *field),
        _ => return Err(CliError::Parse(format!("override key `{key}` is nested too deeply"))),
    };
    match section {
        None => {
            table.insert(field.to_string(), value);
        }
        Some(s) => {
            let entry = table.entry(s.to_string()).or_insert_with(|| Value::Table(Table::new()));
            let Value::Table(t) = entry else {
                return Err(CliError::Parse(format!("`{s}` is not a section")));
            };
            t.insert(field.to_string(), value);
        }
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileShape {
    master_seed: Option<u64>,
    output_dir: Option<PathBuf>,
    theorem1: Option<Theorem1Params>,
    maxstats: Option<MaxstatsParams>,
    capstats: Option<CapstatsParams>,
    gpucb: Option<GpucbParams>,
    tournament: Option<TournamentParams>,
    tbon: Option<TbonConfig>,
    identify: Option<IdentifyParams>,
    summarize: Option<SummarizeParams>,
}

/// Parses and validates the config for `command`.
///
/// Precedence, highest first: `--set`/`--seed`/`--output-dir` flags, the
/// environment variable (output directory only), the file, built-in
/// defaults. Sections for other commands are parsed and validated for
/// unknown keys but otherwise ignored.
pub fn parse_config(command: &str, file_text: Option<&str>, overrides: &Overrides) -> Result<RunConfig> {
    if !COMMANDS.contains(&command) {
        return Err(CliError::Parse(format!("unknown command `{command}`")));
    }
    let mut table: Table = match file_text {
        Some(text) => text.parse().map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?,
        None => Table::new(),
    };
    for s in &overrides.set {
        apply_set(&mut table, command, s)?;
    }
    if let Some(seed) = overrides.seed {
        let seed = i64::try_from(seed).map_err(|_| CliError::invalid("master_seed", "must fit in 63 bits"))?;
        table.insert("master_seed".into(), Value::Integer(seed));
    }
    let shape: FileShape = Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;

    let command = match command {
        "theorem1" => Command::Theorem1(shape.theorem1.unwrap_or_default()),
        "maxstats" => Command::Maxstats(shape.maxstats.unwrap_or_default()),
        "capstats" => Command::Capstats(shape.capstats.unwrap_or_default()),
        "gpucb" => Command::Gpucb(shape.gpucb.unwrap_or_default()),
        "tournament" => Command::Tournament(shape.tournament.unwrap_or_default()),
        "tbon" => Command::Tbon(shape.tbon.unwrap_or_default()),
        "identify" => Command::Identify(shape.identify.unwrap_or_default()),
        _ => Command::Summarize(shape.summarize.unwrap_or_default()),
    };
    let output_dir = overrides
        .output_dir
        .clone()
        .or_else(|| overrides.env_output_dir.clone())
        .or(shape.output_dir)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let mut cfg = RunConfig {
        command,
        master_seed: shape.master_seed,
        output_dir,
    };
    validate(&mut cfg)?;
    Ok(cfg)
}

impl RunConfig {
    /// The effective config as TOML; parsing it back yields the same config.
    pub fn to_toml(&self) -> String {
        let mut t = Table::new();
        if let Some(seed) = self.master_seed {
            t.insert("master_seed".into(), Value::Integer(seed as i64));
        }
        t.insert(
            "output_dir".into(),
            Value::String(self.output_dir.to_string_lossy().into_owned()),
        );
        t.insert(self.command.name().into(), self.command.to_value());
        toml::to_string(&t).expect("config serializes")
    }

    pub fn seed(&self) -> Result<u64> {
        self.master_seed
            .ok_or_else(|| CliError::invalid("master_seed", "randomized commands need an explicit seed (--seed)"))
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must be non-negative, got {v}")))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must be at least {min}, got {v}")))
    }
}

fn one_of(field: &str, v: &str, allowed: &[&str]) -> Result<()> {
    if allowed.contains(&v) {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("`{v}` is not one of {allowed:?}")))
    }
}

fn even_repeats(field: &str, k: u32) -> Result<()> {
    if k > 0 && k.is_multiple_of(2) {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must be a positive even number, got {k}")))
    }
}

fn accuracy(field: &str, p: f64) -> Result<()> {
    if p > 0.5 && p <= 1.0 {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must lie in (0.5, 1], got {p}")))
    }
}

/// Checks every field against the preconditions of the code it feeds and
/// fills derived defaults.
fn validate(cfg: &mut RunConfig) -> Result<()> {
    if cfg.command.is_randomized() {
        cfg.seed()?;
    }
    match &mut cfg.command {
        Command::Theorem1(p) => {
            at_least("theorem1.d", p.d, 2)?;
            positive("theorem1.epsilon", p.epsilon)?;
            let sigma0 = *p.sigma0.get_or_insert(p.epsilon / 2.0);
            positive("theorem1.sigma0", sigma0)?;
            positive("theorem1.validity_radius", p.validity_radius)?;
            if p.validity_radius < p.epsilon {
                return Err(CliError::invalid("theorem1.validity_radius", "must be at least epsilon"));
            }
            at_least("theorem1.n_values", p.n_values.len(), 1)?;
            for &n in &p.n_values {
                at_least("theorem1.n_values", n, 2)?;
            }
            at_least("theorem1.trials", p.trials, 1)?;
        }
        Command::Maxstats(p) => {
            at_least("maxstats.n_values", p.n_values.len(), 1)?;
            for &n in &p.n_values {
                at_least("maxstats.n_values", n as usize, 2)?;
            }
            at_least("maxstats.trials", p.trials, 1)?;
        }
        Command::Capstats(p) => {
            at_least("capstats.d_values", p.d_values.len(), 1)?;
            for &d in &p.d_values {
                at_least("capstats.d_values", d, 2)?;
            }
            at_least("capstats.n_values", p.n_values.len(), 1)?;
            for &n in &p.n_values {
                at_least("capstats.n_values", n, 1)?;
            }
            at_least("capstats.trials", p.trials, 1)?;
        }
        Command::Gpucb(p) => {
            one_of("gpucb.function", &p.function, &["sinusoid", "quadratic", "branin"])?;
            at_least("gpucb.d", p.d, 1)?;
            one_of("gpucb.kernel", &p.kernel, &["se", "matern"])?;
            if p.nu != 1.5 && p.nu != 2.5 {
                return Err(CliError::invalid("gpucb.nu", "must be 1.5 or 2.5"));
            }
            positive("gpucb.lengthscale", p.lengthscale)?;
            non_negative("gpucb.noise_sd", p.noise_sd)?;
            one_of("gpucb.schedule", &p.schedule, &["constant", "log"])?;
            positive("gpucb.beta", p.beta)?;
            at_least("gpucb.iterations", p.iterations, 1)?;
            at_least("gpucb.seeds", p.seeds, 1)?;
            at_least("gpucb.n_starts", p.n_starts, 1)?;
        }
        Command::Tournament(p) => {
            at_least("tournament.n", p.n, 1)?;
            accuracy("tournament.accuracy", p.accuracy)?;
            even_repeats("tournament.repeats", p.repeats)?;
            at_least("tournament.trials", p.trials, 1)?;
        }
        Command::Tbon(p) => {
            one_of("tbon.backend", &p.backend, &["synthetic", "mock"])?;
            one_of("tbon.model", &p.model, &["linear", "quadratic", "sinusoid", "branin"])?;
            at_least("tbon.d", p.d, 1)?;
            if p.model == "linear" && p.d < 2 {
                return Err(CliError::invalid("tbon.d", "the linear field needs d >= 2"));
            }
            positive("tbon.epsilon", p.epsilon)?;
            if p.model == "linear" {
                positive("tbon.sigma0", p.sigma0)?;
            } else {
                non_negative("tbon.sigma0", p.sigma0)?;
            }
            if let Some(r) = p.validity_radius {
                positive("tbon.validity_radius", r)?;
            }
            if !p.start.is_finite() {
                return Err(CliError::invalid("tbon.start", "must be finite"));
            }
            non_negative("tbon.noise_sd", p.noise_sd)?;
            at_least("tbon.table_size", p.table_size, 1)?;
            at_least("tbon.trajectories", p.trajectories, 1)?;
            at_least("tbon.gradient_steps", p.gradient_steps, 1)?;
            at_least("tbon.candidates", p.candidates, 1)?;
            at_least("tbon.eval_samples", p.eval_samples, 1)?;
            one_of("tbon.selector", &p.selector, &["oracle", "tournament"])?;
            even_repeats("tbon.repeats", p.repeats)?;
            accuracy("tbon.judge_accuracy", p.judge_accuracy)?;
        }
        Command::Identify(p) => {
            at_least("identify.arms", p.arms, 1)?;
            non_negative("identify.spacing", p.spacing)?;
            non_negative("identify.sd", p.sd)?;
            at_least("identify.budget", p.budget, p.arms)?;
            if p.k_worst < 1 || p.k_worst > p.arms {
                return Err(CliError::invalid("identify.k_worst", format!("must lie in 1..={}", p.arms)));
            }
            at_least("identify.reps", p.reps, 1)?;
            non_negative("identify.score_range", p.score_range)?;
            if !(p.delta > 0.0 && p.delta < 1.0) {
                return Err(CliError::invalid("identify.delta", "must lie in (0, 1)"));
            }
        }
        Command::Summarize(p) => {
            at_least("summarize.inputs", p.inputs.len(), 1)?;
        }
    }
    Ok(())
}
