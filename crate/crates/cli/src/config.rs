use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use diamond_gap::verify::EnvMode;
use serde::Deserialize;

/// Seed used when neither a flag nor the config file sets one.
pub const DEFAULT_SEED: u64 = 0xD1A30D;

pub const D_RANGE: std::ops::RangeInclusive<usize> = 2..=8;

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_BUDGET: usize = 500;
pub const DEFAULT_RESTARTS: usize = 50;
pub const DEFAULT_D: usize = 2;

/// Tolerances that can be overridden with `--tol name=value` or a
/// `[tolerances]` table.
pub const TOLERANCE_NAMES: [&str; 3] = ["theorem", "lemma", "strict_gap"];

#[derive(Debug, Parser)]
#[command(
    name = "diamond-gap",
    version,
    about = "Numerical checks of ‖Θ∘(id−T)‖◇ ≤ (d/√2)‖id−T‖◇"
)]
pub struct Cli {
    /// TOML file with a [run] table; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for sweeps (also DIAMOND_GAP_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Tolerance override, e.g. `--tol theorem=1e-7`.
    #[arg(long = "tol", global = true, value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep Haar-random channels and check the inequality for each.
    Verify(VerifyArgs),
    /// Randomized checks of the supporting lemmas and identities.
    Lemmas(LemmasArgs),
    /// Diamond norms of one channel.
    Norms(NormsArgs),
    /// Slack of the norm chain at the ascent maximizer.
    Gap(GapArgs),
    /// Random search for channels with a large L/(dR).
    Search(SearchArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Environment dimension: 1, d, d2 or mixed.
    #[arg(long)]
    pub env: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Ascent restarts for the cross-check (0 disables it).
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LemmasArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    /// T, id-minus-T or theta-id-minus-T; all three when absent.
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("bad tolerance value '{value}': {e}"))?;
    Ok((name.trim().to_string(), value))
}

/// Contents of a config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub run: RunTable,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunTable {
    pub d: Option<usize>,
    pub samples: Option<usize>,
    pub trials: Option<usize>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub env: Option<String>,
    pub out: Option<PathBuf>,
    pub channel: Option<String>,
    pub map: Option<String>,
    pub restarts: Option<usize>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Verify,
    Lemmas,
    Norms,
    Gap,
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapChoice {
    T,
    IdMinusT,
    ThetaIdMinusT,
}

impl std::str::FromStr for MapChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "T" | "t" => Ok(Self::T),
            "id-minus-T" | "id-minus-t" => Ok(Self::IdMinusT),
            "theta-id-minus-T" | "theta-id-minus-t" => Ok(Self::ThetaIdMinusT),
            other => Err(format!(
                "unknown map '{other}' (expected T, id-minus-T, theta-id-minus-T)"
            )),
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Mode,
    pub d: usize,
    pub seed: u64,
    pub samples: usize,
    pub trials: usize,
    pub budget: usize,
    pub restarts: usize,
    pub env: EnvMode,
    pub channel_spec: Option<String>,
    pub map: Option<MapChoice>,
    pub tolerances: BTreeMap<String, f64>,
    pub output_path: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }
}

#[derive(Debug)]
pub enum ConfigError {
    /// Includes `--help` and `--version`, which clap reports as errors.
    Clap(clap::Error),
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Clap(e) => write!(f, "{e}"),
            Self::Invalid(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

pub fn read_config_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read config file {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| invalid(format!("bad config file {}: {e}", path.display())))
}

/// Parses `argv` (including the program name) and merges it over the
/// config file named by `--config`, if any.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(ConfigError::Clap)?;
    let file = match &cli.config {
        Some(p) => read_config_file(p)?,
        None => FileConfig::default(),
    };
    resolve(cli, file, std::env::var(THREADS_ENV).ok())
}

pub const THREADS_ENV: &str = "DIAMOND_GAP_THREADS";

/// Applies the precedence flags > file > defaults. The thread count also
/// reads `env_threads`, which sits between the flag and the file.
pub fn resolve(cli: Cli, file: FileConfig, env_threads: Option<String>) -> Result<RunConfig, ConfigError> {
    let run = file.run;
    let env_threads = match env_threads {
        Some(s) => Some(
            s.trim()
                .parse::<usize>()
                .map_err(|_| invalid(format!("{THREADS_ENV} must be a positive integer, got '{s}'")))?,
        ),
        None => None,
    };
    let mut tolerances = file.tolerances;
    for (k, v) in cli.tolerances {
        tolerances.insert(k, v);
    }
    for (k, v) in &tolerances {
        if !TOLERANCE_NAMES.contains(&k.as_str()) {
            return Err(invalid(format!(
                "unknown tolerance '{k}' (known: {})",
                TOLERANCE_NAMES.join(", ")
            )));
        }
        if !(v.is_finite() && *v >= 0.0) {
            return Err(invalid(format!("tolerance '{k}' must be a nonnegative number")));
        }
    }

    let mut cfg = RunConfig {
        subcommand: Mode::Verify,
        d: run.d.unwrap_or(DEFAULT_D),
        seed: run.seed.unwrap_or(DEFAULT_SEED),
        samples: run.samples.unwrap_or(DEFAULT_SAMPLES),
        trials: run.trials.unwrap_or(DEFAULT_TRIALS),
        budget: run.budget.unwrap_or(DEFAULT_BUDGET),
        restarts: run.restarts.unwrap_or(DEFAULT_RESTARTS),
        env: EnvMode::Mixed,
        channel_spec: run.channel,
        map: None,
        tolerances,
        output_path: run.out,
        threads: cli.threads.or(env_threads).or(run.threads),
    };
    let mut env = run.env;
    let mut map = run.map;

    fn set<T>(slot: &mut T, flag: Option<T>) {
        if let Some(v) = flag {
            *slot = v;
        }
    }

    match cli.command {
        Command::Verify(a) => {
            cfg.subcommand = Mode::Verify;
            set(&mut cfg.d, a.d);
            set(&mut cfg.samples, a.samples);
            set(&mut cfg.seed, a.seed);
            set(&mut cfg.output_path, a.out.map(Some));
            env = a.env.or(env);
            // verify defaults to a light ascent cross-check
            cfg.restarts = a.restarts.or(run.restarts).unwrap_or(2);
        }
        Command::Lemmas(a) => {
            cfg.subcommand = Mode::Lemmas;
            set(&mut cfg.trials, a.trials);
            set(&mut cfg.seed, a.seed);
            set(&mut cfg.output_path, a.out.map(Some));
        }
        Command::Norms(a) => {
            cfg.subcommand = Mode::Norms;
            set(&mut cfg.d, a.d);
            set(&mut cfg.seed, a.seed);
            set(&mut cfg.channel_spec, a.channel.map(Some));
            map = a.map.or(map);
        }
        Command::Gap(a) => {
            cfg.subcommand = Mode::Gap;
            set(&mut cfg.d, a.d);
            set(&mut cfg.restarts, a.restarts);
            set(&mut cfg.seed, a.seed);
            set(&mut cfg.channel_spec, a.channel.map(Some));
            set(&mut cfg.output_path, a.out.map(Some));
        }
        Command::Search(a) => {
            cfg.subcommand = Mode::Search;
            set(&mut cfg.d, a.d);
            set(&mut cfg.budget, a.budget);
            set(&mut cfg.seed, a.seed);
            set(&mut cfg.output_path, a.out.map(Some));
        }
    }

    if let Some(e) = env {
        cfg.env = e.parse().map_err(|e: diamond_gap::Error| invalid(e.to_string()))?;
    }
    if let Some(m) = map {
        cfg.map = Some(m.parse().map_err(invalid)?);
    }
    if !D_RANGE.contains(&cfg.d) {
        return Err(invalid(format!(
            "d must be in [{}, {}], got {}",
            D_RANGE.start(),
            D_RANGE.end(),
            cfg.d
        )));
    }
    if matches!(cfg.subcommand, Mode::Norms | Mode::Gap) && cfg.channel_spec.is_none() {
        return Err(invalid("--channel is required"));
    }
    if cfg.threads == Some(0) {
        return Err(invalid("--threads must be at least 1"));
    }
    Ok(cfg)
}
