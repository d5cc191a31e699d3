use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use srf_core::hp::{parse_float, DEFAULT_PRECISION_BITS, MAX_PRECISION_BITS, MIN_PRECISION_BITS, PRECISION_ENV};
use srf_core::spectral::EpsilonMode;
use srf_core::{SupportSet, SystemParams};

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "srf", version, about = "High-precision limits of sparse superresolution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Band fraction y in (0, 1/2), decimal or fraction.
    #[arg(long, global = true, conflicts_with = "srf")]
    pub y: Option<String>,

    /// Superresolution factor; y = 1/SRF.
    #[arg(long, global = true)]
    pub srf: Option<String>,

    #[arg(long, global = true)]
    pub k: Option<usize>,

    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Largest support span searched in exhaustive mode.
    #[arg(long, global = true)]
    pub span: Option<i64>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<String>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eps: Option<String>,

    #[arg(long = "precision-bits", global = true, env = PRECISION_ENV)]
    pub precision_bits: Option<u32>,

    #[arg(long = "srf-grid", global = true, value_delimiter = ',')]
    pub srf_grid: Vec<f64>,

    #[arg(long = "y-grid", global = true, value_delimiter = ',')]
    pub y_grid: Vec<f64>,

    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Comma-separated integer offsets.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub support: Vec<i64>,

    /// Exterior point `re,im` for kernel and map queries.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub point: Option<String>,

    /// Worker threads; machine parallelism when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Gram matrix of a support.
    Gram,
    /// Smallest singular value of a support, with the precision ladder.
    Smin,
    /// Lower restricted isometry constant.
    Epsilon,
    /// Noise-robust spark.
    Spark,
    /// Exhaustive check that contiguous supports are extremal.
    Contiguity,
    /// Small-y exponent fit of the smallest eigenvalue.
    Asymptote,
    /// Conformal map, kernel and orthogonal polynomial queries.
    Szego,
    /// Two-sided and growth inequalities.
    Bounds,
    /// Brute-force l0 recovery of a seeded sparse instance.
    Recover,
    /// Adversarial pair at the minimax lower bound.
    Adversary,
    /// Minimax sandwich experiment.
    Minimax,
    /// Log-log slope of eps_2k against SRF.
    Scaling,
    /// Full acceptance suite.
    Selftest,
}

impl Command {
    pub fn needs_system(self) -> bool {
        !matches!(self, Command::Asymptote | Command::Scaling | Command::Selftest)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Contiguous,
    Exhaustive,
}

impl From<Mode> for EpsilonMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Contiguous => EpsilonMode::Contiguous,
            Mode::Exhaustive => EpsilonMode::Exhaustive,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub const DEFAULT_SRF_GRID: [f64; 5] = [8.0, 12.0, 16.0, 24.0, 32.0];
pub const DEFAULT_Y_GRID: [f64; 6] = [1e-3, 1.5e-3, 2e-3, 3e-3, 5e-3, 8e-3];

/// Fully resolved invocation, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: Command,
    pub y: Option<String>,
    pub srf: Option<String>,
    /// Exact band fraction as a reduced fraction.
    pub y_exact: Option<String>,
    pub k: usize,
    pub n: usize,
    pub span: i64,
    pub sigma: String,
    pub eps: String,
    pub precision_bits: u32,
    pub srf_grid: Vec<f64>,
    pub y_grid: Vec<f64>,
    pub mode: Mode,
    pub format: Format,
    pub output_path: Option<String>,
    pub seed: u64,
    pub support: Option<Vec<i64>>,
    pub point: Option<String>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> CliResult<Self> {
        let precision_bits = cli.precision_bits.unwrap_or(DEFAULT_PRECISION_BITS);
        if !(MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(&precision_bits) {
            return Err(CliError::Usage(format!(
                "--precision-bits must lie in [{MIN_PRECISION_BITS}, {MAX_PRECISION_BITS}], got {precision_bits}"
            )));
        }
        let cmd = cli.command;
        if cmd.needs_system() && cli.y.is_none() && cli.srf.is_none() {
            return Err(CliError::Usage("exactly one of --y or --srf is required".into()));
        }
        let mut config = Self {
            subcommand: cmd,
            y: cli.y.clone(),
            srf: cli.srf.clone(),
            y_exact: None,
            k: cli.k.unwrap_or(match cmd {
                Command::Spark => 6,
                Command::Contiguity => 3,
                _ => 1,
            }),
            n: cli.n.unwrap_or(match cmd {
                Command::Recover => 8,
                _ => 4,
            }),
            span: cli.span.unwrap_or(10),
            sigma: cli.sigma.clone().unwrap_or_else(|| "1e-4".into()),
            eps: cli.eps.clone().unwrap_or_else(|| "1e-3".into()),
            precision_bits,
            srf_grid: if cli.srf_grid.is_empty() { DEFAULT_SRF_GRID.to_vec() } else { cli.srf_grid.clone() },
            y_grid: if cli.y_grid.is_empty() { DEFAULT_Y_GRID.to_vec() } else { cli.y_grid.clone() },
            mode: cli.mode.unwrap_or(Mode::Contiguous),
            format: cli.format,
            output_path: cli.output.as_ref().map(|p| p.display().to_string()),
            seed: cli.seed,
            support: (!cli.support.is_empty()).then(|| cli.support.clone()),
            point: cli.point.clone(),
            threads: cli.threads,
        };
        if config.y.is_some() || config.srf.is_some() {
            config.y_exact = Some(config.params()?.y_rational().to_string());
        }
        if cli.threads == Some(0) {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        Ok(config)
    }

    pub fn params(&self) -> CliResult<SystemParams> {
        let bits = self.precision_bits;
        match (&self.y, &self.srf) {
            (Some(y), None) => Ok(SystemParams::parse(y, bits)?),
            (None, Some(s)) => Ok(SystemParams::from_srf(s, bits)?),
            (Some(_), Some(_)) => Err(CliError::Usage("--y and --srf are mutually exclusive".into())),
            (None, None) => Err(CliError::Usage("exactly one of --y or --srf is required".into())),
        }
    }

    fn positive_float(&self, name: &str, value: &str) -> CliResult<rug::Float> {
        match parse_float(self.precision_bits, value) {
            Some(v) if v > 0 && v.is_finite() => Ok(v),
            _ => Err(CliError::Usage(format!("--{name} must be a positive number, got {value:?}"))),
        }
    }

    pub fn sigma(&self) -> CliResult<rug::Float> {
        self.positive_float("sigma", &self.sigma)
    }

    pub fn eps(&self) -> CliResult<rug::Float> {
        self.positive_float("eps", &self.eps)
    }

    /// `--support` when given, otherwise `{0, …, n}`.
    pub fn support_or_contiguous(&self) -> CliResult<SupportSet> {
        match &self.support {
            Some(s) => Ok(SupportSet::new(s.clone())?),
            None => Ok(SupportSet::contiguous(self.n + 1)),
        }
    }

    pub fn point(&self) -> CliResult<Option<(f64, f64)>> {
        let Some(p) = &self.point else { return Ok(None) };
        let parsed = p.split_once(',').and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
        match parsed {
            Some(pair) => Ok(Some(pair)),
            None => Err(CliError::Usage(format!("--point expects `re,im`, got {p:?}"))),
        }
    }
}
