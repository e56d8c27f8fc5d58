use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::LevelFilter;

use circdeconv::classes::SmoothnessCase;
use circdeconv::WeightSequence;

#[derive(Debug, Parser)]
#[command(name = "circdeconv", version, about = "Circular deconvolution with an unknown error density")]
pub struct Cli {
    /// Maximum number of worker threads.
    #[arg(long, global = true, value_parser = parse_count)]
    pub jobs: Option<usize>,

    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    /// Only log errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn log_level(&self) -> LevelFilter {
        if self.quiet {
            return LevelFilter::Error;
        }
        match self.verbose {
            0 => LevelFilter::Info,
            1 => LevelFilter::Debug,
            _ => LevelFilter::Trace,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a density from a contaminated sample and an error sample.
    Estimate(EstimateArgs),
    /// Print rate quantities and selection bounds for a parametric class.
    Oracle(OracleArgs),
    /// Run one Monte Carlo experiment from a config file.
    Simulate(SimulateArgs),
    /// Run a sweep over sample sizes and fit the rate.
    Rates(RatesArgs),
}

/// How the dimension is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Fixed(usize),
    Known,
    Empirical,
}

impl ModeArg {
    pub fn name(&self) -> &'static str {
        match self {
            ModeArg::Fixed(_) => "fixed",
            ModeArg::Known => "known",
            ModeArg::Empirical => "empirical",
        }
    }
}

fn parse_mode(s: &str) -> Result<ModeArg, String> {
    match s {
        "known" => Ok(ModeArg::Known),
        "empirical" => Ok(ModeArg::Empirical),
        _ => {
            let k = s
                .strip_prefix("fixed:")
                .ok_or_else(|| format!("expected fixed:K, known or empirical, got {s:?}"))?;
            match k.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(ModeArg::Fixed(k)),
                _ => Err(format!("fixed:K needs an integer K >= 1, got {k:?}")),
            }
        }
    }
}

/// `sobolev:s` (`|j|^{2s}`) or `const`.
fn parse_omega(s: &str) -> Result<WeightSequence, String> {
    if s == "const" {
        return Ok(WeightSequence::constant());
    }
    let v = s
        .strip_prefix("sobolev:")
        .ok_or_else(|| format!("expected sobolev:S or const, got {s:?}"))?;
    let x: f64 = v.parse().map_err(|_| format!("bad exponent {v:?}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= 64.0 {
        WeightSequence::derivative(x as u32).map_err(|e| e.to_string())
    } else {
        WeightSequence::sobolev(x).map_err(|e| e.to_string())
    }
}

/// `os:a` or `ss:a`.
fn parse_lambda(s: &str) -> Result<WeightSequence, String> {
    let (tag, v) = s.split_once(':').ok_or_else(|| format!("expected os:A or ss:A, got {s:?}"))?;
    let a: f64 = v.parse().map_err(|_| format!("bad decay parameter {v:?}"))?;
    match tag {
        "os" => WeightSequence::ordinary_smooth(a),
        "ss" => WeightSequence::super_smooth(a),
        _ => return Err(format!("unknown family {tag:?}; expected os or ss")),
    }
    .map_err(|e| e.to_string())
}

fn parse_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(x) if x >= 1 => Ok(x),
        _ => Err(format!("expected an integer >= 1, got {s:?}")),
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Contaminated sample, one value in [0,1) per line.
    #[arg(long, value_name = "FILE")]
    pub y: PathBuf,

    /// Independent sample of the error, same format.
    #[arg(long, value_name = "FILE")]
    pub eps: PathBuf,

    /// Risk norm: sobolev:S (weights |j|^{2S}) or const.
    #[arg(long, value_parser = parse_omega)]
    pub omega: WeightSequence,

    /// fixed:K, known or empirical.
    #[arg(long, value_parser = parse_mode)]
    pub mode: ModeArg,

    /// Decay of |[φ]_j|²: os:A or ss:A. Known mode only.
    #[arg(long, value_parser = parse_lambda)]
    pub lambda: Option<WeightSequence>,

    /// Corridor width of the error class. Known mode only.
    #[arg(long, value_parser = parse_positive)]
    pub d: Option<f64>,

    /// Also write the S-th derivative of the estimate on the grid.
    #[arg(long)]
    pub s: Option<u32>,

    /// Number of grid points for the CSV output.
    #[arg(long, default_value_t = 512, value_parser = parse_count)]
    pub grid: usize,

    /// Overrides the penalty constant of the adaptive modes.
    #[arg(long, value_parser = parse_positive)]
    pub penalty_const: Option<f64>,

    /// Treat violated sample-size conditions as errors.
    #[arg(long)]
    pub strict: bool,

    /// Re-read the written estimate and check it reproduces the same norms.
    #[arg(long)]
    pub verify: bool,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Os,
    Ss,
}

impl From<FamilyArg> for SmoothnessCase {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Os => SmoothnessCase::Os,
            FamilyArg::Ss => SmoothnessCase::Ss,
        }
    }
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Sobolev regularity of the target: γ_j = |j|^{2p}.
    #[arg(long)]
    pub p: f64,

    /// Error decay parameter.
    #[arg(long)]
    pub a: f64,

    #[arg(long, value_enum)]
    pub family: FamilyArg,

    /// Derivative order of the risk norm: ω_j = |j|^{2s}.
    #[arg(long, default_value_t = 0)]
    pub s: u32,

    #[arg(long, default_value_t = 1.0)]
    pub d: f64,

    /// Radius of the smoothness class.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,

    #[arg(long, value_parser = parse_count)]
    pub n: usize,

    #[arg(long, value_parser = parse_count)]
    pub m: usize,

    /// Upper end of the ψ_n search; defaults to min(n, 10^6).
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Experiment config (JSON, or TOML with a .toml extension).
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// Sweep config (JSON, or TOML with a .toml extension).
    #[arg(long, value_name = "FILE")]
    pub sweep: PathBuf,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}
