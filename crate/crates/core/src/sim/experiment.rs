//! Monte Carlo risk estimation for the estimator and both selection rules.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{deconvolve, exact_risk};
use crate::selection::{empirical_tables_from_sample, select_empirical, select_known, SelectOptions};
use crate::spectral::{empirical_spectrum, CircularSample};
use crate::weights::WeightSequence;

use super::models::{DensityModel, ModelSpec};

/// Smallest truncation index used for exact risks.
pub const MIN_TAIL_BOUND: usize = 200;

/// ε-sample size: a fixed count or `ceil(scale · n^power)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleSize {
    Fixed(usize),
    Rule {
        power: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl SampleSize {
    pub fn resolve(&self, n: usize) -> usize {
        match *self {
            Self::Fixed(m) => m,
            Self::Rule { power, scale } => (scale * (n as f64).powf(power)).ceil() as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeConfig {
    /// Fixed dimension `k`.
    OracleK { k: usize },
    /// Penalized selection with known `(λ, d)`.
    Known {
        lambda: WeightSequence,
        d: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        penalty_const: Option<f64>,
        #[serde(default)]
        strict: bool,
    },
    /// Fully data-driven penalized selection.
    Empirical {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        penalty_const: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub f_model: ModelSpec,
    pub phi_model: ModelSpec,
    pub n: usize,
    pub m: SampleSize,
    /// Risk norm; defaults to `ω_j = |j|^{2s}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<WeightSequence>,
    #[serde(default)]
    pub s: u32,
    pub mode: ModeConfig,
    pub replications: usize,
    pub seed: u64,
    /// Also records the risk of every fixed `k = 1..=fixed_k_grid` on the same
    /// replications.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_k_grid: Option<usize>,
}

impl ExperimentConfig {
    pub fn omega(&self) -> Result<WeightSequence> {
        match &self.omega {
            Some(w) => {
                w.validate()?;
                Ok(w.clone())
            }
            None => WeightSequence::derivative(self.s),
        }
    }

    pub fn resolved_m(&self) -> usize {
        self.m.resolve(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::InvalidParameter("replications must be at least 1".into()));
        }
        if self.n < 2 || self.resolved_m() < 2 {
            return Err(Error::InvalidParameter(format!(
                "n and m must be at least 2, got n = {}, m = {}",
                self.n,
                self.resolved_m()
            )));
        }
        match &self.mode {
            ModeConfig::OracleK { k } if *k < 1 => {
                return Err(Error::InvalidParameter("oracle_k needs k >= 1".into()));
            }
            ModeConfig::Known { lambda, d, .. } => {
                lambda.validate()?;
                if !(*d >= 1.0) {
                    return Err(Error::InvalidParameter(format!("d must be >= 1, got {d}")));
                }
            }
            _ => {}
        }
        if let Some(0) = self.fixed_k_grid {
            return Err(Error::InvalidParameter("fixed_k_grid must be at least 1".into()));
        }
        self.omega()?;
        Ok(())
    }
}

/// Outcome of one replication.
#[derive(Debug, Clone, PartialEq)]
struct Replication {
    k_hat: usize,
    risk: f64,
    fixed_risks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub config: ExperimentConfig,
    pub n: usize,
    pub m: usize,
    pub risks: Vec<f64>,
    pub k_hats: Vec<usize>,
    pub mean_risk: f64,
    pub std_error: f64,
    pub k_hat_histogram: BTreeMap<usize, usize>,
    /// Mean risk of fixed `k = 1..=fixed_k_grid` (entry `k - 1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_k_mean_risks: Option<Vec<f64>>,
    /// `(2π)^{2s}`: converts an `|j|^{2s}`-weighted risk into the L² risk of
    /// the `s`-th derivative.
    pub derivative_scale: f64,
}

impl RiskReport {
    /// Smallest fixed-`k` mean risk and its `k`.
    pub fn best_fixed_k(&self) -> Option<(usize, f64)> {
        self.fixed_k_mean_risks.as_ref().and_then(|r| {
            r.iter()
                .enumerate()
                .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                    Some((_, b)) if b <= *v => best,
                    _ => Some((i + 1, *v)),
                })
        })
    }
}

/// Seed of replication `index`: `seed ⊕ index`.
pub fn replication_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

/// Draws `(Y, ε)` samples: `Y = X + ε' mod 1` with `X ~ f`, `ε' ~ φ`, and an
/// independent ε-sample of size `m`.
pub fn draw_samples(
    f: &DensityModel,
    phi: &DensityModel,
    n: usize,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(CircularSample, CircularSample)> {
    let x = f.sample(n, rng)?;
    let noise = phi.sample(n, rng)?;
    let y = CircularSample::from_wrapped(x.values().iter().zip(noise.values()).map(|(a, b)| a + b))?;
    let eps = phi.sample(m, rng)?;
    Ok((y, eps))
}

struct Bed {
    f: DensityModel,
    phi: DensityModel,
    omega: WeightSequence,
    n: usize,
    m: usize,
}

fn replicate(cfg: &ExperimentConfig, bed: &Bed, seed: u64) -> Result<Replication> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (y, eps) = draw_samples(&bed.f, &bed.phi, bed.n, bed.m, &mut rng)?;
    let grid = cfg.fixed_k_grid.unwrap_or(0);

    let (k_hat, g_hat, phi_hat) = match &cfg.mode {
        ModeConfig::OracleK { k } => {
            let range = (*k).max(grid);
            (*k, empirical_spectrum(&y, range), empirical_spectrum(&eps, range))
        }
        ModeConfig::Known {
            lambda,
            d,
            penalty_const,
            strict,
        } => {
            let tables = crate::selection::known_tables(&bed.omega, lambda, *d, bed.n, bed.m, *strict)?;
            let range = tables.search_cap().max(grid);
            let g_hat = empirical_spectrum(&y, range);
            let phi_hat = empirical_spectrum(&eps, range);
            let opts = SelectOptions {
                penalty_const: *penalty_const,
                strict: *strict,
            };
            let (sel, _) = select_known(&g_hat, &phi_hat, bed.m, bed.n, &bed.omega, lambda, *d, opts)?;
            (sel.k_hat, g_hat, phi_hat)
        }
        ModeConfig::Empirical { penalty_const } => {
            let (mut phi_hat, tables) = empirical_tables_from_sample(&eps, &bed.omega, bed.n, 16)?;
            let range = tables.search_cap().max(grid);
            if phi_hat.max_index() < range {
                phi_hat = empirical_spectrum(&eps, range);
            }
            let g_hat = empirical_spectrum(&y, range);
            let opts = SelectOptions {
                penalty_const: *penalty_const,
                strict: false,
            };
            let (sel, _) = select_empirical(&g_hat, &phi_hat, bed.n, bed.m, &bed.omega, opts)?;
            (sel.k_hat, g_hat, phi_hat)
        }
    };

    let risk_at = |k: usize| -> Result<f64> {
        let est = deconvolve(&g_hat, &phi_hat, bed.m, k)?;
        exact_risk(&est, &bed.f, &bed.omega, (4 * k).max(MIN_TAIL_BOUND))
    };
    let risk = risk_at(k_hat)?;
    let fixed_risks = (1..=grid).map(risk_at).collect::<Result<Vec<_>>>()?;
    Ok(Replication {
        k_hat,
        risk,
        fixed_risks,
    })
}

/// Runs all replications (in parallel on the current rayon pool) and
/// aggregates them in replication order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RiskReport> {
    cfg.validate()?;
    let bed = Bed {
        f: cfg.f_model.build()?,
        phi: cfg.phi_model.build()?,
        omega: cfg.omega()?,
        n: cfg.n,
        m: cfg.resolved_m(),
    };
    let outcomes: Vec<Result<Replication>> = (0..cfg.replications)
        .into_par_iter()
        .map(|i| {
            let seed = replication_seed(cfg.seed, i);
            replicate(cfg, &bed, seed).map_err(|e| Error::Replication {
                replication: i,
                seed,
                source: Box::new(e),
            })
        })
        .collect();
    let reps = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(aggregate(cfg, &bed, reps))
}

fn aggregate(cfg: &ExperimentConfig, bed: &Bed, reps: Vec<Replication>) -> RiskReport {
    let count = reps.len() as f64;
    let risks: Vec<f64> = reps.iter().map(|r| r.risk).collect();
    let k_hats: Vec<usize> = reps.iter().map(|r| r.k_hat).collect();
    let mean_risk = risks.iter().sum::<f64>() / count;
    let std_error = if reps.len() > 1 {
        let var = risks.iter().map(|r| (r - mean_risk).powi(2)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    let mut k_hat_histogram = BTreeMap::new();
    for k in &k_hats {
        *k_hat_histogram.entry(*k).or_insert(0) += 1;
    }
    let fixed_k_mean_risks = cfg.fixed_k_grid.map(|grid| {
        (0..grid)
            .map(|i| reps.iter().map(|r| r.fixed_risks[i]).sum::<f64>() / count)
            .collect()
    });
    RiskReport {
        config: cfg.clone(),
        n: bed.n,
        m: bed.m,
        risks,
        k_hats,
        mean_risk,
        std_error,
        k_hat_histogram,
        fixed_k_mean_risks,
        derivative_scale: std::f64::consts::TAU.powi(2 * cfg.s as i32),
    }
}
