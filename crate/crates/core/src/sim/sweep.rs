//! Rate sweeps: one experiment per sample size, then a slope fit against an
//! expected rate.

use serde::{Deserialize, Serialize};

use crate::classes::{os_exponent, SmoothnessCase};
use crate::error::{Error, Result};
use crate::weights::WeightSequence;

use super::experiment::{run_experiment, ExperimentConfig, ModeConfig, RiskReport, SampleSize};
use super::models::ModelSpec;
use super::regression::{rate_regression, RateFit, RateScale};

/// Default slope tolerance.
pub const DEFAULT_TOLERANCE: f64 = 0.15;

/// Everything in an [`ExperimentConfig`] except `n` and `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentTemplate {
    pub f_model: ModelSpec,
    pub phi_model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<WeightSequence>,
    #[serde(default)]
    pub s: u32,
    pub mode: ModeConfig,
    pub replications: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_k_grid: Option<usize>,
}

impl ExperimentTemplate {
    pub fn at(&self, n: usize, m: SampleSize) -> ExperimentConfig {
        ExperimentConfig {
            f_model: self.f_model.clone(),
            phi_model: self.phi_model.clone(),
            n,
            m,
            omega: self.omega.clone(),
            s: self.s,
            mode: self.mode.clone(),
            replications: self.replications,
            seed: self.seed,
            fixed_k_grid: self.fixed_k_grid,
        }
    }
}

/// Deterministic stand-in for Monte Carlo risks, `constant · n^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticRisk {
    pub constant: f64,
    pub exponent: f64,
}

/// Theoretical rate used to derive the expected slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSpec {
    pub case: SmoothnessCase,
    pub p: f64,
    pub a: f64,
    #[serde(default)]
    pub s: u32,
}

impl RateSpec {
    /// Expected slope on `scale`: `-2(p-s)/(2p+2a+1)` against `ln n` for os,
    /// `-(p-s)/a` against `ln ln n` for ss.
    pub fn expected_slope(&self, scale: RateScale) -> Result<f64> {
        let s = self.s as f64;
        match (self.case, scale) {
            (SmoothnessCase::Os, RateScale::LogLog) => Ok(-os_exponent(self.p, self.a, s)),
            (SmoothnessCase::Ss, RateScale::LogLogLog) => Ok(-(self.p - s) / self.a),
            (case, scale) => Err(Error::InvalidParameter(format!(
                "no closed-form slope for {case:?} rates on the {scale:?} scale"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_grid: Vec<usize>,
    pub m: SampleSize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentTemplate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticRisk>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<RateSpec>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub scale: RateScale,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl SweepConfig {
    pub fn expected(&self) -> Result<f64> {
        match (self.expected_slope, &self.rate) {
            (Some(e), None) => Ok(e),
            (None, Some(r)) => r.expected_slope(self.scale),
            _ => Err(Error::InvalidParameter(
                "give exactly one of `expected_slope` and `rate`".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::DegenerateGrid("n_grid is empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateGrid("n_grid must be strictly increasing".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be >= 0, got {}", self.tolerance)));
        }
        match (&self.experiment, &self.synthetic) {
            (Some(t), None) => {
                for &n in &self.n_grid {
                    t.at(n, self.m).validate()?;
                }
            }
            (None, Some(s)) => {
                if !(s.constant.is_finite() && s.constant > 0.0 && s.exponent.is_finite()) {
                    return Err(Error::InvalidParameter("synthetic risk needs constant > 0".into()));
                }
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "give exactly one of `experiment` and `synthetic`".into(),
                ))
            }
        }
        self.expected()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub m: usize,
    pub mean_risk: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesSummary {
    pub slope: f64,
    /// Expected slope of `ln risk` on the chosen scale.
    pub expected_exponent: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub scale: RateScale,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub summary: RatesSummary,
    /// One report per grid point; empty for synthetic sweeps.
    pub reports: Vec<RiskReport>,
}

/// Runs every grid point in order and fits the slope.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let expected = cfg.expected()?;
    let mut points = Vec::with_capacity(cfg.n_grid.len());
    let mut reports = Vec::new();
    for &n in &cfg.n_grid {
        let m = cfg.m.resolve(n);
        match (&cfg.experiment, &cfg.synthetic) {
            (Some(t), _) => {
                let r = run_experiment(&t.at(n, cfg.m))?;
                points.push(SweepPoint {
                    n,
                    m,
                    mean_risk: r.mean_risk,
                    std_error: r.std_error,
                });
                reports.push(r);
            }
            (None, Some(s)) => points.push(SweepPoint {
                n,
                m,
                mean_risk: s.constant * (n as f64).powf(s.exponent),
                std_error: 0.0,
            }),
            (None, None) => unreachable!("validated"),
        }
    }
    let pairs: Vec<(usize, f64)> = points.iter().map(|p| (p.n, p.mean_risk)).collect();
    let RateFit {
        slope,
        intercept,
        r_squared,
    } = rate_regression(&pairs, cfg.scale)?;
    Ok(SweepOutcome {
        summary: RatesSummary {
            slope,
            expected_exponent: expected,
            pass: (slope - expected).abs() <= cfg.tolerance,
            tolerance: cfg.tolerance,
            scale: cfg.scale,
            intercept,
            r_squared,
            points,
        },
        reports,
    })
}
