//! Simulation harness: test-bed densities, Monte Carlo risk and rate fits.

pub mod experiment;
pub mod models;
pub mod regression;
pub mod sweep;

pub use experiment::{run_experiment, ExperimentConfig, ModeConfig, RiskReport, SampleSize};
pub use models::{DensityModel, ModelSpec};
pub use regression::{rate_regression, RateFit, RateScale};
pub use sweep::{run_sweep, ExperimentTemplate, RatesSummary, SweepConfig, SweepOutcome};
