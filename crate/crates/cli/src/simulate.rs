use std::fmt::Write as _;
use std::path::Path;

use log::info;

use circdeconv::sim::{run_experiment, run_sweep, ExperimentConfig, ModeConfig, RiskReport, SweepConfig};
use circdeconv::selection::{EMPIRICAL_PENALTY, KNOWN_PENALTY};

use crate::args::{RatesArgs, SimulateArgs};
use crate::failure::Failure;
use crate::output::{parse_config, read_input, seed_override, Manifest, OutDir};

/// `replication,k_hat,risk` rows.
pub fn risks_csv(report: &RiskReport) -> String {
    let mut out = String::from("replication,k_hat,risk\n");
    for (i, (k, r)) in report.k_hats.iter().zip(&report.risks).enumerate() {
        writeln!(out, "{i},{k},{r:.16e}").unwrap();
    }
    out
}

/// Effective penalty constant as it enters the criterion.
fn effective_penalty(mode: &ModeConfig) -> Option<f64> {
    match mode {
        ModeConfig::OracleK { .. } => None,
        ModeConfig::Known { d, penalty_const, .. } => Some(penalty_const.unwrap_or(KNOWN_PENALTY) * d),
        ModeConfig::Empirical { penalty_const } => Some(penalty_const.unwrap_or(EMPIRICAL_PENALTY)),
    }
}

fn apply_seed(seed: &mut u64, manifest: &mut Manifest) -> Result<(), Failure> {
    manifest.seed_source = Some("config");
    if let Some(s) = seed_override()? {
        info!("CIRCDECONV_SEED overrides config seed {} with {s}", seed);
        *seed = s;
        manifest.seed_source = Some("CIRCDECONV_SEED");
    }
    manifest.seed = Some(*seed);
    Ok(())
}

fn load<T: serde::de::DeserializeOwned>(path: &Path, manifest: &mut Manifest) -> Result<T, Failure> {
    let text = read_input(path, manifest)?;
    parse_config(path, &text)
}

pub fn run_simulate(a: &SimulateArgs, argv: &[String], jobs: Option<usize>) -> Result<(), Failure> {
    let mut manifest = Manifest::new("simulate", argv);
    manifest.jobs = jobs;
    let mut cfg: ExperimentConfig = load(&a.config, &mut manifest)?;
    apply_seed(&mut cfg.seed, &mut manifest)?;
    cfg.validate().map_err(Failure::from_config)?;
    manifest.penalty_const = effective_penalty(&cfg.mode);
    manifest.resolved = serde_json::to_value(&cfg).map_err(Failure::data)?;
    info!("resolved configuration: {}", manifest.resolved);

    let out = OutDir::create(&a.out)?;
    let report = run_experiment(&cfg).map_err(Failure::from_config)?;
    out.write_json("report.json", &report)?;
    out.write("risks.csv", &risks_csv(&report))?;
    out.write_json("manifest.json", &manifest)?;
    info!(
        "n = {}, m = {}: mean risk {:.4e} ± {:.1e}",
        report.n, report.m, report.mean_risk, report.std_error
    );
    Ok(())
}

pub fn run_rates(a: &RatesArgs, argv: &[String], jobs: Option<usize>) -> Result<(), Failure> {
    let mut manifest = Manifest::new("rates", argv);
    manifest.jobs = jobs;
    let mut cfg: SweepConfig = load(&a.sweep, &mut manifest)?;
    if let Some(t) = cfg.experiment.as_mut() {
        apply_seed(&mut t.seed, &mut manifest)?;
        manifest.penalty_const = effective_penalty(&t.mode);
    }
    cfg.validate().map_err(Failure::from_config)?;
    manifest.resolved = serde_json::to_value(&cfg).map_err(Failure::data)?;
    info!("resolved configuration: {}", manifest.resolved);

    let out = OutDir::create(&a.out)?;
    let outcome = run_sweep(&cfg).map_err(Failure::from_config)?;
    for r in &outcome.reports {
        out.write_json(&format!("report_n{}.json", r.n), r)?;
        out.write(&format!("risks_n{}.csv", r.n), &risks_csv(r))?;
    }
    out.write_json("rates.json", &outcome.summary)?;
    out.write_json("manifest.json", &manifest)?;
    let s = &outcome.summary;
    info!(
        "slope {:.4} vs expected {:.4} (tolerance {}): {}",
        s.slope,
        s.expected_exponent,
        s.tolerance,
        if s.pass { "pass" } else { "fail" }
    );
    Ok(())
}
