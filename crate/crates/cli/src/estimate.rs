use std::path::Path;

use anyhow::Context;
use log::{info, warn};
use serde::Serialize;
use serde_json::json;

use circdeconv::estimator::derivative_transform;
use circdeconv::formats::{estimate_from_json, estimate_to_json, format_grid_csv, format_selection_trace, parse_sample};
use circdeconv::selection::{
    empirical_tables_from_sample, known_tables, select_empirical, select_known, SelectOptions, SelectionResult,
    SelectionTables,
};
use circdeconv::spectral::{synthesize, weighted_norm_sq};
use circdeconv::{deconvolve, empirical_spectrum, CircularSample};

use crate::args::{EstimateArgs, ModeArg};
use crate::failure::Failure;
use crate::output::{read_input, Manifest, OutDir};

/// Starting range for the lazily extended error spectrum.
const INITIAL_RANGE: usize = 16;

fn check_contract(a: &EstimateArgs) -> Result<(), Failure> {
    match a.mode {
        ModeArg::Known => {
            if a.lambda.is_none() || a.d.is_none() {
                return Err(Failure::usage("known mode requires --lambda and --d"));
            }
        }
        ModeArg::Empirical | ModeArg::Fixed(_) => {
            let mode = a.mode.name();
            if a.lambda.is_some() {
                return Err(Failure::usage(format!("lambda not allowed in {mode} mode")));
            }
            if a.d.is_some() {
                return Err(Failure::usage(format!("d not allowed in {mode} mode")));
            }
            if matches!(a.mode, ModeArg::Fixed(_)) && a.penalty_const.is_some() {
                return Err(Failure::usage("penalty-const not allowed in fixed mode"));
            }
        }
    }
    if let Some(d) = a.d {
        if d < 1.0 {
            return Err(Failure::usage(format!("d must be >= 1, got {d}")));
        }
    }
    Ok(())
}

fn load_sample(path: &Path, manifest: &mut Manifest) -> Result<CircularSample, Failure> {
    let text = read_input(path, manifest)?;
    parse_sample(&text).map_err(|e| {
        let f = Failure::from_core(e);
        Failure::new(f.code, f.error.context(format!("reading {}", path.display())))
    })
}

#[derive(Debug, Serialize)]
struct SelectionSummary<'a> {
    mode: &'static str,
    k_hat: usize,
    cap: usize,
    penalty_const: f64,
    n_bound: usize,
    m_bound: usize,
    n_upper: Option<usize>,
    assumption_ok: Option<bool>,
    delta: &'a [f64],
}

fn selection_summary<'a>(sel: &SelectionResult, tables: &'a SelectionTables, mode: &'static str) -> SelectionSummary<'a> {
    SelectionSummary {
        mode,
        k_hat: sel.k_hat,
        cap: sel.search_cap,
        penalty_const: sel.penalty_const,
        n_bound: tables.n_bound,
        m_bound: tables.m_bound,
        n_upper: tables.n_upper,
        assumption_ok: tables.assumption_ok,
        delta: &tables.delta,
    }
}

pub fn run(a: &EstimateArgs, argv: &[String]) -> Result<(), Failure> {
    check_contract(a)?;
    let mut manifest = Manifest::new("estimate", argv);
    let y = load_sample(&a.y, &mut manifest)?;
    let eps = load_sample(&a.eps, &mut manifest)?;
    let (n, m) = (y.len(), eps.len());
    let omega = &a.omega;

    manifest.resolved = json!({
        "n": n,
        "m": m,
        "omega": omega,
        "mode": a.mode.name(),
        "fixed_k": match a.mode { ModeArg::Fixed(k) => Some(k), _ => None },
        "lambda": a.lambda,
        "d": a.d,
        "s": a.s,
        "grid": a.grid,
        "strict": a.strict,
    });
    info!("resolved configuration: {}", manifest.resolved);

    let opts = SelectOptions {
        penalty_const: a.penalty_const,
        strict: a.strict,
    };
    let (g_hat, phi_hat, selection) = match a.mode {
        ModeArg::Fixed(k) => (empirical_spectrum(&y, k), empirical_spectrum(&eps, k), None),
        ModeArg::Known => {
            let (lambda, d) = (a.lambda.as_ref().unwrap(), a.d.unwrap());
            let tables = known_tables(omega, lambda, d, n, m, a.strict)?;
            if tables.assumption_ok == Some(false) {
                warn!("sample-size condition on M_m fails for m = {m}; rerun with --strict to abort");
            }
            let cap = tables.search_cap();
            let g_hat = empirical_spectrum(&y, cap);
            let phi_hat = empirical_spectrum(&eps, cap);
            let (sel, tables) = select_known(&g_hat, &phi_hat, m, n, omega, lambda, d, opts)?;
            (g_hat, phi_hat, Some((sel, tables)))
        }
        ModeArg::Empirical => {
            let (mut phi_hat, tables) = empirical_tables_from_sample(&eps, omega, n, INITIAL_RANGE)?;
            let cap = tables.search_cap();
            if phi_hat.max_index() < cap {
                phi_hat = empirical_spectrum(&eps, cap);
            }
            let g_hat = empirical_spectrum(&y, cap);
            let (sel, tables) = select_empirical(&g_hat, &phi_hat, n, m, omega, opts)?;
            (g_hat, phi_hat, Some((sel, tables)))
        }
    };
    let k = match (&selection, a.mode) {
        (Some((sel, _)), _) => sel.k_hat,
        (None, ModeArg::Fixed(k)) => k,
        (None, _) => unreachable!("adaptive modes always select"),
    };
    let est = deconvolve(&g_hat, &phi_hat, m, k)?;

    let out = OutDir::create(&a.out)?;
    let est_json = estimate_to_json(&est)?;
    out.write("estimate.json", &est_json)?;
    let grid = synthesize(est.spectrum(), a.grid)?;
    out.write("grid.csv", &format_grid_csv(&grid))?;
    if let Some(s) = a.s {
        let deriv = synthesize(&derivative_transform(est.spectrum(), s), a.grid)?;
        out.write("derivative.csv", &format_grid_csv(&deriv))?;
    }
    if let Some((sel, tables)) = &selection {
        out.write("selection.csv", &format_selection_trace(sel))?;
        out.write_json("selection.json", &selection_summary(sel, tables, a.mode.name()))?;
        manifest.penalty_const = Some(sel.penalty_const);
    }

    let norm = weighted_norm_sq(est.spectrum(), omega);
    let verified = if a.verify {
        let text = std::fs::read_to_string(out.path("estimate.json"))?;
        let back = estimate_from_json(&text).context("re-reading estimate.json").map_err(|e| Failure::new(crate::failure::DATA, e))?;
        let again = weighted_norm_sq(back.spectrum(), omega);
        if back != est || again.to_bits() != norm.to_bits() {
            return Err(Failure::data(format!(
                "round-trip verification failed: norm {norm:e} became {again:e}"
            )));
        }
        info!("round trip verified");
        Some(true)
    } else {
        None
    };

    let min_grid = grid.iter().copied().fold(f64::INFINITY, f64::min);
    if min_grid < 0.0 {
        info!("estimate is negative somewhere on the grid (min {min_grid:.4e})");
    }
    out.write_json(
        "summary.json",
        &json!({
            "n": n,
            "m": m,
            "mode": a.mode.name(),
            "k": k,
            "threshold_hits": est.threshold_hits(),
            "weighted_norm_sq": norm,
            "min_grid_value": min_grid,
            "verified": verified,
        }),
    )?;
    out.write_json("manifest.json", &manifest)?;
    info!("k = {k}, wrote {}", a.out.display());
    Ok(())
}

