//! Penalized choice of the cut-off dimension.
//!
//! Two rules share one criterion shape, `-‖f̂_k‖²_ω + C · δ_k / n`:
//!
//! * known ill-posedness: `(λ, d)` are given and `δ_k`, `N_n`, `M_m` are
//!   computed from them, default `C = 60 d`;
//! * fully data-driven: `λ` is replaced by `|φ̂_j|²`, giving `δ̂_k`, `N̂_n`,
//!   `M̂_m`, default `C = 600`.
//!
//! `δ_k` carries the factor `2k` and `δ̂_k` the factor `k`; both are kept as
//! they are defined.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{contrast_profile, passes_threshold};
use crate::spectral::{empirical_spectrum, CircularSample, SpectralVector};
use crate::weights::WeightSequence;

/// Default penalty constant of the known-ill-posedness rule (multiplied by `d`).
pub const KNOWN_PENALTY: f64 = 60.0;
/// Default penalty constant of the data-driven rule.
pub const EMPIRICAL_PENALTY: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    Known,
    Empirical,
}

/// Per-dimension penalty quantities. Entry `i` of each vector is `k = i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionTables {
    pub mode: SelectionMode,
    /// `Δ_k` (or `Δ̂_k`).
    pub delta_max: Vec<f64>,
    /// `τ_k` (or `τ̂_k`).
    pub tau: Vec<f64>,
    /// `δ_k` (or `δ̂_k`).
    pub delta: Vec<f64>,
    /// `N_n` (or `N̂_n`).
    pub n_bound: usize,
    /// `M_m` (or `M̂_m`).
    pub m_bound: usize,
    /// `N_n^u`, empirical mode only.
    pub n_upper: Option<usize>,
    /// Whether the sample-size condition on `M_m` holds (known mode only).
    pub assumption_ok: Option<bool>,
}

impl SelectionTables {
    /// `N ∧ M`.
    pub fn search_cap(&self) -> usize {
        self.n_bound.min(self.m_bound)
    }

    /// `δ_k` for `k >= 1`.
    pub fn delta_at(&self, k: usize) -> f64 {
        self.delta[k - 1]
    }
}

fn log_factor(tau: f64, k: usize) -> f64 {
    let kp2 = (k + 2) as f64;
    tau.max(kp2).ln() / kp2.ln()
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n < 1 || m < 1 {
        return Err(Error::InvalidParameter("n and m must be at least 1".into()));
    }
    Ok(())
}

/// Running maxima for `Δ_k`, `τ_k` and the resulting `δ_k`.
struct KnownAccumulator<'a> {
    omega: &'a WeightSequence,
    lambda: &'a WeightSequence,
    running_delta: f64,
    running_tau: f64,
    delta_max: Vec<f64>,
    tau: Vec<f64>,
    delta: Vec<f64>,
}

impl<'a> KnownAccumulator<'a> {
    fn new(omega: &'a WeightSequence, lambda: &'a WeightSequence) -> Self {
        Self {
            omega,
            lambda,
            running_delta: omega.eval(0) / lambda.eval(0),
            running_tau: omega.eval(0).max(1.0) / lambda.eval(0),
            delta_max: Vec::new(),
            tau: Vec::new(),
            delta: Vec::new(),
        }
    }

    /// Appends the row for the next `k` and returns `δ_k`.
    fn push(&mut self) -> f64 {
        let k = self.delta.len() + 1;
        let j = k as i64;
        let (w, l) = (self.omega.eval(j), self.lambda.eval(j));
        self.running_delta = self.running_delta.max(w / l);
        self.running_tau = self.running_tau.max(w.max(1.0) / l);
        let delta = 2.0 * k as f64 * self.running_delta * log_factor(self.running_tau, k);
        self.delta_max.push(self.running_delta);
        self.tau.push(self.running_tau);
        self.delta.push(delta);
        delta
    }
}

/// Tables of the known-ill-posedness rule.
///
/// `N_n = max{N <= n : δ_N / n <= δ_1}`; `M_m` is the largest `M <= m` with
/// `m⁷ exp(-m λ_M / (72 d)) <= (504 d / λ_1)⁷`, evaluated in log space. When
/// `strict` is set, a violated sample-size condition
/// `min_{1<=j<=M_m} λ_j / d >= 2/m` is an error instead of a warning.
pub fn known_tables(
    omega: &WeightSequence,
    lambda: &WeightSequence,
    d: f64,
    n: usize,
    m: usize,
    strict: bool,
) -> Result<SelectionTables> {
    check_sizes(n, m)?;
    if !(d >= 1.0) {
        return Err(Error::InvalidParameter(format!("d must be >= 1, got {d}")));
    }
    let lambda_1 = lambda.eval(1);
    if !(lambda_1 > 0.0) || !(lambda.eval(0) > 0.0) {
        return Err(Error::InvalidParameter("λ must be strictly positive".into()));
    }

    // δ_k is non-decreasing, so the scan for N_n stops at the first violation
    let nf = n as f64;
    let mut acc = KnownAccumulator::new(omega, lambda);
    let delta_1 = acc.push();
    let mut n_bound = 1;
    for k in 2..=n {
        if acc.push() / nf <= delta_1 {
            n_bound = k;
        } else {
            break;
        }
    }

    let mf = m as f64;
    let rhs = 7.0 * (504.0 * d / lambda_1).ln();
    let mut m_bound = None;
    for big_m in 1..=m {
        let lhs = 7.0 * mf.ln() - mf * lambda.eval(big_m as i64) / (72.0 * d);
        if lhs <= rhs {
            m_bound = Some(big_m);
        }
    }
    let m_bound = m_bound.unwrap_or_else(|| {
        warn!("no M <= {m} satisfies the M_m inequality; using M_m = 1");
        1
    });

    let min_lambda = (1..=m_bound as i64).map(|j| lambda.eval(j)).fold(f64::INFINITY, f64::min);
    let assumption_ok = min_lambda / d >= 2.0 / mf;
    if !assumption_ok {
        let msg = format!("min λ_j / d over 1..={m_bound} is {:.3e} < 2/m = {:.3e}", min_lambda / d, 2.0 / mf);
        if strict {
            return Err(Error::AssumptionViolated(msg));
        }
        warn!("{msg}");
    }

    let cap = n_bound.min(m_bound);
    while acc.delta.len() < cap + 1 {
        acc.push();
    }
    acc.delta_max.truncate(cap + 1);
    acc.tau.truncate(cap + 1);
    acc.delta.truncate(cap + 1);
    let KnownAccumulator {
        delta_max, tau, delta, ..
    } = acc;
    Ok(SelectionTables {
        mode: SelectionMode::Known,
        delta_max,
        tau,
        delta,
        n_bound,
        m_bound,
        n_upper: None,
        assumption_ok: Some(assumption_ok),
    })
}

/// `N_n^u`: largest `N <= n` with `max_{0<j<=N} ω_j <= n`.
pub fn upper_dimension(omega: &WeightSequence, n: usize) -> usize {
    let nf = n as f64;
    let mut running = 0.0f64;
    let mut best = 0;
    for j in 1..=n {
        running = running.max(omega.eval(j as i64));
        if running / nf <= 1.0 {
            best = j;
        } else {
            break;
        }
    }
    best.max(1)
}

/// `N̂_n` and `M̂_m` as first crossings: the smallest index at which the
/// empirical coefficient falls below its threshold, or the range end when it
/// never does. Fails with [`Error::SpectrumRange`] when `phi_hat` ends before
/// a crossing is decided.
fn empirical_bounds(phi_hat: &SpectralVector, omega: &WeightSequence, n: usize, m: usize) -> Result<(usize, usize, usize)> {
    let n_upper = upper_dimension(omega, n);
    let n_thresh = (n as f64).ln() / n as f64;
    let m_thresh = (m as f64).ln().powi(2) / m as f64;
    let first_crossing = |limit: usize, below: &dyn Fn(usize) -> bool| -> Result<usize> {
        for j in 1..=limit {
            if j > phi_hat.max_index() {
                return Err(Error::SpectrumRange {
                    needed: limit,
                    available: phi_hat.max_index(),
                });
            }
            if below(j) {
                return Ok(j);
            }
        }
        Ok(limit)
    };
    let n_hat = first_crossing(n_upper, &|j| {
        let w = omega.eval(j as i64).max(1.0);
        phi_hat.get(j as i64).norm_sqr() / (j as f64 * w) < n_thresh
    })?;
    let m_hat = first_crossing(m, &|j| phi_hat.get(j as i64).norm_sqr() < m_thresh)?;
    Ok((n_hat, m_hat, n_upper))
}

/// Tables of the data-driven rule, computed from `φ̂` and `ω` only.
pub fn empirical_tables(phi_hat: &SpectralVector, omega: &WeightSequence, n: usize, m: usize) -> Result<SelectionTables> {
    check_sizes(n, m)?;
    let (n_bound, m_bound, n_upper) = empirical_bounds(phi_hat, omega, n, m)?;
    let cap = n_bound.min(m_bound);
    if phi_hat.max_index() < cap {
        return Err(Error::SpectrumRange {
            needed: cap,
            available: phi_hat.max_index(),
        });
    }
    // the j = 0 term always passes (|φ̂_0| = 1), so the maxima start at ω_0
    let mut delta_max = omega.eval(0);
    let mut tau = omega.eval(0).max(1.0);
    // one extra row for diagnostics when the spectrum reaches it
    let last = (cap + 1).min(phi_hat.max_index());
    let mut dm = Vec::with_capacity(last);
    let mut ta = Vec::with_capacity(last);
    let mut de = Vec::with_capacity(last);
    for k in 1..=last.max(1) {
        for j in [-(k as i64), k as i64] {
            let phi = phi_hat.get(j);
            if passes_threshold(phi, m) {
                let w = omega.eval(j);
                delta_max = delta_max.max(w / phi.norm_sqr());
                tau = tau.max(w.max(1.0) / phi.norm_sqr());
            }
        }
        dm.push(delta_max);
        ta.push(tau);
        de.push(k as f64 * delta_max * log_factor(tau, k));
    }
    Ok(SelectionTables {
        mode: SelectionMode::Empirical,
        delta_max: dm,
        tau: ta,
        delta: de,
        n_bound,
        m_bound,
        n_upper: Some(n_upper),
        assumption_ok: None,
    })
}

/// Computes `φ̂` from the ε-sample far enough to settle `N̂_n` and `M̂_m`,
/// growing the range geometrically. Returns the spectrum and the tables.
pub fn empirical_tables_from_sample(
    eps: &CircularSample,
    omega: &WeightSequence,
    n: usize,
    initial_range: usize,
) -> Result<(SpectralVector, SelectionTables)> {
    let m = eps.len();
    let limit = upper_dimension(omega, n).max(m);
    let mut range = initial_range.clamp(1, limit);
    loop {
        let phi_hat = empirical_spectrum(eps, range + 1);
        match empirical_tables(&phi_hat, omega, n, m) {
            Ok(tables) => return Ok((phi_hat, tables)),
            Err(Error::SpectrumRange { .. }) if range < limit => {
                range = (range * 2).min(limit);
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub k_hat: usize,
    pub mode: SelectionMode,
    pub search_cap: usize,
    pub penalty_const: f64,
    /// `‖f̂_k‖²_ω` for `k = 1..=search_cap`.
    pub contrast: Vec<f64>,
    /// Penalty for `k = 1..=search_cap`.
    pub penalty: Vec<f64>,
    /// `-contrast + penalty` for `k = 1..=search_cap`.
    pub criterion: Vec<f64>,
}

impl SelectionResult {
    /// Rows `(k, contrast, penalty, criterion)`.
    pub fn trace(&self) -> impl Iterator<Item = (usize, f64, f64, f64)> + '_ {
        (0..self.criterion.len()).map(|i| (i + 1, self.contrast[i], self.penalty[i], self.criterion[i]))
    }
}

fn minimize(
    g_hat: &SpectralVector,
    phi_hat: &SpectralVector,
    m: usize,
    n: usize,
    omega: &WeightSequence,
    tables: &SelectionTables,
    penalty_const: f64,
) -> Result<SelectionResult> {
    let cap = tables.search_cap();
    if cap < 1 {
        return Err(Error::InvalidParameter("internal: empty search range".into()));
    }
    let profile = contrast_profile(g_hat, phi_hat, m, cap, omega)?;
    let contrast = profile[1..].to_vec();
    let penalty: Vec<f64> = (1..=cap).map(|k| penalty_const * tables.delta_at(k) / n as f64).collect();
    let criterion: Vec<f64> = contrast.iter().zip(&penalty).map(|(c, p)| -c + p).collect();
    let mut k_hat = 1;
    for (i, v) in criterion.iter().enumerate() {
        if *v < criterion[k_hat - 1] {
            k_hat = i + 1;
        }
    }
    Ok(SelectionResult {
        k_hat,
        mode: tables.mode,
        search_cap: cap,
        penalty_const,
        contrast,
        penalty,
        criterion,
    })
}

/// Options shared by both rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectOptions {
    /// Replaces 60 (known) or 600 (empirical).
    pub penalty_const: Option<f64>,
    pub strict: bool,
}

impl Default for SelectOptions {
    fn default() -> Self {
        Self {
            penalty_const: None,
            strict: false,
        }
    }
}

/// Minimizes `-‖f̂_k‖²_ω + C d δ_k / n` over `1 <= k <= N_n ∧ M_m`.
#[allow(clippy::too_many_arguments)]
pub fn select_known(
    g_hat: &SpectralVector,
    phi_hat: &SpectralVector,
    m: usize,
    n: usize,
    omega: &WeightSequence,
    lambda: &WeightSequence,
    d: f64,
    opts: SelectOptions,
) -> Result<(SelectionResult, SelectionTables)> {
    let tables = known_tables(omega, lambda, d, n, m, opts.strict)?;
    let c = opts.penalty_const.unwrap_or(KNOWN_PENALTY);
    let result = minimize(g_hat, phi_hat, m, n, omega, &tables, c * d)?;
    Ok((result, tables))
}

/// Minimizes `-‖f̂_k‖²_ω + C δ̂_k / n` over `1 <= k <= N̂_n ∧ M̂_m`.
pub fn select_empirical(
    g_hat: &SpectralVector,
    phi_hat: &SpectralVector,
    n: usize,
    m: usize,
    omega: &WeightSequence,
    opts: SelectOptions,
) -> Result<(SelectionResult, SelectionTables)> {
    let tables = empirical_tables(phi_hat, omega, n, m)?;
    let c = opts.penalty_const.unwrap_or(EMPIRICAL_PENALTY);
    let result = minimize(g_hat, phi_hat, m, n, omega, &tables, c)?;
    Ok((result, tables))
}
