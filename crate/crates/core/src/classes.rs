//! Density classes and the theory oracle for minimax rates.
//!
//! `F_γ^r` collects densities with `Σ γ_j |[p]_j|² <= r`, `E_λ^d` collects
//! error densities whose squared coefficients stay within a factor `d` of
//! `λ_j`. The oracle evaluates the two rate terms: `ψ_n` (Y-sample) and
//! `κ_m` (ε-sample).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralVector;
use crate::weights::WeightSequence;

/// Smoothness class of the target, error class of the noise, and the risk norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub gamma: WeightSequence,
    pub lambda: WeightSequence,
    pub omega: WeightSequence,
    pub r: f64,
    pub d: f64,
}

impl ClassSpec {
    pub fn new(gamma: WeightSequence, lambda: WeightSequence, omega: WeightSequence, r: f64, d: f64) -> Result<Self> {
        if !(r >= 1.0) {
            return Err(Error::InvalidParameter(format!("radius r must be >= 1, got {r}")));
        }
        if !(d >= 1.0) {
            return Err(Error::InvalidParameter(format!("corridor d must be >= 1, got {d}")));
        }
        Ok(Self {
            gamma,
            lambda,
            omega,
            r,
            d,
        })
    }

    /// Checks the monotonicity conditions on `1..=len`: `ω/γ` and `λ`
    /// non-increasing.
    pub fn check_regularity(&self, len: usize) -> bool {
        self.omega.ratio_non_increasing(&self.gamma, len) && self.lambda.is_non_increasing(len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassKind {
    /// Smoothness ellipsoid `F_γ^r`.
    Smoothness,
    /// Error-density corridor `E_λ^d`.
    ErrorCorridor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum MembershipReport {
    Smoothness {
        norm: f64,
        radius: f64,
        member: bool,
    },
    ErrorCorridor {
        min_ratio: f64,
        max_ratio: f64,
        lower_ok: bool,
        upper_ok: bool,
        member: bool,
    },
}

impl MembershipReport {
    pub fn is_member(&self) -> bool {
        match self {
            Self::Smoothness { member, .. } | Self::ErrorCorridor { member, .. } => *member,
        }
    }
}

/// Membership of a spectrum in `F_γ^r` or `E_λ^d`, restricted to the stored
/// coefficients.
pub fn check_class_membership(spec: &SpectralVector, cls: &ClassSpec, which: ClassKind) -> MembershipReport {
    match which {
        ClassKind::Smoothness => {
            let norm: f64 = spec.iter().map(|(j, c)| cls.gamma.eval(j) * c.norm_sqr()).sum();
            MembershipReport::Smoothness {
                norm,
                radius: cls.r,
                member: norm <= cls.r,
            }
        }
        ClassKind::ErrorCorridor => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (j, c) in spec.iter().filter(|(j, _)| *j != 0) {
                let ratio = c.norm_sqr() / cls.lambda.eval(j);
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            if spec.max_index() == 0 {
                lo = 1.0;
                hi = 1.0;
            }
            let lower_ok = lo >= 1.0 / cls.d;
            let upper_ok = hi <= cls.d;
            MembershipReport::ErrorCorridor {
                min_ratio: lo,
                max_ratio: hi,
                lower_ok,
                upper_ok,
                member: lower_ok && upper_ok,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateOracleResult {
    pub n: usize,
    pub m: usize,
    pub psi_n: f64,
    pub k_star: usize,
    pub kappa_m: f64,
    pub kappa_argmax: usize,
    pub search_bound: usize,
    /// `min(bias, variance) / ψ_n` at `k*`; the lower bound needs its
    /// infimum over `n` to stay away from zero.
    pub balance_ratio: f64,
}

/// Default search range for the `ψ_n` minimization.
pub fn default_k_max(n: usize) -> usize {
    n.clamp(1, 1_000_000)
}

/// Extra indices scanned for `κ_m` past the point where `m λ_j < 1`.
const KAPPA_MARGIN: usize = 16;
const KAPPA_SCAN_LIMIT: usize = 50_000_000;

/// `ψ_n`, `k*` by exact minimization over `1..=k_max`, and `κ_m` by
/// maximization over the range where `min(1, 1/(m λ_j))` can still matter.
pub fn rate_oracle(cls: &ClassSpec, n: usize, m: usize, k_max: usize) -> Result<RateOracleResult> {
    if n < 1 || m < 1 {
        return Err(Error::InvalidParameter("n and m must be at least 1".into()));
    }
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let nf = n as f64;
    let mut variance = 0.0;
    let mut best = (f64::INFINITY, 0usize, 0.0, 0.0);
    let mut bracketed = false;
    for k in 1..=k_max {
        let j = k as i64;
        // both signs of j contribute equally
        variance += 2.0 * cls.omega.eval(j) / (nf * cls.lambda.eval(j));
        let bias = cls.omega.eval(j) / cls.gamma.eval(j);
        let value = bias.max(variance);
        if value < best.0 {
            best = (value, k, bias, variance);
        }
        if variance >= bias {
            bracketed = true;
            break;
        }
    }
    if !bracketed {
        return Err(Error::KMaxTooSmall { k_max });
    }
    let (psi_n, k_star, bias, var) = best;

    let (kappa_m, kappa_argmax, search_bound) = kappa(cls, m)?;
    Ok(RateOracleResult {
        n,
        m,
        psi_n,
        k_star,
        kappa_m,
        kappa_argmax,
        search_bound,
        balance_ratio: bias.min(var) / psi_n,
    })
}

fn kappa(cls: &ClassSpec, m: usize) -> Result<(f64, usize, usize)> {
    let mf = m as f64;
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut crossing = None;
    let mut j = 1usize;
    loop {
        let lambda = cls.lambda.eval(j as i64);
        let ratio = cls.omega.eval(j as i64) / cls.gamma.eval(j as i64);
        let value = ratio * (1.0f64).min(1.0 / (mf * lambda));
        if value > best.0 {
            best = (value, j);
        }
        if crossing.is_none() && mf * lambda < 1.0 {
            crossing = Some(j);
        }
        if let Some(c) = crossing {
            if j >= c + KAPPA_MARGIN {
                break;
            }
        }
        if j >= KAPPA_SCAN_LIMIT {
            return Err(Error::InvalidParameter(format!(
                "m λ_j stays >= 1 up to j = {KAPPA_SCAN_LIMIT}; λ does not decay"
            )));
        }
        j += 1;
    }
    Ok((best.0, best.1, j))
}

/// Exhaustive scan kept independent of [`rate_oracle`]'s early exit; used
/// for cross-checking.
pub fn naive_psi(cls: &ClassSpec, n: usize, k_max: usize) -> (f64, usize) {
    let objective = |k: usize| {
        let bias = cls.omega.eval(k as i64) / cls.gamma.eval(k as i64);
        // pairs ±j so the partial sums round exactly like the running sum
        let term = |j: i64| cls.omega.eval(j) / (n as f64 * cls.lambda.eval(j));
        let var: f64 = (1..=k as i64).map(|j| term(j) + term(-j)).sum();
        bias.max(var)
    };
    let mut best = (f64::INFINITY, 0);
    for k in 1..=k_max {
        let v = objective(k);
        if v < best.0 {
            best = (v, k);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothnessCase {
    /// Polynomially decaying error coefficients.
    Os,
    /// Exponentially decaying error coefficients.
    Ss,
}

/// Closed-form rate (no constants) for Sobolev targets of regularity `p`,
/// derivative order `s` and error decay parameter `a`.
pub fn rate_prediction(case: SmoothnessCase, p: f64, a: f64, s: u32, n: usize, m: usize) -> Result<f64> {
    let s = s as f64;
    if !(p > s) {
        return Err(Error::InvalidParameter(format!("need p > s, got p = {p}, s = {s}")));
    }
    let (nf, mf) = (n as f64, m as f64);
    match case {
        SmoothnessCase::Os => {
            if !(a > 0.5) {
                return Err(Error::InvalidParameter(format!("os requires a > 1/2, got {a}")));
            }
            if n < 1 || m < 1 {
                return Err(Error::InvalidParameter("n and m must be at least 1".into()));
            }
            Ok(nf.powf(-os_exponent(p, a, s)) + mf.powf(-(p - s).min(a) / a))
        }
        SmoothnessCase::Ss => {
            if !(a > 0.0) {
                return Err(Error::InvalidParameter(format!("ss requires a > 0, got {a}")));
            }
            if n < 2 || m < 2 {
                return Err(Error::InvalidParameter("n and m must be at least 2 in the ss case".into()));
            }
            let e = -(p - s) / a;
            Ok(nf.ln().powf(e) + mf.ln().powf(e))
        }
    }
}

/// `2(p-s)/(2p+2a+1)`, the polynomial rate exponent of the os case.
pub fn os_exponent(p: f64, a: f64, s: f64) -> f64 {
    2.0 * (p - s) / (2.0 * p + 2.0 * a + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticBounds {
    /// Largest `j <= N_n` with `λ_j / (j (ω_j ∨ 1)) >= 4 d log n / n`.
    pub n_lower: Option<usize>,
    /// Largest `j <= M_m` with `λ_j >= 4 d (log m)² / m`.
    pub m_lower: Option<usize>,
    /// `log(3d) / log 3`.
    pub zeta_d: f64,
}

/// Lower companions of `N_n` and `M_m` and `ζ_d`. Reporting only.
pub fn diagnostic_bounds(cls: &ClassSpec, n: usize, m: usize, n_bound: usize, m_bound: usize) -> DiagnosticBounds {
    let d = cls.d;
    let n_thresh = 4.0 * d * (n as f64).ln() / n as f64;
    let m_thresh = 4.0 * d * (m as f64).ln().powi(2) / m as f64;
    let n_lower = (1..=n_bound)
        .filter(|&j| {
            let j = j as i64;
            cls.lambda.eval(j) / (j as f64 * cls.omega.eval(j).max(1.0)) >= n_thresh
        })
        .max();
    let m_lower = (1..=m_bound).filter(|&j| cls.lambda.eval(j as i64) >= m_thresh).max();
    DiagnosticBounds {
        n_lower,
        m_lower,
        zeta_d: (3.0 * d).ln() / 3f64.ln(),
    }
}
