//! Thresholded spectral cut-off estimator.
//!
//! `f̂_k = 1 + Σ_{0<|j|<=k} [ĝ]_j / [φ̂]_j 1{|[φ̂]_j|² >= 1/m} e_j`, its weak
//! derivatives, the contrast `‖f̂_k‖²_ω` and exact risk against a known truth.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralVector;
use crate::weights::WeightSequence;

/// `|φ̂_j|² >= 1/m`; ties pass.
#[inline]
pub fn passes_threshold(phi: Complex64, m: usize) -> bool {
    phi.norm_sqr() >= 1.0 / m as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeconvEstimate {
    k: usize,
    m: usize,
    spectrum: SpectralVector,
    threshold_hits: Vec<i64>,
}

impl DeconvEstimate {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn spectrum(&self) -> &SpectralVector {
        &self.spectrum
    }

    /// Indices `j` (both signs, ascending) whose coefficient was zeroed by the
    /// threshold.
    pub fn threshold_hits(&self) -> &[i64] {
        &self.threshold_hits
    }

    /// Reassembles an estimate, e.g. after reading it back from disk.
    pub fn from_parts(k: usize, m: usize, spectrum: SpectralVector, threshold_hits: Vec<i64>) -> Result<Self> {
        if spectrum.max_index() != k {
            return Err(Error::InvalidParameter(format!(
                "estimate of dimension {k} must carry |j| <= {k}, got {}",
                spectrum.max_index()
            )));
        }
        if spectrum.get(0) != Complex64::new(1.0, 0.0) {
            return Err(Error::InvalidParameter("estimate must have c_0 = 1".into()));
        }
        Ok(Self {
            k,
            m,
            spectrum,
            threshold_hits,
        })
    }

    pub fn derivative(&self, s: u32) -> SpectralVector {
        derivative_transform(&self.spectrum, s)
    }
}

fn check_range(spec: &SpectralVector, k: usize) -> Result<()> {
    if spec.max_index() < k {
        return Err(Error::SpectrumRange {
            needed: k,
            available: spec.max_index(),
        });
    }
    Ok(())
}

fn check_inputs(g_hat: &SpectralVector, phi_hat: &SpectralVector, m: usize, k: usize) -> Result<()> {
    if m < 1 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    check_range(g_hat, k)?;
    check_range(phi_hat, k)
}

/// Builds `f̂_k` from the empirical spectra of the Y- and ε-samples.
///
/// Negative indices are filled by conjugation of the positive ones.
pub fn deconvolve(g_hat: &SpectralVector, phi_hat: &SpectralVector, m: usize, k: usize) -> Result<DeconvEstimate> {
    if k < 1 {
        return Err(Error::InvalidParameter("dimension k must be at least 1".into()));
    }
    check_inputs(g_hat, phi_hat, m, k)?;
    let mut half = Vec::with_capacity(k + 1);
    half.push(Complex64::new(1.0, 0.0));
    let mut hits = Vec::new();
    for j in 1..=k as i64 {
        let phi = phi_hat.get(j);
        if passes_threshold(phi, m) {
            half.push(g_hat.get(j) / phi);
        } else {
            half.push(Complex64::new(0.0, 0.0));
            hits.push(j);
        }
    }
    let mut threshold_hits: Vec<i64> = hits.iter().rev().map(|j| -j).collect();
    threshold_hits.extend(hits);
    Ok(DeconvEstimate {
        k,
        m,
        spectrum: SpectralVector::from_nonnegative(&half)?,
        threshold_hits,
    })
}

/// Coefficients of the `s`-th derivative: `d/dx e_j = -2iπj e_j`, so
/// coefficient `j` is multiplied by `(-2iπj)^s`.
pub fn derivative_transform(spec: &SpectralVector, s: u32) -> SpectralVector {
    if s == 0 {
        return spec.clone();
    }
    let i_pow = Complex64::new(0.0, -1.0).powu(s);
    let k = spec.max_index() as i64;
    let mut out = SpectralVector::zeros(spec.max_index());
    for j in -k..=k {
        let factor = i_pow * (std::f64::consts::TAU * j as f64).powi(s as i32);
        out.set(j, spec.get(j) * factor);
    }
    out
}

/// `‖f̂_k‖²_ω` computed from magnitudes only, without assembling the
/// estimate.
pub fn contrast_norm_sq(
    g_hat: &SpectralVector,
    phi_hat: &SpectralVector,
    m: usize,
    k: usize,
    omega: &WeightSequence,
) -> Result<f64> {
    Ok(contrast_profile(g_hat, phi_hat, m, k, omega)?[k])
}

/// `‖f̂_k‖²_ω` for every `k = 0..=k_max` (entry `k`), by running sums.
pub fn contrast_profile(
    g_hat: &SpectralVector,
    phi_hat: &SpectralVector,
    m: usize,
    k_max: usize,
    omega: &WeightSequence,
) -> Result<Vec<f64>> {
    check_inputs(g_hat, phi_hat, m, k_max)?;
    let mut out = Vec::with_capacity(k_max + 1);
    let mut acc = omega.eval(0);
    out.push(acc);
    for j in 1..=k_max as i64 {
        for jj in [-j, j] {
            let phi = phi_hat.get(jj);
            if passes_threshold(phi, m) {
                acc += omega.eval(jj) * g_hat.get(jj).norm_sqr() / phi.norm_sqr();
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Fourier coefficients of a density known in closed form.
pub trait TrueSpectrum {
    fn coefficient(&self, j: i64) -> Complex64;

    /// `Σ_{|j|>from} ω_j |c_j|²`, or `None` when it cannot be bounded.
    fn weighted_tail(&self, omega: &WeightSequence, from: usize) -> Option<f64>;
}

impl TrueSpectrum for SpectralVector {
    fn coefficient(&self, j: i64) -> Complex64 {
        self.get(j)
    }

    fn weighted_tail(&self, omega: &WeightSequence, from: usize) -> Option<f64> {
        Some(
            self.iter()
                .filter(|(j, _)| j.unsigned_abs() as usize > from)
                .map(|(j, c)| omega.eval(j) * c.norm_sqr())
                .sum(),
        )
    }
}

/// `‖f̂ - f‖²_ω` by Parseval: the sum over `|j| <= tail_bound` plus the
/// truth's analytic tail.
pub fn exact_risk(
    est: &DeconvEstimate,
    truth: &dyn TrueSpectrum,
    omega: &WeightSequence,
    tail_bound: usize,
) -> Result<f64> {
    spectrum_risk(est.spectrum(), truth, omega, tail_bound)
}

/// [`exact_risk`] for an arbitrary coefficient vector, e.g. a derivative.
pub fn spectrum_risk(
    spec: &SpectralVector,
    truth: &dyn TrueSpectrum,
    omega: &WeightSequence,
    tail_bound: usize,
) -> Result<f64> {
    if tail_bound < spec.max_index() {
        return Err(Error::InvalidParameter(format!(
            "tail_bound {tail_bound} below estimate range {}",
            spec.max_index()
        )));
    }
    let tail = truth.weighted_tail(omega, tail_bound).ok_or(Error::TailUnbounded)?;
    if !tail.is_finite() {
        return Err(Error::TailUnbounded);
    }
    let t = tail_bound as i64;
    let head: f64 = (-t..=t)
        .map(|j| omega.eval(j) * (spec.get(j) - truth.coefficient(j)).norm_sqr())
        .sum();
    Ok(head + tail)
}

/// Serializable view of an estimate: `{"k", "m", "coeffs": [{"j","re","im"}], "threshold_hits"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub k: usize,
    pub m: usize,
    pub coeffs: Vec<CoefficientRecord>,
    pub threshold_hits: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub j: i64,
    pub re: f64,
    pub im: f64,
}

impl From<&DeconvEstimate> for EstimateRecord {
    fn from(est: &DeconvEstimate) -> Self {
        Self {
            k: est.k,
            m: est.m,
            coeffs: est
                .spectrum
                .iter()
                .map(|(j, c)| CoefficientRecord { j, re: c.re, im: c.im })
                .collect(),
            threshold_hits: est.threshold_hits.clone(),
        }
    }
}

impl TryFrom<EstimateRecord> for DeconvEstimate {
    type Error = Error;

    fn try_from(rec: EstimateRecord) -> Result<Self> {
        let k = rec.k as i64;
        if rec.coeffs.len() != 2 * rec.k + 1 || rec.coeffs.iter().zip(-k..=k).any(|(c, j)| c.j != j) {
            return Err(Error::InvalidParameter("coefficients must list j = -k..=k in order".into()));
        }
        let spec = SpectralVector::new(rec.coeffs.iter().map(|c| Complex64::new(c.re, c.im)).collect())?;
        DeconvEstimate::from_parts(rec.k, rec.m, spec, rec.threshold_hits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{synthesize, weighted_norm_sq};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(half: &[(f64, f64)]) -> SpectralVector {
        SpectralVector::from_nonnegative(&half.iter().map(|&(a, b)| c(a, b)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn small_phi_gives_uniform() {
        let g = spec(&[(1.0, 0.0), (0.3, 0.1), (0.2, 0.0)]);
        let phi = spec(&[(1.0, 0.0), (0.05, 0.0), (0.01, 0.02)]);
        let est = deconvolve(&g, &phi, 100, 2).unwrap();
        assert_eq!(est.spectrum(), &SpectralVector::uniform(2));
        assert_eq!(est.threshold_hits(), &[-2, -1, 1, 2]);
    }

    #[test]
    fn threshold_examples() {
        let g = spec(&[(1.0, 0.0), (0.2, 0.0)]);
        let est = deconvolve(&g, &spec(&[(1.0, 0.0), (0.5, 0.0)]), 100, 1).unwrap();
        assert_abs_diff_eq!(est.spectrum().get(1).re, 0.4, epsilon = 1e-15);
        assert!(est.threshold_hits().is_empty());
        let est = deconvolve(&g, &spec(&[(1.0, 0.0), (0.05, 0.0)]), 100, 1).unwrap();
        assert_eq!(est.spectrum().get(1), c(0.0, 0.0));
    }

    #[test]
    fn tie_passes() {
        // |φ|² = 0.25 = 1/4 exactly
        let est = deconvolve(&spec(&[(1.0, 0.0), (0.1, 0.0)]), &spec(&[(1.0, 0.0), (0.5, 0.0)]), 4, 1).unwrap();
        assert!(est.threshold_hits().is_empty());
    }

    #[test]
    fn range_errors() {
        let short = SpectralVector::uniform(1);
        let long = SpectralVector::uniform(3);
        assert!(matches!(
            deconvolve(&short, &long, 10, 2),
            Err(Error::SpectrumRange { needed: 2, available: 1 })
        ));
        assert!(deconvolve(&long, &long, 0, 2).is_err());
        assert!(deconvolve(&long, &long, 10, 0).is_err());
    }

    #[test]
    fn derivative_examples() {
        let s = spec(&[(1.0, 0.0), (1.0, 0.0)]);
        assert_eq!(derivative_transform(&s, 0), s);
        let d = derivative_transform(&s, 1);
        assert_eq!(d.get(0), c(0.0, 0.0));
        assert_abs_diff_eq!(d.get(1).im, -std::f64::consts::TAU, epsilon = 1e-15);
        assert_abs_diff_eq!(d.get(1).re, 0.0);
        assert!(d.is_hermitian());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let s = spec(&[(1.0, 0.0), (0.3, -0.1), (0.1, 0.05), (0.0, 0.02)]);
        let grid = 8192;
        let f = synthesize(&s, grid).unwrap();
        let df = synthesize(&derivative_transform(&s, 1), grid).unwrap();
        let h = 1.0 / grid as f64;
        let scale = df.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for t in 0..grid {
            let fd = (f[(t + 1) % grid] - f[(t + grid - 1) % grid]) / (2.0 * h);
            assert!((fd - df[t]).abs() <= 1e-4 * scale, "t = {t}");
        }
    }

    #[test]
    fn contrast_examples() {
        let omega = WeightSequence::constant();
        let g = spec(&[(1.0, 0.0), (0.2, 0.0)]);
        let v = contrast_norm_sq(&g, &spec(&[(1.0, 0.0), (0.5, 0.0)]), 100, 1, &omega).unwrap();
        assert_abs_diff_eq!(v, 1.32, epsilon = 1e-14);
        let v = contrast_norm_sq(&g, &spec(&[(1.0, 0.0), (0.05, 0.0)]), 100, 1, &omega).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn risk_examples() {
        let omega = WeightSequence::constant();
        let truth = spec(&[(1.0, 0.0), (0.5, 0.0)]);
        let est = DeconvEstimate::from_parts(1, 10, truth.clone(), vec![]).unwrap();
        assert_eq!(exact_risk(&est, &truth, &omega, 5).unwrap(), 0.0);
        let uniform = DeconvEstimate::from_parts(1, 10, SpectralVector::uniform(1), vec![]).unwrap();
        assert_abs_diff_eq!(exact_risk(&uniform, &truth, &omega, 1).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn unbounded_tail_is_an_error() {
        struct Rough;
        impl TrueSpectrum for Rough {
            fn coefficient(&self, _: i64) -> Complex64 {
                c(0.0, 0.0)
            }
            fn weighted_tail(&self, _: &WeightSequence, _: usize) -> Option<f64> {
                None
            }
        }
        let est = DeconvEstimate::from_parts(1, 10, SpectralVector::uniform(1), vec![]).unwrap();
        let err = exact_risk(&est, &Rough, &WeightSequence::constant(), 4).unwrap_err();
        assert_eq!(err.to_string(), "tail bias unbounded");
    }

    #[test]
    fn record_round_trip() {
        let g = spec(&[(1.0, 0.0), (0.3, 0.1), (0.2, -0.05)]);
        let phi = spec(&[(1.0, 0.0), (0.7, 0.0), (0.05, 0.0)]);
        let est = deconvolve(&g, &phi, 100, 2).unwrap();
        let json = serde_json::to_string(&EstimateRecord::from(&est)).unwrap();
        let back: DeconvEstimate = serde_json::from_str::<EstimateRecord>(&json).unwrap().try_into().unwrap();
        assert_eq!(back, est);
    }

    fn arb_spec(k: usize) -> impl Strategy<Value = SpectralVector> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), k).prop_map(|v| {
            let mut half = vec![c(1.0, 0.0)];
            half.extend(v.into_iter().map(|(a, b)| c(a, b)));
            SpectralVector::from_nonnegative(&half).unwrap()
        })
    }

    proptest! {
        #[test]
        fn two_paths_agree(g in arb_spec(8), phi in arb_spec(8), m in 1usize..200, k in 1usize..=8, s in 0u32..3) {
            let omega = WeightSequence::derivative(s).unwrap();
            let est = deconvolve(&g, &phi, m, k).unwrap();
            let a = contrast_norm_sq(&g, &phi, m, k, &omega).unwrap();
            let b = weighted_norm_sq(est.spectrum(), &omega);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }

        #[test]
        fn estimates_are_nested_and_symmetric(g in arb_spec(8), phi in arb_spec(8), m in 1usize..200, k in 1usize..8) {
            let small = deconvolve(&g, &phi, m, k).unwrap();
            let big = deconvolve(&g, &phi, m, 8).unwrap();
            for j in -(k as i64)..=k as i64 {
                prop_assert_eq!(small.spectrum().get(j), big.spectrum().get(j));
            }
            prop_assert_eq!(small.spectrum().get(0), c(1.0, 0.0));
            for &j in small.threshold_hits() {
                prop_assert!(small.threshold_hits().contains(&-j));
            }
            let profile = contrast_profile(&g, &phi, m, 8, &WeightSequence::constant()).unwrap();
            prop_assert!(profile.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}
