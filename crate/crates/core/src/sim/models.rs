//! Circular densities with closed-form Fourier coefficients and samplers
//! for them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::TrueSpectrum;
use crate::spectral::{wrap_unit, CircularSample, SpectralVector};
use crate::weights::WeightSequence;

/// Grid used to validate nonnegativity and to bound trig polynomials.
pub const VALIDATION_GRID: usize = 4096;
/// Rejection sampling gives up below this acceptance rate.
pub const MIN_ACCEPTANCE: f64 = 0.01;

const DEFAULT_TERMS: usize = 25;
const DEFAULT_MIN_DENSITY: f64 = 0.05;

/// Configuration form of a [`DensityModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Either explicit real coefficients `c_1..c_J`, or the power-decay
    /// family `c_j = κ (1 + j)^{-decay}` for `j <= terms` with `κ` set so the
    /// minimum density equals `min_density`.
    TrigPoly {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coeffs: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        decay: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        terms: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_density: Option<f64>,
    },
    WrappedLaplace {
        scale: f64,
    },
    WrappedNormal {
        scale: f64,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<DensityModel> {
        match self {
            ModelSpec::TrigPoly {
                coeffs: Some(c),
                decay: None,
                terms: None,
                min_density: None,
            } => DensityModel::trig_poly(c.clone()),
            ModelSpec::TrigPoly {
                coeffs: None,
                decay: Some(q),
                terms,
                min_density,
            } => DensityModel::power_decay(
                *q,
                terms.unwrap_or(DEFAULT_TERMS),
                min_density.unwrap_or(DEFAULT_MIN_DENSITY),
            ),
            ModelSpec::TrigPoly { .. } => Err(Error::InvalidParameter(
                "trig_poly takes either `coeffs` or `decay` (with optional `terms`, `min_density`)".into(),
            )),
            ModelSpec::WrappedLaplace { scale } => DensityModel::wrapped_laplace(*scale),
            ModelSpec::WrappedNormal { scale } => DensityModel::wrapped_normal(*scale),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityModel {
    /// `1 + 2 Σ_{j=1}^J c_j cos(2π j x)`.
    TrigPoly { coeffs: Vec<f64>, envelope: f64 },
    /// Laplace(0, σ) wrapped onto the circle: `[φ]_j = 1 / (1 + σ²(2πj)²)`.
    WrappedLaplace { scale: f64 },
    /// Normal(0, σ²) wrapped onto the circle: `[φ]_j = exp(-2π²σ²j²)`.
    WrappedNormal { scale: f64 },
}

/// `1 + 2 Σ c_j cos(2π j x)` with the Chebyshev recurrence for `cos(jθ)`.
fn trig_value(coeffs: &[f64], x: f64) -> f64 {
    let c1 = (TAU * x).cos();
    let (mut prev, mut cur) = (1.0, c1);
    let mut acc = 1.0;
    for &c in coeffs {
        acc += 2.0 * c * cur;
        let next = 2.0 * c1 * cur - prev;
        prev = cur;
        cur = next;
    }
    acc
}

fn grid_extremes(coeffs: &[f64]) -> (f64, f64) {
    (0..VALIDATION_GRID)
        .map(|t| trig_value(coeffs, t as f64 / VALIDATION_GRID as f64))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

impl DensityModel {
    /// Trig polynomial with real coefficients `c_1..c_J`; must be
    /// nonnegative on the validation grid.
    pub fn trig_poly(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("trig_poly coefficients must be finite".into()));
        }
        let (lo, hi) = grid_extremes(&coeffs);
        if lo < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "trig_poly density is negative (min {lo:.4}) on the validation grid"
            )));
        }
        let envelope = hi * 1.01;
        if 1.0 / envelope < MIN_ACCEPTANCE {
            return Err(Error::RejectionEfficiency {
                efficiency: 1.0 / envelope,
            });
        }
        Ok(Self::TrigPoly { coeffs, envelope })
    }

    /// `c_j = κ (1 + j)^{-decay}`, `j = 1..=terms`, with `κ` chosen so the
    /// grid minimum of the density is exactly `min_density`.
    ///
    /// The density is affine in `κ`, so the root is solved in closed form.
    pub fn power_decay(decay: f64, terms: usize, min_density: f64) -> Result<Self> {
        if !(decay > 0.5) {
            return Err(Error::InvalidParameter(format!("decay must exceed 1/2, got {decay}")));
        }
        if terms < 1 {
            return Err(Error::InvalidParameter("terms must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&min_density) {
            return Err(Error::InvalidParameter(format!("min_density must lie in [0,1), got {min_density}")));
        }
        let shape: Vec<f64> = (1..=terms).map(|j| (1.0 + j as f64).powf(-decay)).collect();
        // p(x) = 1 + κ h(x); min h < 0 always since h integrates to zero
        let (h_min, _) = grid_extremes(&shape);
        let h_min = h_min - 1.0;
        let kappa = (1.0 - min_density) / -h_min;
        Self::trig_poly(shape.iter().map(|c| kappa * c).collect())
    }

    pub fn wrapped_laplace(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("laplace scale must be positive, got {scale}")));
        }
        Ok(Self::WrappedLaplace { scale })
    }

    pub fn wrapped_normal(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("normal scale must be positive, got {scale}")));
        }
        Ok(Self::WrappedNormal { scale })
    }

    /// Density value at `x ∈ [0, 1)`.
    pub fn density(&self, x: f64) -> f64 {
        match self {
            Self::TrigPoly { coeffs, .. } => trig_value(coeffs, x),
            // Σ_k of the Laplace pdf at x + k, summed as two geometric series
            Self::WrappedLaplace { scale } => {
                let x = wrap_unit(x);
                let q = (-1.0 / scale).exp();
                ((-x / scale).exp() + (-(1.0 - x) / scale).exp()) / (2.0 * scale * (1.0 - q))
            }
            Self::WrappedNormal { scale } => {
                let x = wrap_unit(x);
                let reach = (12.0 * scale).ceil() as i64 + 1;
                let norm = 1.0 / (scale * TAU.sqrt());
                (-reach..=reach)
                    .map(|k| {
                        let z = (x + k as f64) / scale;
                        norm * (-0.5 * z * z).exp()
                    })
                    .sum()
            }
        }
    }

    /// `[p]_j` in closed form. All three kinds are symmetric, so the
    /// coefficients are real.
    pub fn exact_coefficient(&self, j: i64) -> Complex64 {
        let jf = j as f64;
        let re = match self {
            Self::TrigPoly { coeffs, .. } => match j.unsigned_abs() as usize {
                0 => 1.0,
                k if k <= coeffs.len() => coeffs[k - 1],
                _ => 0.0,
            },
            Self::WrappedLaplace { scale } => 1.0 / (1.0 + scale * scale * (TAU * jf).powi(2)),
            Self::WrappedNormal { scale } => (-2.0 * PI * PI * scale * scale * jf * jf).exp(),
        };
        Complex64::new(re, 0.0)
    }

    /// Exact coefficients for `|j| <= max_index`.
    pub fn spectrum(&self, max_index: usize) -> SpectralVector {
        SpectralVector::from_fn(max_index, |j| self.exact_coefficient(j))
    }

    /// Draws `count` iid observations.
    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<CircularSample> {
        if count < 1 {
            return Err(Error::EmptySample);
        }
        let values = match self {
            Self::WrappedLaplace { scale } => (0..count)
                .map(|_| {
                    let a: f64 = Exp1.sample(rng);
                    let b: f64 = Exp1.sample(rng);
                    wrap_unit(scale * (a - b))
                })
                .collect(),
            Self::WrappedNormal { scale } => (0..count)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    wrap_unit(scale * z)
                })
                .collect(),
            Self::TrigPoly { coeffs, envelope } => {
                let mut out = Vec::with_capacity(count);
                while out.len() < count {
                    let x: f64 = rng.random();
                    let u: f64 = rng.random::<f64>() * envelope;
                    if u < trig_value(coeffs, x) {
                        out.push(x);
                    }
                }
                out
            }
        };
        CircularSample::new(values)
    }

    /// Upper end of the nonzero coefficient range, if finite.
    pub fn bandwidth(&self) -> Option<usize> {
        match self {
            Self::TrigPoly { coeffs, .. } => Some(coeffs.len()),
            _ => None,
        }
    }
}

/// Terms summed explicitly before the integral remainder of a Laplace tail.
const LAPLACE_TAIL_TERMS: usize = 4096;

impl TrueSpectrum for DensityModel {
    fn coefficient(&self, j: i64) -> Complex64 {
        self.exact_coefficient(j)
    }

    fn weighted_tail(&self, omega: &WeightSequence, from: usize) -> Option<f64> {
        let term = |j: usize| omega.eval(j as i64) * self.exact_coefficient(j as i64).norm_sqr();
        match self {
            Self::TrigPoly { coeffs, .. } => Some(2.0 * (from + 1..=coeffs.len()).map(term).sum::<f64>()),
            Self::WrappedLaplace { scale } => {
                let e = omega.growth_exponent();
                if e >= 3.0 {
                    return None;
                }
                let last = from + LAPLACE_TAIL_TERMS;
                let head: f64 = (from + 1..=last).map(term).sum();
                // ω_j ≈ ω_J (j/J)^e and |c_j|² ≈ (b j²)^{-2} beyond J
                let b = scale * scale * TAU * TAU;
                let jf = last as f64;
                let x0 = jf + 0.5;
                let remainder = omega.eval(last as i64) * jf.powf(-e) * x0.powf(e - 3.0) / ((3.0 - e) * b * b);
                Some(2.0 * (head + remainder))
            }
            Self::WrappedNormal { scale } => {
                let e = omega.growth_exponent().max(0.0);
                let b = 4.0 * PI * PI * scale * scale;
                let peak = (e / (2.0 * b)).sqrt().ceil() as usize;
                let mut sum = 0.0;
                let mut j = from + 1;
                loop {
                    let t = term(j);
                    sum += t;
                    if j > peak && (t == 0.0 || t <= 1e-18 * sum) {
                        break;
                    }
                    if j > from + 100_000_000 {
                        return None;
                    }
                    j += 1;
                }
                Some(2.0 * sum)
            }
        }
    }
}
