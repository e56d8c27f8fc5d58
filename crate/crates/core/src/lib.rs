//! Adaptive series deconvolution of circular densities when the error
//! density is only known through an independent sample.
//!
//! Observations `Y = X + ε mod 1` carry the target density `f` convolved with
//! the error density `φ`. Fourier coefficients factor, `[g]_j = [f]_j [φ]_j`,
//! so the estimator divides empirical coefficients of `Y` by empirical
//! coefficients of an extra ε-sample, keeps only indices where the latter are
//! large enough, and picks the truncation level by penalized contrast.

pub mod classes;
pub mod error;
pub mod estimator;
pub mod formats;
pub mod selection;
pub mod sim;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
pub use estimator::{deconvolve, exact_risk, DeconvEstimate};
pub use spectral::{empirical_spectrum, CircularSample, SpectralVector};
pub use weights::WeightSequence;
