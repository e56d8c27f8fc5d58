//! Circular samples, Fourier coefficients on the unit circle and the
//! coefficient-space operations built on them.
//!
//! The circle is identified with `[0, 1)` and the basis is
//! `e_j(x) = exp(-i 2π j x)`, so the `j`-th coefficient of a density `p` is
//! `[p]_j = ∫ p(x) exp(i 2π j x) dx`. Empirical coefficients average
//! `exp(i 2π j Y_k)` over the sample.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::WeightSequence;

/// Tolerance used when checking Hermitian symmetry of a spectrum.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Maximum imaginary residue accepted by [`synthesize`].
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// A nonempty batch of observations on the circle `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CircularSample {
    values: Vec<f64>,
}

impl CircularSample {
    /// Validates that the sample is nonempty and every value lies in `[0, 1)`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0 && **v < 1.0))
        {
            return Err(Error::OutOfDomain { index, value });
        }
        Ok(Self { values })
    }

    /// Wraps arbitrary reals onto the circle.
    pub fn from_wrapped(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(values.into_iter().map(wrap_unit).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Rotates every observation by `shift` (mod 1).
    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| wrap_unit(v + shift)).collect(),
        }
    }
}

impl TryFrom<Vec<f64>> for CircularSample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<CircularSample> for Vec<f64> {
    fn from(sample: CircularSample) -> Self {
        sample.values
    }
}

/// Reduces a real number to `[0, 1)`.
///
/// `rem_euclid` can round tiny negative inputs up to exactly `1.0`; those are
/// folded back to `0.0`.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `exp(i 2π j x)`, with the phase reduced mod 1 before the trig call.
#[inline]
pub(crate) fn unit_phase(j: i64, x: f64) -> Complex64 {
    let turns = (j as f64 * x).rem_euclid(1.0);
    let (s, c) = (TAU * turns).sin_cos();
    Complex64::new(c, s)
}

/// Complex coefficients `c_j` for `j = -K..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector {
    max_index: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralVector {
    /// Builds a vector from coefficients ordered `j = -K..=K`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 != 1 {
            return Err(Error::InvalidParameter(format!(
                "spectrum needs an odd number of coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            max_index: coeffs.len() / 2,
            coeffs,
        })
    }

    /// All-zero vector of the given range.
    pub fn zeros(max_index: usize) -> Self {
        Self {
            max_index,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * max_index + 1],
        }
    }

    /// The uniform density: `c_0 = 1`, all other coefficients zero.
    pub fn uniform(max_index: usize) -> Self {
        let mut v = Self::zeros(max_index);
        v.set(0, Complex64::new(1.0, 0.0));
        v
    }

    /// Builds a Hermitian vector from `c_0..=c_K`, mirroring negative indices
    /// by conjugation.
    pub fn from_nonnegative(half: &[Complex64]) -> Result<Self> {
        let Some(max_index) = half.len().checked_sub(1) else {
            return Err(Error::InvalidParameter("empty coefficient list".into()));
        };
        let mut v = Self::zeros(max_index);
        for (j, c) in half.iter().enumerate() {
            v.set(j as i64, *c);
            if j > 0 {
                v.set(-(j as i64), c.conj());
            }
        }
        Ok(v)
    }

    /// Tabulates `f(j)` for `j = 0..=K` and mirrors by conjugation.
    pub fn from_fn(max_index: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let half: Vec<Complex64> = (0..=max_index as i64).map(f).collect();
        Self::from_nonnegative(&half).expect("range is nonempty")
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// Coefficient at `j`; zero outside the stored range.
    pub fn get(&self, j: i64) -> Complex64 {
        if j.unsigned_abs() as usize > self.max_index {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(j + self.max_index as i64) as usize]
        }
    }

    /// Sets coefficient `j`.
    ///
    /// Panics when `|j|` exceeds the stored range.
    pub fn set(&mut self, j: i64, value: Complex64) {
        assert!(
            j.unsigned_abs() as usize <= self.max_index,
            "index {j} outside spectrum range {}",
            self.max_index
        );
        self.coeffs[(j + self.max_index as i64) as usize] = value;
    }

    /// Iterates `(j, c_j)` for `j = -K..=K`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let k = self.max_index as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - k, *c))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Restricts to `|j| <= max_index` (or zero-pads when extending).
    pub fn truncated(&self, max_index: usize) -> Self {
        let mut v = Self::zeros(max_index);
        let k = max_index.min(self.max_index) as i64;
        for j in -k..=k {
            v.set(j, self.get(j));
        }
        v
    }

    /// Largest violation of `c_{-j} = conj(c_j)`.
    pub fn hermitian_defect(&self) -> f64 {
        (1..=self.max_index as i64)
            .map(|j| (self.get(-j) - self.get(j).conj()).norm())
            .chain(std::iter::once(self.get(0).im.abs()))
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        self.hermitian_defect() <= HERMITIAN_TOL * scale
    }
}

/// Empirical `j`-th Fourier coefficient `(1/n) Σ exp(i 2π j Y_k)`.
pub fn empirical_coefficient(sample: &CircularSample, j: i64) -> Complex64 {
    if j == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let sum = sample
        .values()
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &y| acc + unit_phase(j, y));
    sum / sample.len() as f64
}

/// Empirical coefficients for `|j| <= max_index`.
///
/// Nonnegative indices are summed in sample order, negative indices are
/// mirrored by conjugation so Hermitian symmetry is exact.
pub fn empirical_spectrum(sample: &CircularSample, max_index: usize) -> SpectralVector {
    let n = sample.len() as f64;
    let mut sums = vec![Complex64::new(0.0, 0.0); max_index + 1];
    for &y in sample.values() {
        for (j, acc) in sums.iter_mut().enumerate().skip(1) {
            *acc += unit_phase(j as i64, y);
        }
    }
    sums[0] = Complex64::new(1.0, 0.0);
    for acc in sums.iter_mut().skip(1) {
        *acc /= n;
    }
    SpectralVector::from_nonnegative(&sums).expect("range is nonempty")
}

/// `Σ_{|j|<=K} w_j |c_j|²`.
pub fn weighted_norm_sq(spec: &SpectralVector, w: &WeightSequence) -> f64 {
    spec.iter().map(|(j, c)| w.eval(j) * c.norm_sqr()).sum()
}

/// Coefficient-wise product `[f]_j [φ]_j` over the common range.
pub fn convolve_spectra(f_spec: &SpectralVector, phi_spec: &SpectralVector) -> SpectralVector {
    let k = f_spec.max_index().min(phi_spec.max_index());
    let mut out = SpectralVector::zeros(k);
    for j in -(k as i64)..=k as i64 {
        out.set(j, f_spec.get(j) * phi_spec.get(j));
    }
    out
}

/// Evaluates `Σ c_j e_j(x)` on `x_t = t / grid_size`.
pub fn synthesize(spec: &SpectralVector, grid_size: usize) -> Result<Vec<f64>> {
    if grid_size == 0 {
        return Err(Error::InvalidParameter("grid_size must be at least 1".into()));
    }
    if !spec.is_hermitian() {
        return Err(Error::NonHermitian);
    }
    let k = spec.max_index() as i64;
    let mut out = Vec::with_capacity(grid_size);
    for t in 0..grid_size {
        let x = t as f64 / grid_size as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in -k..=k {
            acc += spec.get(j) * unit_phase(j, x).conj();
        }
        let scale = 1.0 + acc.re.abs();
        if acc.im.abs() > IMAG_RESIDUE_TOL * scale {
            return Err(Error::NonHermitian);
        }
        out.push(acc.re);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample(v: &[f64]) -> CircularSample {
        CircularSample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_empty_and_out_of_range() {
        assert!(matches!(CircularSample::new(vec![]), Err(Error::EmptySample)));
        assert!(matches!(
            CircularSample::new(vec![0.2, 1.0]),
            Err(Error::OutOfDomain { index: 1, .. })
        ));
        assert!(CircularSample::new(vec![-0.1]).is_err());
        assert!(CircularSample::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn wrap_never_returns_one() {
        assert_eq!(wrap_unit(-1e-20), 0.0);
        assert_abs_diff_eq!(wrap_unit(1.25), 0.25);
        assert_abs_diff_eq!(wrap_unit(-0.25), 0.75);
    }

    #[test]
    fn coefficient_small_cases() {
        let s = sample(&[0.3, 0.9]);
        assert_eq!(empirical_coefficient(&s, 0), c(1.0, 0.0));
        let z = empirical_coefficient(&sample(&[0.0, 0.5]), 1);
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        let z = empirical_coefficient(&sample(&[0.25]), 1);
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn coefficient_matches_three_term_sum() {
        // exp(i 2π 2 y) summed by hand with cos/sin of the raw angle
        let ys = [0.1, 0.2, 0.7];
        let (mut re, mut im) = (0.0, 0.0);
        for y in ys {
            let a = 2.0 * std::f64::consts::PI * 2.0 * y;
            re += a.cos();
            im += a.sin();
        }
        let z = empirical_coefficient(&sample(&ys), 2);
        assert_abs_diff_eq!(z.re, re / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(z.im, im / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn empty_spectrum_range() {
        let s = empirical_spectrum(&sample(&[0.4, 0.1]), 0);
        assert_eq!(s.max_index(), 0);
        assert_eq!(s.get(0), c(1.0, 0.0));
        let s = empirical_spectrum(&sample(&[0.0, 0.5]), 1);
        assert!(s.get(1).norm() < 1e-15 && s.get(-1).norm() < 1e-15);
    }

    #[test]
    fn uniform_draws_have_small_coefficients() {
        // |c_j| <= 3/sqrt(n) for 0 < j <= 5 in at least 99 of 100 seeded runs
        let n = 1000;
        let mut good = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = CircularSample::new((0..n).map(|_| rng.random::<f64>()).collect()).unwrap();
            let spec = empirical_spectrum(&s, 5);
            if (1..=5).all(|j| spec.get(j).norm() <= 3.0 / (n as f64).sqrt()) {
                good += 1;
            }
        }
        assert!(good >= 99, "only {good} of 100 runs within bound");
    }

    #[test]
    fn weighted_norm_examples() {
        let w = WeightSequence::derivative(1).unwrap();
        assert_abs_diff_eq!(weighted_norm_sq(&SpectralVector::uniform(0), &w), 1.0);
        let s = SpectralVector::from_nonnegative(&[c(1.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert_abs_diff_eq!(weighted_norm_sq(&s, &w), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn weighted_norm_matches_quadrature() {
        let s = SpectralVector::from_nonnegative(&[c(1.0, 0.0), c(0.3, -0.2), c(0.0, 0.1)]).unwrap();
        let grid = synthesize(&s, 2048).unwrap();
        let quad: f64 = grid.iter().map(|v| v * v).sum::<f64>() / 2048.0;
        assert_abs_diff_eq!(weighted_norm_sq(&s, &WeightSequence::constant()), quad, epsilon = 1e-6);
    }

    #[test]
    fn convolution_examples() {
        let phi = SpectralVector::from_nonnegative(&[c(1.0, 0.0), c(0.4, 0.1), c(0.2, 0.0)]).unwrap();
        // the uniform density absorbs, a flat spectrum is the identity
        assert_eq!(convolve_spectra(&SpectralVector::uniform(2), &phi), SpectralVector::uniform(2));
        let flat = SpectralVector::from_fn(2, |_| c(1.0, 0.0));
        assert_eq!(convolve_spectra(&flat, &phi), phi);
        let f = SpectralVector::from_nonnegative(&[c(1.0, 0.0), c(0.3, 0.0)]).unwrap();
        let g = SpectralVector::from_nonnegative(&[c(1.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert_abs_diff_eq!(convolve_spectra(&f, &g).get(1).re, 0.15, epsilon = 1e-15);
        // truncates to the smaller range
        assert_eq!(convolve_spectra(&f, &phi).max_index(), 1);
    }

    #[test]
    fn synthesize_examples() {
        assert_eq!(synthesize(&SpectralVector::uniform(0), 4).unwrap(), vec![1.0; 4]);
        let s = SpectralVector::from_nonnegative(&[c(1.0, 0.0), c(0.5, 0.0)]).unwrap();
        let g = synthesize(&s, 4).unwrap();
        for (a, b) in g.iter().zip([2.0, 1.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        let mut bad = SpectralVector::uniform(1);
        bad.set(1, c(0.5, 0.0));
        assert!(matches!(synthesize(&bad, 4), Err(Error::NonHermitian)));
        assert!(synthesize(&s, 0).is_err());
    }

    #[test]
    fn basis_sign_convention() {
        // a point mass at 0.25 has [p]_1 = exp(i π/2) = i; synthesizing the
        // first harmonic must then peak at x = 0.25
        let spec = empirical_spectrum(&sample(&[0.25]), 1);
        let grid = synthesize(&spec, 4).unwrap();
        let argmax = (0..4).max_by(|&a, &b| grid[a].total_cmp(&grid[b])).unwrap();
        assert_eq!(argmax, 1);
    }

    proptest! {
        #[test]
        fn spectrum_is_hermitian_and_bounded(
            values in prop::collection::vec(0.0f64..1.0, 1..40),
            k in 0usize..12,
        ) {
            let s = CircularSample::new(values).unwrap();
            let spec = empirical_spectrum(&s, k);
            for j in 0..=k as i64 {
                prop_assert_eq!(spec.get(-j), spec.get(j).conj());
                prop_assert!(spec.get(j).norm() <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn shift_multiplies_by_phase(
            values in prop::collection::vec(0.0f64..1.0, 1..30),
            shift in 0.0f64..1.0,
            j in 1i64..8,
        ) {
            let s = CircularSample::new(values).unwrap();
            let before = empirical_coefficient(&s, j);
            let after = empirical_coefficient(&s.shifted(shift), j);
            let expected = before * unit_phase(j, shift);
            prop_assert!((after - expected).norm() < 1e-12);
        }

        #[test]
        fn spectrum_agrees_with_single_coefficients(
            values in prop::collection::vec(0.0f64..1.0, 1..30),
            j in 0i64..10,
        ) {
            let s = CircularSample::new(values).unwrap();
            let spec = empirical_spectrum(&s, 10);
            prop_assert!((spec.get(j) - empirical_coefficient(&s, j)).norm() < 1e-14);
            prop_assert!((spec.get(-j) - empirical_coefficient(&s, -j)).norm() < 1e-14);
        }

        #[test]
        fn grid_mean_is_zeroth_coefficient(
            re in prop::collection::vec(-0.5f64..0.5, 1..6),
            im in prop::collection::vec(-0.5f64..0.5, 1..6),
        ) {
            let mut half = vec![c(1.0, 0.0)];
            half.extend(re.iter().zip(&im).map(|(a, b)| c(*a, *b)));
            let spec = SpectralVector::from_nonnegative(&half).unwrap();
            let grid = synthesize(&spec, 64).unwrap();
            let mean = grid.iter().sum::<f64>() / 64.0;
            prop_assert!((mean - 1.0).abs() < 1e-10);
        }
    }
}
