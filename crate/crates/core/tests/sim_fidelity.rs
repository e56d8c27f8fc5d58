use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use circdeconv::sim::experiment::draw_samples;
use circdeconv::sim::DensityModel;
use circdeconv::spectral::empirical_coefficient;

const BINS: usize = 64;

/// Bin probabilities by composite Simpson integration of the density.
fn bin_probabilities(model: &DensityModel) -> Vec<f64> {
    let sub = 64;
    (0..BINS)
        .map(|b| {
            let (lo, h) = (b as f64 / BINS as f64, 1.0 / (BINS * sub) as f64);
            let mut acc = model.density(lo) + model.density(lo + sub as f64 * h);
            for i in 1..sub {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * model.density(lo + i as f64 * h);
            }
            acc * h / 3.0
        })
        .collect()
}

#[test]
fn samplers_pass_chi_square() {
    // 0.1% critical value of chi-square with 63 degrees of freedom
    let critical = 103.44;
    let draws = 100_000;
    for (seed, model) in [
        DensityModel::power_decay(3.0, 25, 0.05).unwrap(),
        DensityModel::power_decay(1.5, 25, 0.05).unwrap(),
        DensityModel::wrapped_laplace(0.08).unwrap(),
        DensityModel::wrapped_laplace(0.5).unwrap(),
        DensityModel::wrapped_normal(0.1).unwrap(),
        DensityModel::wrapped_normal(1.0 / std::f64::consts::TAU).unwrap(),
    ]
    .into_iter()
    .enumerate()
    {
        let probs = bin_probabilities(&model);
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "{model:?}: bins sum to {total}");
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let sample = model.sample(draws, &mut rng).unwrap();
        let mut counts = [0usize; BINS];
        for x in sample.values() {
            counts[((x * BINS as f64) as usize).min(BINS - 1)] += 1;
        }
        let stat: f64 = counts
            .iter()
            .zip(&probs)
            .map(|(&o, &p)| {
                let e = p * draws as f64;
                (o as f64 - e).powi(2) / e
            })
            .sum();
        assert!(stat < critical, "{model:?}: chi-square {stat:.1}");
    }
}

#[test]
fn contaminated_spectrum_converges_to_product() {
    let f = DensityModel::power_decay(2.0, 25, 0.05).unwrap();
    let phi = DensityModel::wrapped_laplace(0.1).unwrap();
    let n = 10_000;
    let bound = 4.0 / (n as f64).sqrt();
    let mut ok = 0;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (y, _) = draw_samples(&f, &phi, n, 2, &mut rng).unwrap();
        let worst = (-10..=10i64)
            .map(|j| (empirical_coefficient(&y, j) - f.exact_coefficient(j) * phi.exact_coefficient(j)).norm())
            .fold(0.0, f64::max);
        if worst < bound {
            ok += 1;
        }
    }
    assert!(ok >= 95, "{ok} of 100 runs within 4/sqrt(n)");
}

#[test]
fn closed_form_densities_match_their_coefficients() {
    let k = 400;
    // Laplace coefficients are 1 / (1 + 4π²σ²j²), so the truncated tail is
    // below 2 / (4π²σ²k); the normal tail is negligible
    let laplace_tail = 2.0 / (std::f64::consts::TAU.powi(2) * 0.04 * k as f64);
    for (model, tol) in [
        (DensityModel::wrapped_laplace(0.2).unwrap(), laplace_tail + 1e-9),
        (DensityModel::wrapped_normal(0.15).unwrap(), 1e-9),
    ] {
        let spec = model.spectrum(k);
        let grid = 1024;
        let synth = circdeconv::spectral::synthesize(&spec, grid).unwrap();
        for (t, v) in synth.iter().enumerate() {
            let x = t as f64 / grid as f64;
            assert!((model.density(x) - v).abs() < tol, "{model:?} at {x}: {} vs {v}", model.density(x));
        }
    }
}
