//! Eigenvalue point sets of Gaussian Hermitian random matrices, rescaled
//! to unit density, and the averaged-periodogram estimate of their
//! spectral density against the piecewise linear target min(|k|, 1).

use crate::comb::{EmpiricalDensity, KGrid, WeightedComb};
use crate::error::{invalid, Result};
use crate::hermitian::hermitian_eigenvalues;
use crate::stochastic::RandomSource;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Hermitian matrix with independent Gaussian entries: variance 1 on the
/// diagonal, 1/2 per real part off it. The bulk spectrum then spans
/// [-2 sqrt(N), 2 sqrt(N)].
pub fn gue_matrix(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let root_half = 0.5f64.sqrt();
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        a[i * n + i] = Complex64::new(d, 0.0);
        for j in 0..i {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(re * root_half, im * root_half);
            a[i * n + j] = z;
            a[j * n + i] = z.conj();
        }
    }
    a
}

/// Semicircle radius after dividing eigenvalues by sqrt(2 pi); the central
/// eigenvalue density then equals this same number.
pub fn semicircle_radius(n: usize) -> f64 {
    (2.0 * n as f64 / PI).sqrt()
}

/// Fraction of the semicircle kept around the centre. A tighter cut than
/// the bulk trades sample count for flatness of the density.
pub const CENTRAL_CUT: f64 = 0.25;

/// Eigenvalues of one draw, divided by sqrt(2 pi), cut to the central
/// region, and stretched by the semicircle radius to unit mean density.
pub fn gue_eigenvalue_points(n: usize, rng: &mut ChaCha8Rng) -> Result<WeightedComb> {
    if n < 50 {
        return Err(invalid("matrix dimension too small for a usable bulk"));
    }
    let radius = semicircle_radius(n);
    let matrix = gue_matrix(n, rng);
    let eigenvalues = hermitian_eigenvalues(n, &matrix)?;
    let scale = (2.0 * PI).sqrt();
    let positions: Vec<f64> = eigenvalues
        .iter()
        .map(|&x| x / scale)
        .filter(|&x| x.abs() <= CENTRAL_CUT * radius)
        .map(|x| x * radius)
        .collect();
    WeightedComb::unit(positions, CENTRAL_CUT * radius * radius)
}

/// Independent draws on split streams; the collect order is the stream
/// order, so the ensemble does not depend on the thread count.
pub fn gue_ensemble(n: usize, samples: usize, source: &RandomSource) -> Result<Vec<WeightedComb>> {
    (0..samples)
        .into_par_iter()
        .map(|s| gue_eigenvalue_points(n, &mut source.replica(s as u64)))
        .collect()
}

/// Averaged periodogram with the finite-window image of the central atom
/// removed: each sample subtracts its own squared intensity times the
/// window kernel sin^2(pi k L) / ((pi k)^2 L).
pub fn gue_diffraction_empirical(samples: &[WeightedComb], grid: &KGrid) -> Result<EmpiricalDensity> {
    if samples.len() < 100 {
        return Err(invalid("need at least 100 samples"));
    }
    let mut sums = vec![0.0; grid.len()];
    for comb in samples {
        let pg = crate::comb::periodogram(comb, grid)?;
        let length = comb.volume();
        let intensity = comb.len() as f64 / length;
        for (i, k) in grid.iter().enumerate() {
            let leak = if k.abs() < 1e-12 {
                intensity * intensity * length
            } else {
                let s = (PI * k * length).sin();
                intensity * intensity * s * s / (PI * k * PI * k * length)
            };
            sums[i] += pg.value(i) - leak;
        }
    }
    let count = samples.len() as f64;
    EmpiricalDensity::new(grid.clone(), sums.iter().map(|v| v / count).collect(), 0.0)
}

/// Spectral density of the unit-density eigenvalue process.
pub fn gue_spectral_density(k: f64) -> f64 {
    k.abs().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::smooth;

    #[test]
    fn rejects_small_inputs() {
        let src = RandomSource::new(1);
        assert!(gue_eigenvalue_points(10, &mut src.master()).is_err());
        let samples = gue_ensemble(60, 4, &src).unwrap();
        let grid = KGrid::span(0.1, 1.0, 11).unwrap();
        assert!(gue_diffraction_empirical(&samples, &grid).is_err());
    }

    #[test]
    fn points_are_sorted_and_distinct() {
        let src = RandomSource::new(2);
        let comb = gue_eigenvalue_points(120, &mut src.master()).unwrap();
        assert!(comb.len() > 20);
        for pair in comb.positions().windows(2) {
            assert!(pair[1] > pair[0]);
        }
    }

    #[test]
    fn spectral_radius_and_central_density_are_calibrated() {
        let src = RandomSource::new(3);
        let n = 150;
        let radius = semicircle_radius(n);
        let scale = (2.0 * PI).sqrt();
        let mut edge_ratio = 0.0;
        let mut kept = 0usize;
        let mut volume = 0.0;
        let reps = 40;
        for s in 0..reps {
            let matrix = gue_matrix(n, &mut src.replica(s));
            let eig = hermitian_eigenvalues(n, &matrix).unwrap();
            let top = eig.last().unwrap().max(-eig[0]) / scale;
            edge_ratio += top / radius;
            let comb = gue_eigenvalue_points(n, &mut src.replica(s)).unwrap();
            kept += comb.len();
            volume += comb.volume();
        }
        edge_ratio /= reps as f64;
        // The largest eigenvalue sits a few percent inside the semicircle
        // edge at this dimension and fluctuates little.
        assert!(edge_ratio > 0.93 && edge_ratio < 1.02, "{edge_ratio}");
        let density = kept as f64 / volume;
        assert!((density - 1.0).abs() < 0.04, "{density}");
    }

    #[test]
    fn neighbour_spacings_show_repulsion() {
        let src = RandomSource::new(4);
        let samples = gue_ensemble(100, 150, &src).unwrap();
        let mut close = 0usize;
        let mut total = 0usize;
        for comb in &samples {
            for pair in comb.positions().windows(2) {
                total += 1;
                if pair[1] - pair[0] < 0.05 {
                    close += 1;
                }
            }
        }
        let fraction = close as f64 / total as f64;
        // Independent points at unit density would put ~4.9% of spacings
        // below 0.05; repulsion suppresses that by orders of magnitude.
        assert!(fraction < 0.01, "{fraction}");
    }

    #[test]
    fn sine_kernel_quadrature_reproduces_the_bend_target() {
        // The pair correlation 1 - (sin(pi x)/(pi x))^2 Fourier-transforms
        // to min(|k|, 1) - 1 plus the flat part; brute-force quadrature
        // pins the piecewise linear target independently.
        let x_max = 2000.0;
        let step = 0.005;
        let half_points = (x_max / step) as usize;
        for &k in &[0.2, 0.5, 0.8, 1.5] {
            let mut integral = 0.5 * step; // x = 0 term of the even integrand
            for j in 1..=half_points {
                let x = j as f64 * step;
                let sinc = (PI * x).sin() / (PI * x);
                let weight = if j == half_points { 0.5 } else { 1.0 };
                integral += weight * step * sinc * sinc * (std::f64::consts::TAU * k * x).cos();
            }
            let h = 1.0 - 2.0 * integral;
            assert!((h - gue_spectral_density(k)).abs() < 1e-3, "k = {k}: {h}");
        }
    }

    #[test]
    fn averaged_periodogram_tracks_the_target() {
        let src = RandomSource::new(5);
        let samples = gue_ensemble(80, 120, &src).unwrap();
        let grid = KGrid::span(0.2, 1.8, 321).unwrap();
        let raw = gue_diffraction_empirical(&samples, &grid).unwrap();
        let smoothed = smooth(&raw, 0.05).unwrap();
        let target = EmpiricalDensity::from_fn(grid.clone(), gue_spectral_density).unwrap();
        let l1 = smoothed.l1_distance_on(&target, 0.3, 1.6).unwrap();
        assert!(l1 < 0.1, "{l1}");
        let sup = smoothed.sup_distance_to(0.3, 1.6, gue_spectral_density);
        assert!(sup < 0.25, "{sup}");
    }
}
