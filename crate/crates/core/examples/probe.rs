use combscope_core::{binned_pair_spectrum, fibonacci_tiling_density, pair_correlation,
    renewal_autocorr_binned, renewal_sample, Complex64, EmpiricalDensity, KGrid,
    RandomSource, WaitingTime, DEFAULT_BURN_IN_GAPS};
fn main() {
    let law = WaitingTime::fibonacci_tiling();
    let rho = law.intensity();
    let length = 1e5 * law.mean();
    let grid = KGrid::new(0.05, 0.005, 591).unwrap();
    let closed = EmpiricalDensity::from_fn(grid.clone(), |k| fibonacci_tiling_density(k).unwrap()).unwrap();
    for r in [220.0f64, 300.0, 400.0] {
        let t0 = std::time::Instant::now();
        let smeared = binned_pair_spectrum(&renewal_autocorr_binned(&law, r, 0.001).unwrap(), rho * rho, &grid, 10).unwrap();
        let bias = smeared.l1_distance_on(&closed, 0.05, 3.0).unwrap();
        println!("analytic R {r:4}: bias {bias:.4}  ({} ms)", t0.elapsed().as_millis());
    }
    for seed in [55u64, 56, 57] {
        let mut rng = RandomSource::new(seed).replica(0);
        let comb = renewal_sample(&law, length, DEFAULT_BURN_IN_GAPS, &mut rng).unwrap().to_comb().unwrap();
        let mean_w = comb.weights().iter().sum::<Complex64>() / comb.volume();
        for r in [220.0f64, 300.0, 400.0] {
            let t0 = std::time::Instant::now();
            let pairs = pair_correlation(&comb, r, 0.001).unwrap();
            let est = binned_pair_spectrum(&pairs, mean_w.norm_sqr(), &grid, 10).unwrap();
            let l1 = est.l1_distance_on(&closed, 0.05, 3.0).unwrap();
            println!("seed {seed} R {r:4}: total {l1:.4}  ({} ms)", t0.elapsed().as_millis());
        }
    }
}
