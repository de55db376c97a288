//! One envelope builder per subcommand. Closed forms and sampled
//! estimates land in the same envelope on the same grids, so the output
//! is directly plottable either way.

use crate::{ChainMode, CliError, Command, RunConfig};
use combscope_core::{
    atom_slope_estimate, average_autocorr, bernoulli_analytic, bernoulli_comb, bernoullise,
    binned_pair_spectrum, binned_periodogram, boundary_term_check, cantor_function,
    dimer_analytic, dimer_factor,
    dimer_sample, empirical_autocorr, empirical_autocorr_alt, entropy, factor_analytic,
    fibonacci_bragg, fibonacci_tiling_density, gue_diffraction_empirical, gue_ensemble,
    gue_spectral_density, iid_sign_field, ledrappier_sample, marked_poisson_autocorr,
    nyquist_oversample, pair_correlation, pair_transform, palm_intensity_estimate,
    periodogram_direct, reduce_signs, renewal_autocorr_binned, renewal_diffraction,
    renewal_relation_residual, renewal_sample, row_average_autocorrelation,
    rs_value, sample_ensemble, signs_to_weights, smooth, three_point_average, tm_distribution,
    AtomRow, Comparison, Complex64, ComplexCorrelation, EmpiricalDensity, Envelope, Error,
    FibonacciChain, GroundProcess, KGrid, MarkLaw, MarkedProcessModel, RandomSource, Series,
    SubstitutionRule, WaitingTime, WeightedComb, DEFAULT_BURN_IN_GAPS, GOLDEN_RATIO,
};
use std::path::Path;

pub fn build(command: &Command, config: &RunConfig) -> Result<Envelope, CliError> {
    match command {
        Command::Tm { iterations, word_log2 } => run_tm(*iterations, *word_log2, config),
        Command::Cantor { depth } => run_cantor(*depth, config),
        Command::Rs { window_log2, bandwidth } => run_rs(*window_log2, *bandwidth, config),
        Command::Bernoulli { p, half_width, bandwidth } => {
            run_bernoulli(*p, *half_width, *bandwidth, config)
        }
        Command::Bernoullise { p, window_log2, bandwidth } => {
            run_bernoullise(*p, *window_log2, *bandwidth, config)
        }
        Command::Dimer { window, bandwidth } => run_dimer(*window, *bandwidth, config),
        Command::Ledrappier { size, max_lag } => run_ledrappier(*size, *max_lag, config),
        Command::Gue { size, samples, bandwidth } => run_gue(*size, *samples, *bandwidth, config),
        Command::Renewal { dist, length, bandwidth } => {
            run_renewal(dist, *length, *bandwidth, config)
        }
        Command::Fibonacci { mode, steps, tiles, clip, bandwidth } => {
            run_fibonacci(*mode, *steps, tiles, *clip, *bandwidth, config)
        }
        Command::Palm { ground, marks, runs, radius, base, max_dist, bin, model } => run_palm(
            ground,
            marks,
            *runs,
            *radius,
            *base,
            *max_dist,
            *bin,
            model.as_deref(),
            config,
        ),
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Core(Error::InvalidArgument(msg.into()))
}

/// Points 0..n recentered so the comb is balanced in its window.
fn signed_comb(signs: &[i8]) -> Result<WeightedComb, Error> {
    let n = signs.len();
    let center = (n as f64 - 1.0) / 2.0;
    let positions = (0..n).map(|j| j as f64 - center).collect();
    WeightedComb::new(positions, signs_to_weights(signs), n as f64 / 2.0)
}

/// Half-open [0, 1) with the given number of cells.
fn unit_grid(len: usize) -> Result<KGrid, Error> {
    KGrid::new(0.0, 1.0 / len.max(1) as f64, len)
}

/// Closed [lo, hi] with endpoints on the grid.
fn span_grid(lo: f64, hi: f64, len: usize) -> Result<KGrid, Error> {
    if len < 2 || !(hi > lo) {
        return Err(Error::InvalidArgument(
            "need at least two grid points spanning a positive interval".into(),
        ));
    }
    KGrid::new(lo, (hi - lo) / (len - 1) as f64, len)
}

/// Cumulative at cell edges of a cell-centered density: one more node
/// than cells, starting at zero mass on the left edge.
fn cumulative_from_zero(density: &EmpiricalDensity) -> (Vec<f64>, Vec<f64>) {
    let grid = density.grid();
    let step = grid.step();
    let left = grid.start() - step / 2.0;
    let mut xs = vec![left];
    let mut vs = vec![0.0];
    let mut acc = 0.0;
    for (i, v) in density.values().iter().enumerate() {
        acc += v * step;
        xs.push(left + (i as f64 + 1.0) * step);
        vs.push(acc);
    }
    (xs, vs)
}

/// Periodogram density at a single frequency.
fn point_density(comb: &WeightedComb, k: f64) -> Result<f64, Error> {
    let grid = KGrid::new(k, 1.0, 1)?;
    Ok(periodogram_direct(comb, &grid)?.values()[0])
}

/// Display-grid density estimate: cell means at Fourier resolution, then
/// a light smoothing pass. Affordable only when the comb sits on a lattice
/// (chirp-z path); irregular combs go through lag_density_estimate instead.
fn estimate_density(
    comb: &WeightedComb,
    grid: &KGrid,
    bandwidth: f64,
) -> Result<EmpiricalDensity, Error> {
    let os = nyquist_oversample(comb.volume(), grid.step(), grid.len());
    smooth(&binned_periodogram(comb, grid, os)?, bandwidth)
}

/// Pair-histogram route for irregular point sets: cost is pairs within
/// max_lag, independent of the frequency resolution. The matching analytic
/// curve must come through pair_transform with the same layout.
fn lag_density_estimate(
    comb: &WeightedComb,
    grid: &KGrid,
    max_lag: f64,
    bin: f64,
) -> Result<EmpiricalDensity, Error> {
    let pairs = pair_correlation(comb, max_lag, bin)?;
    let mean_w = comb.weights().iter().sum::<Complex64>() / comb.volume();
    pair_transform(&pairs, mean_w.norm_sqr(), grid)
}

/// Lag-window layout for a renewal law. Lattice laws get a bin that divides
/// the gap and a histogram edge offset by half a bin, so every
/// autocorrelation atom sits half a bin from the nearest edge and the
/// empirical and analytic histograms bin identically down to rounding.
fn renewal_lag_layout(dist: &WaitingTime, target_max: f64) -> (f64, f64) {
    match dist.lattice() {
        Some(q) => {
            let bin = q / (q / 0.02).round().max(1.0);
            let half_steps = (target_max / bin - 0.5).round().max(2.0);
            ((half_steps + 0.5) * bin, bin)
        }
        None => (target_max, 0.02),
    }
}

/// L1 distance over [lo, hi] skipping cells within `mask_radius` of a
/// masked position, so spike leakage never pollutes a continuous-part
/// comparison. Both densities must share their grid.
fn masked_l1(
    emp: &EmpiricalDensity,
    ana: &EmpiricalDensity,
    lo: f64,
    hi: f64,
    mask: &[f64],
    mask_radius: f64,
) -> f64 {
    let grid = emp.grid();
    let mut acc = 0.0;
    for i in 0..grid.len() {
        let k = grid.value(i);
        if k < lo || k > hi || mask.iter().any(|&a| (k - a).abs() <= mask_radius) {
            continue;
        }
        acc += (emp.values()[i] - ana.values()[i]).abs();
    }
    acc * grid.step()
}

fn series_re(label: &str, corr: &ComplexCorrelation) -> Result<Series, Error> {
    Series::curve(label, corr.grid().values(), corr.values().iter().map(|z| z.re).collect())
}

fn series_im(label: &str, corr: &ComplexCorrelation) -> Result<Series, Error> {
    Series::curve(label, corr.grid().values(), corr.values().iter().map(|z| z.im).collect())
}

fn run_tm(iterations: usize, word_log2: usize, config: &RunConfig) -> Result<Envelope, CliError> {
    if word_log2 == 0 || word_log2 > 24 {
        return Err(invalid("word exponent must lie in 1..=24"));
    }
    let grid_size = config.grid.unwrap_or(4096);
    let (f, defects) = tm_distribution(iterations, grid_size)?;

    let word = SubstitutionRule::thue_morse().substitute("+", word_log2)?;
    let signs = reduce_signs(&word, "+");
    let comb = signed_comb(&signs)?;
    // Cell-centered grid so the cumulative nodes land exactly on j/grid;
    // cell means keep the aliasing of the spiky periodogram out of the
    // integral (the word carries correlations at every dyadic scale).
    let step = 1.0 / grid_size as f64;
    let cells = KGrid::new(step / 2.0, step, grid_size)?;
    let os = nyquist_oversample(comb.volume(), step, grid_size);
    let pg = binned_periodogram(&comb, &cells, os)?;
    let (xs, gs) = cumulative_from_zero(&pg);

    let mut l1 = 0.0;
    let mut sup: f64 = 0.0;
    for (a, b) in f.values().iter().zip(&gs) {
        l1 += (a - b).abs() * step;
        sup = sup.max((a - b).abs());
    }

    let mut env = Envelope::new("tm", None);
    env.set_param("iterations", iterations);
    env.set_param("word_log2", word_log2);
    if let Some(d) = defects.last() {
        env.set_param("mirror_defect", d);
    }
    env.push_series(Series::from_distribution("distribution", &f));
    env.push_series(Series::curve("empirical_distribution", xs, gs)?);
    env.comparison = Some(Comparison {
        interval: (0.0, 1.0),
        l1_distance: Some(l1),
        sup_distance: Some(sup),
        atom_table: Vec::new(),
    });
    Ok(env)
}

fn run_cantor(depth: u32, config: &RunConfig) -> Result<Envelope, CliError> {
    let grid_size = config.grid.unwrap_or(4096).max(1);
    let mut xs = Vec::with_capacity(grid_size + 1);
    let mut vs = Vec::with_capacity(grid_size + 1);
    for j in 0..=grid_size {
        let x = j as f64 / grid_size as f64;
        xs.push(x);
        vs.push(cantor_function(x, depth)?);
    }
    let mut env = Envelope::new("cantor", None);
    env.set_param("depth", depth);
    env.push_series(Series::curve("distribution", xs, vs)?);
    Ok(env)
}

fn run_rs(window_log2: usize, bandwidth: f64, config: &RunConfig) -> Result<Envelope, CliError> {
    if window_log2 == 0 || window_log2 > 24 {
        return Err(invalid("word exponent must lie in 1..=24"));
    }
    let n = 1usize << window_log2;
    let signs: Vec<i8> = (0..n as i64).map(rs_value).collect();
    let comb = signed_comb(&signs)?;
    let grid = unit_grid(config.grid.unwrap_or(1024))?;
    let smoothed = estimate_density(&comb, &grid, bandwidth)?;
    let flat = EmpiricalDensity::from_fn(grid, |_| 1.0)?;

    let mut env = Envelope::new("rs", None);
    env.set_param("window_log2", window_log2);
    env.set_param("bandwidth", bandwidth);
    env.comparison = Some(Comparison {
        interval: (0.0, 1.0),
        l1_distance: Some(smoothed.l1_distance_on(&flat, 0.0, 1.0)?),
        sup_distance: Some(smoothed.sup_distance_to(0.0, 1.0, |_| 1.0)),
        atom_table: Vec::new(),
    });
    env.push_series(Series::from_density("analytic", &flat));
    env.push_series(Series::from_density("empirical", &smoothed));
    Ok(env)
}

fn run_bernoulli(
    p: f64,
    half_width: usize,
    bandwidth: f64,
    config: &RunConfig,
) -> Result<Envelope, CliError> {
    if half_width == 0 || half_width > 1 << 22 {
        return Err(invalid("half width must lie in 1..=2^22"));
    }
    let kmax = config.kmax.unwrap_or(2.0);
    let grid = span_grid(0.0, kmax, config.grid.unwrap_or(801))?;
    let analytic = bernoulli_analytic(p, &grid)?;

    let mut rng = RandomSource::new(config.seed).replica(0);
    let signs = bernoulli_comb(p, half_width, &mut rng)?;
    let comb = signed_comb(&signs)?;
    let smoothed = estimate_density(&comb, &grid, bandwidth)?;

    // Atom masses from periodogram growth between a half window and the
    // full window; the continuous floor cancels in the slope.
    let small = signed_comb(&signs[..signs.len() / 2])?;
    let mut atom_table = Vec::new();
    for &(k, intensity) in analytic.atoms() {
        let slope = atom_slope_estimate(
            small.volume(),
            point_density(&small, k)?,
            comb.volume(),
            point_density(&comb, k)?,
        );
        atom_table.push(AtomRow { position: k, analytic: intensity, empirical: Some(slope) });
    }

    let mask: Vec<f64> = analytic.atoms().iter().map(|&(k, _)| k).collect();
    let mask_radius = 2.0 * bandwidth + grid.step();
    let mut env = Envelope::new("bernoulli", Some(config.seed));
    env.set_param("p", p);
    env.set_param("half_width", half_width);
    env.set_param("bandwidth", bandwidth);
    env.set_param("atom_mask_radius", mask_radius);
    env.comparison = Some(Comparison {
        interval: (0.0, kmax),
        l1_distance: Some(masked_l1(
            &smoothed,
            analytic.ac_density(),
            0.0,
            kmax,
            &mask,
            mask_radius,
        )),
        sup_distance: None,
        atom_table,
    });
    env.push_series(Series::from_spectrum("analytic", &analytic));
    env.push_series(Series::from_density("empirical", &smoothed));
    Ok(env)
}

fn run_bernoullise(
    p: f64,
    window_log2: usize,
    bandwidth: f64,
    config: &RunConfig,
) -> Result<Envelope, CliError> {
    if window_log2 == 0 || window_log2 > 24 {
        return Err(invalid("word exponent must lie in 1..=24"));
    }
    let n = 1usize << window_log2;
    let base: Vec<i8> = (0..n as i64).map(rs_value).collect();
    let mut rng = RandomSource::new(config.seed).replica(0);
    let flipped = bernoullise(&base, p, &mut rng)?;
    let comb = signed_comb(&flipped)?;
    let grid = unit_grid(config.grid.unwrap_or(1024))?;
    let smoothed = estimate_density(&comb, &grid, bandwidth)?;
    let flat = EmpiricalDensity::from_fn(grid, |_| 1.0)?;

    let mut env = Envelope::new("bernoullise", Some(config.seed));
    env.set_param("p", p);
    env.set_param("window_log2", window_log2);
    env.set_param("bandwidth", bandwidth);
    env.set_param("entropy_nats", entropy(p));
    env.comparison = Some(Comparison {
        interval: (0.0, 1.0),
        l1_distance: Some(smoothed.l1_distance_on(&flat, 0.0, 1.0)?),
        sup_distance: Some(smoothed.sup_distance_to(0.0, 1.0, |_| 1.0)),
        atom_table: Vec::new(),
    });
    env.push_series(Series::from_density("analytic", &flat));
    env.push_series(Series::from_density("empirical", &smoothed));
    Ok(env)
}

fn run_dimer(window: usize, bandwidth: f64, config: &RunConfig) -> Result<Envelope, CliError> {
    if window < 8 || window > 1 << 22 {
        return Err(invalid("window must lie in 8..=2^22"));
    }
    let grid = unit_grid(config.grid.unwrap_or(1024))?;
    let mut rng = RandomSource::new(config.seed).replica(0);
    let word = dimer_sample(window, &mut rng)?;

    let comb = signed_comb(word.values())?;
    let smoothed = estimate_density(&comb, &grid, bandwidth)?;
    let analytic =
        dimer_analytic(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), &grid)?;

    let factor_signs = dimer_factor(&word)?;
    let fcomb = signed_comb(&factor_signs)?;
    let fsmoothed = estimate_density(&fcomb, &grid, bandwidth)?;
    let fanalytic = factor_analytic(&grid)?;

    let fsmall = signed_comb(&factor_signs[..factor_signs.len() / 2])?;
    let mut atom_table = Vec::new();
    for &(k, intensity) in fanalytic.atoms() {
        let slope = atom_slope_estimate(
            fsmall.volume(),
            point_density(&fsmall, k)?,
            fcomb.volume(),
            point_density(&fcomb, k)?,
        );
        atom_table.push(AtomRow { position: k, analytic: intensity, empirical: Some(slope) });
    }

    let mut env = Envelope::new("dimer", Some(config.seed));
    env.set_param("window", window);
    env.set_param("bandwidth", bandwidth);
    env.comparison = Some(Comparison {
        interval: (0.0, 1.0),
        l1_distance: Some(smoothed.l1_distance_on(analytic.ac_density(), 0.0, 1.0)?),
        sup_distance: None,
        atom_table,
    });
    env.push_series(Series::from_spectrum("dimer_analytic", &analytic));
    env.push_series(Series::from_density("dimer_empirical", &smoothed));
    env.push_series(Series::from_spectrum("factor_analytic", &fanalytic));
    env.push_series(Series::from_density("factor_empirical", &fsmoothed));
    Ok(env)
}

fn run_ledrappier(size: usize, max_lag: usize, config: &RunConfig) -> Result<Envelope, CliError> {
    let source = RandomSource::new(config.seed);
    let patch = ledrappier_sample(size, &mut source.replica(0))?;
    let three_point = three_point_average(patch.values(), size)?;
    let rows = row_average_autocorrelation(patch.values(), size, max_lag)?;

    let iid = iid_sign_field(size, &mut source.replica(1));
    let iid_three_point = three_point_average(&iid, size)?;
    let iid_rows = row_average_autocorrelation(&iid, size, max_lag)?;

    let lags: Vec<f64> = (0..rows.len()).map(|m| m as f64).collect();
    let mut env = Envelope::new("ledrappier", Some(config.seed));
    env.set_param("size", size);
    env.set_param("three_point", three_point);
    env.set_param("constraint_residual", (three_point - 1.0).abs());
    env.set_param("iid_three_point", iid_three_point);
    env.push_series(Series::curve("row_autocorr", lags.clone(), rows)?);
    env.push_series(Series::curve("iid_row_autocorr", lags, iid_rows)?);
    Ok(env)
}

fn run_gue(
    size: usize,
    samples: usize,
    bandwidth: f64,
    config: &RunConfig,
) -> Result<Envelope, CliError> {
    if size < 2 || samples == 0 {
        return Err(invalid("need a matrix dimension of at least 2 and one sample"));
    }
    let kmax = config.kmax.unwrap_or(2.0);
    let grid = span_grid(0.1, kmax, config.grid.unwrap_or(381))?;
    let ensemble = gue_ensemble(size, samples, &RandomSource::new(config.seed))?;
    let smoothed = smooth(&gue_diffraction_empirical(&ensemble, &grid)?, bandwidth)?;
    let analytic = EmpiricalDensity::from_fn(grid, gue_spectral_density)?;

    let mut env = Envelope::new("gue", Some(config.seed));
    env.set_param("size", size);
    env.set_param("samples", samples);
    env.set_param("bandwidth", bandwidth);
    env.comparison = Some(Comparison {
        interval: (0.1, kmax),
        l1_distance: Some(smoothed.l1_distance_on(&analytic, 0.1, kmax)?),
        sup_distance: Some(smoothed.sup_distance_to(0.1, kmax, gue_spectral_density)),
        atom_table: Vec::new(),
    });
    env.push_series(Series::from_density("analytic", &analytic));
    env.push_series(Series::from_density("empirical", &smoothed));
    Ok(env)
}

fn run_renewal(
    dist_spec: &str,
    length: f64,
    bandwidth: f64,
    config: &RunConfig,
) -> Result<Envelope, CliError> {
    let dist = WaitingTime::parse(dist_spec)?;
    let kmax = config.kmax.unwrap_or(3.0);
    let grid = span_grid(0.1, kmax, config.grid.unwrap_or(581))?;

    let diffraction = renewal_diffraction(&dist, &grid)?;
    let mut env = Envelope::new("renewal", Some(config.seed));
    for k in &diffraction.flagged {
        env.push_warning(format!(
            "closed form degenerates at k = {k}; the mass there is reported as an atom"
        ));
    }

    if !(bandwidth > 0.0) || bandwidth > 2.0 {
        return Err(invalid("bandwidth must lie in (0, 2]"));
    }
    let (max_lag, lag_bin) = renewal_lag_layout(&dist, (2.0 / bandwidth).min(length / 5.0));
    let mut rng = RandomSource::new(config.seed).replica(0);
    let realization = renewal_sample(&dist, length, DEFAULT_BURN_IN_GAPS, &mut rng)?;
    let comb = realization.to_comb()?;
    let estimate = lag_density_estimate(&comb, &grid, max_lag, lag_bin)?;
    // Same binning and taper on the analytic side, so the comparison sees
    // sampling noise only.
    let rho = dist.intensity();
    let analytic_est = pair_transform(
        &renewal_autocorr_binned(&dist, max_lag, lag_bin)?,
        rho * rho,
        &grid,
    )?;

    match renewal_relation_residual(&dist, 12.0, 2400) {
        Ok(residual) => env.set_param("fixed_point_residual", residual),
        Err(e) => env.push_warning(format!("fixed-point residual unavailable: {e}")),
    }

    let atom_table = diffraction
        .spectrum
        .atoms()
        .iter()
        .map(|&(k, intensity)| AtomRow { position: k, analytic: intensity, empirical: None })
        .collect();

    let mask: Vec<f64> = diffraction.spectrum.atoms().iter().map(|&(k, _)| k).collect();
    let mask_radius = 3.0 / max_lag;
    env.set_param("dist", dist.name());
    env.set_param("length", length);
    env.set_param("intensity", rho);
    env.set_param("empirical_intensity", realization.empirical_intensity());
    env.set_param("lag_cap", max_lag);
    env.set_param("lag_bin", lag_bin);
    env.set_param("atom_mask_radius", mask_radius);
    env.comparison = Some(Comparison {
        interval: (0.1, kmax),
        l1_distance: Some(masked_l1(&estimate, &analytic_est, 0.1, kmax, &mask, mask_radius)),
        sup_distance: None,
        atom_table,
    });
    env.push_series(Series::from_spectrum("analytic", &diffraction.spectrum));
    env.push_series(Series::from_density("empirical", &estimate));
    Ok(env)
}

fn run_fibonacci(
    mode: ChainMode,
    steps: usize,
    tiles: &str,
    clip: Option<f64>,
    bandwidth: f64,
    config: &RunConfig,
) -> Result<Envelope, CliError> {
    let kmax = config.kmax.unwrap_or(3.0);
    let grid = span_grid(0.05, kmax, config.grid.unwrap_or(600))?;
    let clip_values = |d: &EmpiricalDensity| match clip {
        Some(cap) => d.map_values(|v| v.min(cap)),
        None => d.clone(),
    };

    match mode {
        ChainMode::Perfect => {
            if !(4..=32).contains(&steps) {
                return Err(invalid("steps must lie in 4..=32"));
            }
            let chain = FibonacciChain::new(steps)?;
            let comb = chain.to_comb()?;
            if !(bandwidth > 0.0) || bandwidth > 2.0 {
                return Err(invalid("bandwidth must lie in (0, 2]"));
            }
            let max_lag = (2.0 / bandwidth).min(0.45 * comb.volume());
            let estimate = lag_density_estimate(&comb, &grid, max_lag, 0.02)?;

            let mut atoms: Vec<(f64, f64)> = Vec::new();
            for a in -8..=8i64 {
                for b in -8..=8i64 {
                    let (k, intensity) = fibonacci_bragg(a, b);
                    if (0.0..=kmax).contains(&k) && intensity > 1e-4 {
                        atoms.push((k, intensity));
                    }
                }
            }
            atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
            atoms.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-9);

            // Strongest peaks checked by periodogram growth across two
            // chain generations.
            let small = FibonacciChain::new(steps - 2)?.to_comb()?;
            let mut strongest: Vec<(f64, f64)> =
                atoms.iter().copied().filter(|&(_, i)| i >= 0.02).collect();
            strongest.sort_by(|x, y| y.1.total_cmp(&x.1));
            strongest.truncate(8);
            strongest.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut atom_table = Vec::new();
            for (k, intensity) in strongest {
                let slope = atom_slope_estimate(
                    small.volume(),
                    point_density(&small, k)?,
                    comb.volume(),
                    point_density(&comb, k)?,
                );
                atom_table.push(AtomRow { position: k, analytic: intensity, empirical: Some(slope) });
            }

            let mut env = Envelope::new("fibonacci", None);
            env.set_param("mode", "perfect");
            env.set_param("steps", steps);
            env.set_param("point_count", chain.point_count());
            env.set_param("density", chain.density());
            env.set_param("lag_cap", max_lag);
            if let Some(cap) = clip {
                env.set_param("clip", cap);
            }
            env.comparison = Some(Comparison {
                interval: (0.0, kmax),
                l1_distance: None,
                sup_distance: None,
                atom_table,
            });
            env.push_series(Series::curve("bragg", Vec::new(), Vec::new())?.with_atoms(atoms));
            env.push_series(Series::from_density("empirical", &clip_values(&estimate)));
            Ok(env)
        }
        ChainMode::Random => {
            let count: f64 = tiles
                .parse()
                .map_err(|_| invalid(format!("tile count {tiles:?} is not numeric")))?;
            if !count.is_finite() || !(100.0..=1e8).contains(&count) {
                return Err(invalid("tile count must lie in 100..=1e8"));
            }
            if !(bandwidth > 0.0) || bandwidth > 2.0 {
                return Err(invalid("bandwidth must lie in (0, 2]"));
            }
            let law = WaitingTime::fibonacci_tiling();
            let length = count * law.mean();
            let max_lag = (2.0 / bandwidth).min(length / 5.0);
            let source = RandomSource::new(config.seed);
            let realization = renewal_sample(&law, length, DEFAULT_BURN_IN_GAPS, &mut source.replica(0))?;
            let comb = realization.to_comb()?;
            // The tiling lags form a quasi-lattice, so the histogram needs
            // fine bins to keep the atoms coherent; the cell-averaged
            // spectrum then resolves the sharp quasi-Bragg ridges.
            let pairs = pair_correlation(&comb, max_lag, 0.001)?;
            let mean_w = comb.weights().iter().sum::<Complex64>() / comb.volume();
            let estimate = binned_pair_spectrum(&pairs, mean_w.norm_sqr(), &grid, 10)?;
            let rho = law.intensity();
            let analytic_est = binned_pair_spectrum(
                &renewal_autocorr_binned(&law, max_lag, 0.001)?,
                rho * rho,
                &grid,
                10,
            )?;

            let mut env = Envelope::new("fibonacci", Some(config.seed));
            let mut values = Vec::with_capacity(grid.len());
            for k in grid.iter() {
                match fibonacci_tiling_density(k) {
                    Ok(v) => values.push(v),
                    Err(e) => {
                        env.push_warning(format!("analytic density skipped: {e}"));
                        values.push(0.0);
                    }
                }
            }
            let analytic = EmpiricalDensity::new(grid.clone(), values, 0.0)?;

            // Central peak mass from growth between this window and one
            // twice as long.
            let tau = GOLDEN_RATIO;
            let double =
                renewal_sample(&law, 2.0 * length, DEFAULT_BURN_IN_GAPS, &mut source.replica(1))?
                    .to_comb()?;
            let central = atom_slope_estimate(
                comb.volume(),
                point_density(&comb, 0.0)?,
                double.volume(),
                point_density(&double, 0.0)?,
            );
            let atom_table = vec![AtomRow {
                position: 0.0,
                analytic: (tau + 1.0) / 5.0,
                empirical: Some(central),
            }];

            env.set_param("mode", "random");
            env.set_param("tiles", count);
            env.set_param("length", length);
            env.set_param("intensity", rho);
            env.set_param("empirical_intensity", realization.empirical_intensity());
            env.set_param("lag_cap", max_lag);
            if let Some(cap) = clip {
                env.set_param("clip", cap);
            }
            env.comparison = Some(Comparison {
                interval: (0.05, kmax),
                l1_distance: Some(estimate.l1_distance_on(&analytic_est, 0.05, kmax)?),
                sup_distance: None,
                atom_table,
            });
            env.push_series(Series::from_density("analytic", &clip_values(&analytic)));
            env.push_series(Series::from_density("empirical", &clip_values(&estimate)));
            Ok(env)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_palm(
    ground_spec: &str,
    marks_spec: &str,
    runs: usize,
    radius: f64,
    base: f64,
    max_dist: f64,
    bin: f64,
    model_path: Option<&Path>,
    config: &RunConfig,
) -> Result<Envelope, CliError> {
    let (ground_spec, marks_spec, seed) = match model_path {
        Some(path) => {
            let (g, m, s) = read_model_file(path)?;
            (g, m, s.unwrap_or(config.seed))
        }
        None => (ground_spec.to_string(), marks_spec.to_string(), config.seed),
    };
    let ground = GroundProcess::parse(&ground_spec)?;
    let marks = MarkLaw::parse(&marks_spec)?;
    if runs == 0 {
        return Err(invalid("need at least one run"));
    }
    if !(base > 0.0) || base + max_dist > radius {
        return Err(invalid("base window plus lag range must fit inside the sampling radius"));
    }

    let model = MarkedProcessModel::new(ground, marks);
    let source = RandomSource::new(seed);
    let ensemble = sample_ensemble(&model, runs, radius, &source)?;

    let autocorr = average_autocorr(&ensemble, base, max_dist, bin)?;
    let palm = palm_intensity_estimate(&ensemble, base, max_dist, bin)?;
    let rho_hat = ensemble
        .iter()
        .map(|c| {
            c.positions()
                .iter()
                .zip(c.weights())
                .filter(|&(&x, _)| x.abs() <= base)
                .map(|(_, w)| w.norm())
                .sum::<f64>()
        })
        .sum::<f64>()
        / (runs as f64 * 2.0 * base);
    let palm_scaled = palm.scaled(rho_hat);

    let direct = empirical_autocorr(&ensemble[0], base, max_dist, bin)?;
    let alt = empirical_autocorr_alt(&ensemble[0], base, max_dist, bin)?;
    let conj_defect = direct
        .values()
        .iter()
        .zip(alt.values())
        .map(|(a, b)| (a - b.conj()).norm())
        .fold((direct.atom0 - alt.atom0.conj()).norm(), f64::max);
    let boundary_defect = boundary_term_check(&ensemble[0], radius / 4.0, max_dist)?;

    let mut env = Envelope::new("palm", Some(seed));
    let mut atom_table = Vec::new();
    if let GroundProcess::Poisson { rate } = model.ground {
        let analytic = marked_poisson_autocorr(rate, &model.marks, max_dist, bin)?;
        atom_table.push(AtomRow {
            position: 0.0,
            analytic: analytic.atom0.re,
            empirical: Some(autocorr.atom0.re),
        });
        env.push_series(series_re("analytic_re", &analytic)?);
    }

    env.set_param("ground", model.ground.name());
    env.set_param("marks", model.marks.name());
    env.set_param("runs", runs);
    env.set_param("radius", radius);
    env.set_param("base", base);
    env.set_param("bin", bin);
    env.set_param("rho_hat", rho_hat);
    env.set_param("conjugation_defect", conj_defect);
    env.set_param("boundary_defect", boundary_defect);
    env.comparison = Some(Comparison {
        interval: (-max_dist, max_dist),
        l1_distance: Some(autocorr.l1_distance_on(&palm_scaled, -max_dist, max_dist)?),
        sup_distance: None,
        atom_table,
    });
    env.push_series(series_re("autocorr_re", &autocorr)?);
    env.push_series(series_im("autocorr_im", &autocorr)?);
    env.push_series(series_re("palm_re", &palm_scaled)?);
    env.push_series(series_im("palm_im", &palm_scaled)?);
    Ok(env)
}

fn read_model_file(path: &Path) -> Result<(String, String, Option<u64>), CliError> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| invalid(format!("model file is not JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| invalid("model file must hold a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "ground" | "marks" | "seed") {
            return Err(invalid(format!("unknown model key {key:?}")));
        }
    }
    let field = |name: &str| {
        obj.get(name)
            .and_then(|v| v.as_str())
            .map(str::to_string)
            .ok_or_else(|| invalid(format!("model file needs a string field {name:?}")))
    };
    let seed = match obj.get("seed") {
        None => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| invalid("seed must be a nonnegative integer"))?),
    };
    Ok((field("ground")?, field("marks")?, seed))
}
