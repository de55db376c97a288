//! Stationary renewal point processes on the half-line: waiting-time laws,
//! the convolution-series renewal measure, the closed-form spectral
//! density, and the golden-mean random tiling as a two-atom waiting law.

use crate::comb::{EmpiricalDensity, KGrid, PairCorrelation, SpectralMeasure, WeightedComb};
use crate::error::{invalid, Error, Result};
use crate::substitution::GOLDEN_RATIO;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use statrs::distribution::{Continuous, ContinuousCDF};
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

pub const DEFAULT_BURN_IN_GAPS: usize = 1000;

const SERIES_MASS_CUTOFF: f64 = 1e-8;

/// Positive waiting-time law driving a renewal process. The shipped laws
/// cover the absolutely continuous mean-one interpolation family, a pure
/// lattice, and the two-length tiling law.
#[derive(Debug, Clone, PartialEq)]
pub enum WaitingTime {
    /// Shape a with rate a, so the mean is one for every a; a = 1 is the
    /// exponential law.
    Gamma { shape: f64 },
    /// All mass on a single positive gap.
    PointMass { gap: f64 },
    /// Gaps tau (probability 1/tau) and 1 (probability 1/tau^2): the
    /// golden-mean random tiling's interval process.
    FibonacciTiling,
}

impl WaitingTime {
    pub fn gamma(shape: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(invalid("gamma shape must be positive"));
        }
        Ok(WaitingTime::Gamma { shape })
    }

    pub fn point_mass(gap: f64) -> Result<Self> {
        if !(gap > 0.0) || !gap.is_finite() {
            return Err(invalid("point-mass gap must be positive"));
        }
        Ok(WaitingTime::PointMass { gap })
    }

    pub fn fibonacci_tiling() -> Self {
        WaitingTime::FibonacciTiling
    }

    /// Registry lookup: "gamma:SHAPE", "exp", "point", "point:GAP",
    /// "fib-rt".
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (spec, None),
        };
        let number = |p: Option<&str>| -> Result<Option<f64>> {
            match p {
                None => Ok(None),
                Some(s) => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| invalid(format!("bad numeric parameter {s:?}"))),
            }
        };
        match name {
            "gamma" => match number(param)? {
                Some(a) => WaitingTime::gamma(a),
                None => Err(invalid("gamma needs a shape, e.g. gamma:5")),
            },
            "exp" => WaitingTime::gamma(1.0),
            "point" => WaitingTime::point_mass(number(param)?.unwrap_or(1.0)),
            "fib-rt" => Ok(WaitingTime::fibonacci_tiling()),
            other => Err(invalid(format!(
                "unknown waiting-time law {other:?}; known: gamma:SHAPE, exp, point[:GAP], fib-rt"
            ))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            WaitingTime::Gamma { shape } => format!("gamma:{shape}"),
            WaitingTime::PointMass { gap } => format!("point:{gap}"),
            WaitingTime::FibonacciTiling => "fib-rt".into(),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            WaitingTime::Gamma { .. } => 1.0,
            WaitingTime::PointMass { gap } => *gap,
            WaitingTime::FibonacciTiling => 1.0 + GOLDEN_RATIO.powi(-2),
        }
    }

    /// Point density of the stationary process: one over the mean gap.
    pub fn intensity(&self) -> f64 {
        1.0 / self.mean()
    }

    /// Transform integral exp(-2 pi i k x) against the law.
    pub fn fourier(&self, k: f64) -> Complex64 {
        match self {
            WaitingTime::Gamma { shape } => {
                Complex64::new(1.0, TAU * k / shape).powf(-shape)
            }
            WaitingTime::PointMass { gap } => Complex64::from_polar(1.0, -TAU * k * gap),
            WaitingTime::FibonacciTiling => {
                let tau = GOLDEN_RATIO;
                Complex64::from_polar(1.0 / tau, -TAU * k * tau)
                    + Complex64::from_polar(tau.powi(-2), -TAU * k)
            }
        }
    }

    /// Spacing b of the coarsest lattice containing the support, when one
    /// exists. The two-length law has none: tau is irrational.
    pub fn lattice(&self) -> Option<f64> {
        match self {
            WaitingTime::PointMass { gap } => Some(*gap),
            _ => None,
        }
    }

    /// Gap lengths with probabilities, for purely atomic laws.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            WaitingTime::Gamma { .. } => None,
            WaitingTime::PointMass { gap } => Some(vec![(*gap, 1.0)]),
            WaitingTime::FibonacciTiling => {
                let tau = GOLDEN_RATIO;
                Some(vec![(1.0, tau.powi(-2)), (tau, 1.0 / tau)])
            }
        }
    }

    /// Density at x >= 0 for absolutely continuous laws.
    pub fn density(&self, x: f64) -> Option<f64> {
        match self {
            WaitingTime::Gamma { shape } => {
                if x == 0.0 {
                    return Some(match shape {
                        a if *a > 1.0 => 0.0,
                        a if *a == 1.0 => 1.0,
                        _ => f64::INFINITY,
                    });
                }
                let g = statrs::distribution::Gamma::new(*shape, *shape).unwrap();
                Some(g.pdf(x))
            }
            _ => None,
        }
    }

    pub fn sample_gap(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            WaitingTime::Gamma { shape } => {
                let g = rand_distr::Gamma::new(*shape, 1.0 / shape).unwrap();
                g.sample(rng)
            }
            WaitingTime::PointMass { gap } => *gap,
            WaitingTime::FibonacciTiling => {
                let tau = GOLDEN_RATIO;
                if rng.gen_bool(1.0 / tau) {
                    tau
                } else {
                    1.0
                }
            }
        }
    }
}

/// One sampled window (0, length] of the point process.
#[derive(Debug, Clone)]
pub struct RenewalRealization {
    points: Vec<f64>,
    length: f64,
}

impl RenewalRealization {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn empirical_intensity(&self) -> f64 {
        self.points.len() as f64 / self.length
    }

    /// Window recentred at the origin, unit weights.
    pub fn to_comb(&self) -> Result<WeightedComb> {
        let half = self.length / 2.0;
        WeightedComb::unit(self.points.iter().map(|x| x - half).collect(), half)
    }
}

/// Walk the cumulative sums from far left of the origin so the window is
/// approximately stationary, keeping the points that land in (0, length].
pub fn renewal_sample(
    dist: &WaitingTime,
    length: f64,
    burn_in_gaps: usize,
    rng: &mut ChaCha8Rng,
) -> Result<RenewalRealization> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(invalid("window length must be positive"));
    }
    let mut s = -(burn_in_gaps as f64) * dist.mean();
    let mut points = Vec::with_capacity((length * dist.intensity() * 1.1) as usize + 16);
    loop {
        let gap = dist.sample_gap(rng);
        if !(gap > 0.0) || !gap.is_finite() {
            return Err(Error::Model("waiting-time sampler returned a nonpositive gap".into()));
        }
        s += gap;
        if s > length {
            break;
        }
        if s > 0.0 {
            points.push(s);
        }
    }
    Ok(RenewalRealization { points, length })
}

/// Expected-points measure as the truncated series of self-convolutions.
#[derive(Debug, Clone)]
pub enum RenewalContent {
    /// Density values on a uniform grid starting one step after 0.
    Density(EmpiricalDensity),
    /// Sorted (position, mass) pairs.
    Atoms(Vec<(f64, f64)>),
}

#[derive(Debug, Clone)]
pub struct RenewalSeries {
    pub content: RenewalContent,
    pub x_max: f64,
    pub terms_used: usize,
    /// Window mass of the first dropped term; later terms shrink
    /// superexponentially, so this bounds the truncation scale.
    pub tail_mass: f64,
    pub converged: bool,
}

/// n-fold convolution powers of the gamma law share its rate while shapes
/// add, so each series term is available in closed form.
struct GammaSeries {
    terms: Vec<statrs::distribution::Gamma>,
    tail_mass: f64,
    converged: bool,
}

fn gamma_series(shape: f64, x_max: f64) -> GammaSeries {
    let mut terms = Vec::new();
    let cap = (2.0 * x_max) as usize + 200;
    let mut tail_mass = 0.0;
    let mut converged = false;
    for n in 1..=cap {
        let g = statrs::distribution::Gamma::new(n as f64 * shape, shape).unwrap();
        let mass = g.cdf(x_max);
        if mass < SERIES_MASS_CUTOFF {
            tail_mass = mass;
            converged = true;
            break;
        }
        terms.push(g);
    }
    GammaSeries { terms, tail_mass, converged }
}

impl GammaSeries {
    fn density_at(&self, x: f64) -> f64 {
        // pdf() overflows for shape parameters in the hundreds even where the
        // density itself is tiny; the log form stays finite.
        self.terms.iter().map(|g| g.ln_pdf(x).exp()).sum()
    }
}

/// Atom positions of n-fold convolutions of a one- or two-length law,
/// keyed exactly by gap counts so irrational positions never smear.
fn atomic_series(gaps: &[(f64, f64)], x_max: f64) -> (BTreeMap<(u32, u32), f64>, usize) {
    let (len0, p0) = gaps[0];
    let (len1, p1) = if gaps.len() > 1 { gaps[1] } else { (1.0, 0.0) };
    let position = |&(i, j): &(u32, u32)| i as f64 * len0 + j as f64 * len1;
    let mut total: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let mut level: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    if p0 > 0.0 {
        level.insert((1, 0), p0);
    }
    if p1 > 0.0 {
        level.insert((0, 1), p1);
    }
    let mut terms = 0;
    while !level.is_empty() {
        terms += 1;
        for (key, mass) in &level {
            *total.entry(*key).or_insert(0.0) += mass;
        }
        let mut next: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for (&(i, j), &mass) in &level {
            if p0 > 0.0 && position(&(i + 1, j)) <= x_max {
                *next.entry((i + 1, j)).or_insert(0.0) += mass * p0;
            }
            if p1 > 0.0 && position(&(i, j + 1)) <= x_max {
                *next.entry((i, j + 1)).or_insert(0.0) += mass * p1;
            }
        }
        level = next;
    }
    (total, terms)
}

fn atoms_to_list(map: &BTreeMap<(u32, u32), f64>, gaps: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let (len0, _) = gaps[0];
    let len1 = if gaps.len() > 1 { gaps[1].0 } else { 1.0 };
    let mut out: Vec<(f64, f64)> = map
        .iter()
        .map(|(&(i, j), &m)| (i as f64 * len0 + j as f64 * len1, m))
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

pub fn renewal_measure(dist: &WaitingTime, x_max: f64, grid_len: usize) -> Result<RenewalSeries> {
    if !(x_max > 0.0) || grid_len == 0 {
        return Err(invalid("need a positive window and a nonempty grid"));
    }
    match dist {
        WaitingTime::Gamma { shape } => {
            let series = gamma_series(*shape, x_max);
            let step = x_max / grid_len as f64;
            let grid = KGrid::new(step, step, grid_len)?;
            let values: Vec<f64> = grid.iter().map(|x| series.density_at(x)).collect();
            Ok(RenewalSeries {
                content: RenewalContent::Density(EmpiricalDensity::new(grid, values, 0.0)?),
                x_max,
                terms_used: series.terms.len(),
                tail_mass: series.tail_mass,
                converged: series.converged,
            })
        }
        _ => {
            let gaps = dist.atoms().expect("non-gamma laws are atomic");
            let (map, terms) = atomic_series(&gaps, x_max);
            Ok(RenewalSeries {
                content: RenewalContent::Atoms(atoms_to_list(&map, &gaps)),
                x_max,
                terms_used: terms,
                // positions only grow along the series, so the cut is exact
                tail_mass: 0.0,
                converged: true,
            })
        }
    }
}

/// L1 defect of the fixed-point identity: the expected-points measure
/// minus one waiting time minus the law convolved with the measure, over
/// [0, 0.8 x_max]. Atomic laws cancel exactly; continuous laws are checked
/// by independent trapezoid convolution on the same grid.
pub fn renewal_relation_residual(dist: &WaitingTime, x_max: f64, grid_len: usize) -> Result<f64> {
    match dist {
        WaitingTime::Gamma { shape } => {
            if *shape < 1.0 {
                return Err(invalid("residual quadrature needs a bounded density"));
            }
            let series = gamma_series(*shape, x_max);
            let h = x_max / grid_len as f64;
            let mu: Vec<f64> = (0..=grid_len)
                .map(|j| dist.density(j as f64 * h).unwrap())
                .collect();
            // At the origin only the first convolution power survives, so the
            // renewal density starts where the gap density does.
            let nu: Vec<f64> = (0..=grid_len)
                .map(|j| if j == 0 { mu[0] } else { series.density_at(j as f64 * h) })
                .collect();
            let top = (0.8 * grid_len as f64) as usize;
            let sum: f64 = (1..=top)
                .into_par_iter()
                .map(|j| {
                    let mut conv = 0.5 * (mu[0] * nu[j] + mu[j] * nu[0]);
                    for l in 1..j {
                        conv += mu[l] * nu[j - l];
                    }
                    conv *= h;
                    (nu[j] - mu[j] - conv).abs()
                })
                .sum();
            Ok(sum * h)
        }
        _ => {
            let gaps = dist.atoms().expect("non-gamma laws are atomic");
            let (nu, _) = atomic_series(&gaps, x_max);
            let (len0, p0) = gaps[0];
            let (len1, p1) = if gaps.len() > 1 { gaps[1] } else { (1.0, 0.0) };
            let position = |&(i, j): &(u32, u32)| i as f64 * len0 + j as f64 * len1;
            let mut conv: BTreeMap<(u32, u32), f64> = BTreeMap::new();
            for (&(i, j), &mass) in &nu {
                if p0 > 0.0 {
                    *conv.entry((i + 1, j)).or_insert(0.0) += mass * p0;
                }
                if p1 > 0.0 {
                    *conv.entry((i, j + 1)).or_insert(0.0) += mass * p1;
                }
            }
            let mut keys: Vec<(u32, u32)> = nu.keys().chain(conv.keys()).cloned().collect();
            keys.sort();
            keys.dedup();
            let cut = 0.8 * x_max;
            let mut sum = 0.0;
            for key in keys {
                if position(&key) > cut {
                    continue;
                }
                let mu_mass = if key == (1, 0) {
                    p0
                } else if key == (0, 1) {
                    p1
                } else {
                    0.0
                };
                let total = nu.get(&key).copied().unwrap_or(0.0);
                let conv_mass = conv.get(&key).copied().unwrap_or(0.0);
                sum += (total - mu_mass - conv_mass).abs();
            }
            Ok(sum)
        }
    }
}

/// Pair correlation of the stationary process, binned on the same grid the
/// empirical pair histogram uses: atom intensity/mean at lag 0, density
/// intensity * (series + mirror) elsewhere.
pub fn renewal_autocorr_binned(
    dist: &WaitingTime,
    max_dist: f64,
    bin_width: f64,
) -> Result<PairCorrelation> {
    let grid = crate::comb::pair_grid(max_dist, bin_width)?;
    let rho = dist.intensity();
    let bw = grid.step();
    let nbins = grid.len();
    let mut values = vec![0.0; nbins];
    // Positive-lag bin masses; the histogram is symmetric by construction.
    let center = (nbins - 1) / 2;
    match dist {
        WaitingTime::Gamma { shape } => {
            let series = gamma_series(*shape, max_dist + bw);
            let sub = 64;
            for b in center..nbins {
                let lo = if b == center { 0.0 } else { grid.value(b) - 0.5 * bw };
                let hi = grid.value(b) + 0.5 * bw;
                let mass: f64 = (0..sub)
                    .map(|s| {
                        let x = lo + (s as f64 + 0.5) * (hi - lo) / sub as f64;
                        series.density_at(x)
                    })
                    .sum::<f64>()
                    * (hi - lo)
                    / sub as f64;
                let doubled = if b == center { 2.0 } else { 1.0 };
                values[b] = rho * doubled * mass / bw;
                values[nbins - 1 - b] = values[b];
            }
        }
        _ => {
            let gaps = dist.atoms().expect("non-gamma laws are atomic");
            let (map, _) = atomic_series(&gaps, max_dist + bw);
            for (pos, mass) in atoms_to_list(&map, &gaps) {
                let idx = ((pos + max_dist) / bw) as usize;
                if idx >= nbins {
                    continue;
                }
                values[idx] += rho * mass / bw;
                values[nbins - 1 - idx] += rho * mass / bw;
            }
        }
    }
    Ok(PairCorrelation {
        atom0: rho,
        density: EmpiricalDensity::new(grid, values, 0.0)?,
    })
}

/// Diffraction of the renewal process from the waiting-time transform
/// alone: point part intensity^2 on the dual of the coarsest lattice (just
/// the origin for non-lattice laws), continuous part
/// intensity (1 - |transform|^2) / |1 - transform|^2.
#[derive(Debug, Clone)]
pub struct DiffractionResult {
    pub spectrum: SpectralMeasure,
    /// Grid points where 1 - transform vanished to machine precision; the
    /// density value there is a placeholder zero, the mass sits in atoms.
    pub flagged: Vec<f64>,
}

pub fn renewal_diffraction(dist: &WaitingTime, grid: &KGrid) -> Result<DiffractionResult> {
    let rho = dist.intensity();
    let mut flagged = Vec::new();
    let mut values = Vec::with_capacity(grid.len());
    for k in grid.iter() {
        let mu = dist.fourier(k);
        let one_minus = Complex64::new(1.0, 0.0) - mu;
        if one_minus.norm() < 1e-12 {
            flagged.push(k);
            values.push(0.0);
        } else {
            values.push(rho * (1.0 - mu.norm_sqr()) / one_minus.norm_sqr());
        }
    }
    let lo = grid.start().min(0.0);
    let hi = grid.value(grid.len() - 1).max(0.0);
    let atoms: Vec<(f64, f64)> = match dist.lattice() {
        None => vec![(0.0, rho * rho)],
        Some(b) => {
            let spacing = 1.0 / b;
            let first = (lo / spacing).ceil() as i64;
            let last = (hi / spacing).floor() as i64;
            (first..=last).map(|j| (j as f64 * spacing, rho * rho)).collect()
        }
    };
    let density = EmpiricalDensity::new(grid.clone(), values, 0.0)?;
    let spectrum = SpectralMeasure::new(format!("renewal {}", dist.name()), atoms, density)?;
    Ok(DiffractionResult { spectrum, flagged })
}

/// Closed form for the continuous diffraction density of the golden-mean
/// random tiling. Agrees with the renewal route wherever the denominator
/// is away from zero.
pub fn fibonacci_tiling_density(k: f64) -> Result<f64> {
    let tau = GOLDEN_RATIO;
    let s_quot = (PI * k / tau).sin();
    let s_tau = (PI * k * tau).sin();
    let s_one = (PI * k).sin();
    let denom = tau * tau * s_tau * s_tau + tau * s_one * s_one - s_quot * s_quot;
    if denom.abs() < 1e-14 {
        return Err(Error::SingularPoint(k));
    }
    Ok((tau + 2.0) / 5.0 * s_quot * s_quot / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::RandomSource;

    #[test]
    fn registry_roundtrip_and_rejections() {
        assert_eq!(WaitingTime::parse("gamma:5").unwrap().name(), "gamma:5");
        assert_eq!(WaitingTime::parse("exp").unwrap(), WaitingTime::Gamma { shape: 1.0 });
        assert_eq!(WaitingTime::parse("point").unwrap().name(), "point:1");
        assert_eq!(WaitingTime::parse("point:2.5").unwrap().lattice(), Some(2.5));
        assert_eq!(WaitingTime::parse("fib-rt").unwrap(), WaitingTime::FibonacciTiling);
        assert!(WaitingTime::parse("gamma:0").is_err());
        assert!(WaitingTime::parse("gamma:-2").is_err());
        assert!(WaitingTime::parse("gamma").is_err());
        assert!(WaitingTime::parse("cauchy").is_err());
    }

    #[test]
    fn transform_normalisation_and_bound() {
        for dist in [
            WaitingTime::gamma(1.0).unwrap(),
            WaitingTime::gamma(5.0).unwrap(),
            WaitingTime::point_mass(1.0).unwrap(),
            WaitingTime::fibonacci_tiling(),
        ] {
            assert!((dist.fourier(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
            for j in 1..60 {
                let k = j as f64 * 0.11;
                assert!(dist.fourier(k).norm() <= 1.0 + 1e-12, "{} at {k}", dist.name());
            }
        }
    }

    #[test]
    fn gamma_transform_matches_quadrature() {
        let dist = WaitingTime::gamma(2.0).unwrap();
        let k = 0.3;
        let step = 0.002;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut x = step;
        while x < 40.0 {
            let phase = Complex64::from_polar(1.0, -TAU * k * x);
            acc += dist.density(x).unwrap() * phase * step;
            x += step;
        }
        assert!((acc - dist.fourier(k)).norm() < 1e-5);
    }

    #[test]
    fn means_analytic_and_empirical() {
        let src = RandomSource::new(21);
        for dist in [
            WaitingTime::gamma(2.0).unwrap(),
            WaitingTime::gamma(5.0).unwrap(),
            WaitingTime::fibonacci_tiling(),
        ] {
            let mut rng = src.master();
            let n = 100_000;
            let sum: f64 = (0..n).map(|_| dist.sample_gap(&mut rng)).sum();
            let mean = sum / n as f64;
            assert!(
                (mean - dist.mean()).abs() < 0.01 * dist.mean(),
                "{}: {mean} vs {}",
                dist.name(),
                dist.mean()
            );
        }
        let tau = GOLDEN_RATIO;
        let fib = WaitingTime::fibonacci_tiling();
        assert!((fib.mean() - (tau * tau + 1.0) / (tau * tau)).abs() < 1e-14);
        assert!((fib.intensity() - (tau + 2.0) / 5.0).abs() < 1e-14);
    }

    #[test]
    fn gap_variance_tracks_shape() {
        let src = RandomSource::new(22);
        let dist = WaitingTime::gamma(5.0).unwrap();
        let mut rng = src.master();
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| dist.sample_gap(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!((var - 0.2).abs() < 0.01, "{var}");
    }

    #[test]
    fn point_mass_walk_is_the_shifted_lattice() {
        let src = RandomSource::new(23);
        let dist = WaitingTime::point_mass(1.0).unwrap();
        let run = renewal_sample(&dist, 100.0, DEFAULT_BURN_IN_GAPS, &mut src.master()).unwrap();
        let expect: Vec<f64> = (1..=100).map(|j| j as f64).collect();
        assert_eq!(run.points(), expect.as_slice());
    }

    #[test]
    fn exponential_counts_are_poisson_like() {
        let src = RandomSource::new(24);
        let dist = WaitingTime::gamma(1.0).unwrap();
        let run = renewal_sample(&dist, 1e4, DEFAULT_BURN_IN_GAPS, &mut src.master()).unwrap();
        let count = run.points().len() as f64;
        assert!((count - 1e4).abs() < 400.0, "{count}");
    }

    #[test]
    fn tiling_sampler_hits_unit_density_scaled() {
        let src = RandomSource::new(25);
        let dist = WaitingTime::fibonacci_tiling();
        let run = renewal_sample(&dist, 2e4, DEFAULT_BURN_IN_GAPS, &mut src.master()).unwrap();
        let rho = run.empirical_intensity();
        assert!((rho - dist.intensity()).abs() < 0.02 * dist.intensity(), "{rho}");
        // long gaps appear tau times as often as short ones
        let gaps: Vec<f64> = run.points().windows(2).map(|p| p[1] - p[0]).collect();
        let long = gaps.iter().filter(|&&g| g > 1.3).count() as f64;
        let short = gaps.len() as f64 - long;
        assert!((long / short - GOLDEN_RATIO).abs() < 0.05, "{}", long / short);
    }

    #[test]
    fn series_is_flat_for_the_exponential_law() {
        let series = renewal_measure(&WaitingTime::gamma(1.0).unwrap(), 10.0, 1000).unwrap();
        assert!(series.converged);
        match &series.content {
            RenewalContent::Density(d) => {
                for (i, k) in d.grid().iter().enumerate() {
                    assert!((d.value(i) - 1.0).abs() < 1e-6, "x = {k}");
                }
            }
            _ => panic!("expected a density"),
        }
    }

    #[test]
    fn series_for_a_point_mass_is_the_comb() {
        let series = renewal_measure(&WaitingTime::point_mass(1.0).unwrap(), 10.5, 10).unwrap();
        match &series.content {
            RenewalContent::Atoms(atoms) => {
                assert_eq!(atoms.len(), 10);
                for (j, &(pos, mass)) in atoms.iter().enumerate() {
                    assert_eq!(pos, (j + 1) as f64);
                    assert!((mass - 1.0).abs() < 1e-12);
                }
            }
            _ => panic!("expected atoms"),
        }
    }

    #[test]
    fn tiling_series_masses_are_path_counts() {
        let tau = GOLDEN_RATIO;
        let p_long = 1.0 / tau;
        let p_short = tau.powi(-2);
        let series = renewal_measure(&WaitingTime::fibonacci_tiling(), 4.0, 10).unwrap();
        let atoms = match &series.content {
            RenewalContent::Atoms(a) => a.clone(),
            _ => panic!("expected atoms"),
        };
        let at = |target: f64| {
            atoms
                .iter()
                .find(|(p, _)| (p - target).abs() < 1e-9)
                .map(|&(_, m)| m)
                .unwrap_or(0.0)
        };
        assert!((at(1.0) - p_short).abs() < 1e-12);
        assert!((at(tau) - p_long).abs() < 1e-12);
        assert!((at(2.0) - p_short * p_short).abs() < 1e-12);
        assert!((at(1.0 + tau) - 2.0 * p_short * p_long).abs() < 1e-12);
        assert!((at(2.0 * tau) - p_long * p_long).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_identity_residuals() {
        let r = renewal_relation_residual(&WaitingTime::gamma(2.0).unwrap(), 12.0, 2400).unwrap();
        assert!(r < 1e-4, "{r}");
        let r = renewal_relation_residual(&WaitingTime::point_mass(1.0).unwrap(), 15.0, 1).unwrap();
        assert!(r < 1e-12, "{r}");
        let r = renewal_relation_residual(&WaitingTime::fibonacci_tiling(), 15.0, 1).unwrap();
        assert!(r < 1e-10, "{r}");
        assert!(renewal_relation_residual(&WaitingTime::gamma(0.5).unwrap(), 10.0, 100).is_err());
    }

    #[test]
    fn exponential_diffraction_is_flat_with_one_atom() {
        let grid = KGrid::span(0.1, 3.0, 30).unwrap();
        let out = renewal_diffraction(&WaitingTime::gamma(1.0).unwrap(), &grid).unwrap();
        assert!(out.flagged.is_empty());
        assert_eq!(out.spectrum.atoms(), &[(0.0, 1.0)]);
        for v in out.spectrum.ac_density().values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_law_diffraction_is_purely_atomic() {
        let grid = KGrid::new(0.013, 0.1, 29).unwrap();
        let out = renewal_diffraction(&WaitingTime::point_mass(1.0).unwrap(), &grid).unwrap();
        assert!(out.flagged.is_empty());
        for v in out.spectrum.ac_density().values() {
            assert!(v.abs() < 1e-9);
        }
        assert_eq!(out.spectrum.atom_at(2.0, 1e-9), Some(1.0));
        let hitting = KGrid::new(0.0, 0.5, 5).unwrap();
        let out = renewal_diffraction(&WaitingTime::point_mass(2.0).unwrap(), &hitting).unwrap();
        assert_eq!(out.flagged, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(out.spectrum.atom_at(0.5, 1e-9), Some(0.25));
    }

    #[test]
    fn closed_form_matches_the_transform_route() {
        let dist = WaitingTime::fibonacci_tiling();
        let grid = KGrid::span(0.05, 3.0, 500).unwrap();
        let out = renewal_diffraction(&dist, &grid).unwrap();
        assert!(out.flagged.is_empty());
        for (i, k) in grid.iter().enumerate() {
            match fibonacci_tiling_density(k) {
                Ok(h) => {
                    assert!(h >= 0.0);
                    assert!((h - out.spectrum.ac_density().value(i)).abs() < 1e-9, "k = {k}");
                }
                Err(Error::SingularPoint(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(matches!(fibonacci_tiling_density(0.0), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn binned_pair_correlation_is_flat_for_poisson() {
        let pc = renewal_autocorr_binned(&WaitingTime::gamma(1.0).unwrap(), 2.5, 0.25).unwrap();
        assert!((pc.atom0 - 1.0).abs() < 1e-12);
        for (i, v) in pc.density.values().iter().enumerate() {
            assert!((v - 1.0).abs() < 1e-6, "bin {i}: {v}");
        }
    }

    #[test]
    fn sampled_pairs_match_the_series() {
        let src = RandomSource::new(26);
        let dist = WaitingTime::gamma(5.0).unwrap();
        let run = renewal_sample(&dist, 2e4, DEFAULT_BURN_IN_GAPS, &mut src.master()).unwrap();
        let empirical = crate::comb::pair_correlation(&run.to_comb().unwrap(), 2.5, 0.25).unwrap();
        let analytic = renewal_autocorr_binned(&dist, 2.5, 0.25).unwrap();
        let l1 = empirical
            .density
            .l1_distance_on(&analytic.density, -2.4, 2.4)
            .unwrap();
        assert!(l1 < 0.1, "{l1}");
        assert!((empirical.atom0 - analytic.atom0).abs() < 0.05);
    }

    #[test]
    fn first_point_is_stable_under_doubled_burn_in() {
        let src = RandomSource::new(27);
        let dist = WaitingTime::gamma(2.0).unwrap();
        let mean_first = |burn: usize, stream: u64| {
            let mut acc = 0.0;
            let reps = 400;
            let mut rng = src.replica(stream);
            for _ in 0..reps {
                let run = renewal_sample(&dist, 10.0, burn, &mut rng).unwrap();
                acc += run.points().first().copied().unwrap_or(10.0);
            }
            acc / reps as f64
        };
        let a = mean_first(DEFAULT_BURN_IN_GAPS, 1);
        let b = mean_first(2 * DEFAULT_BURN_IN_GAPS, 2);
        assert!((a - b).abs() < 0.1, "{a} vs {b}");
    }
}
