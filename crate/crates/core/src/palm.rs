//! Complex-weighted point configurations and their second-order
//! statistics: polar form, windowed autocorrelation with its boundary
//! defect, the typical-point (Palm) average, and the pairing functional
//! that ties intensity-weighted averages to second moments.

use crate::comb::{pair_grid, smooth, EmpiricalDensity, KGrid, PairCorrelation, WeightedComb};
use crate::error::{invalid, Result};
use crate::renewal::{renewal_sample, WaitingTime, DEFAULT_BURN_IN_GAPS};
use crate::stochastic::RandomSource;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Atom at lag zero plus complex density samples on a symmetric lag grid.
/// The windowed estimator fills it so that the value at -v is exactly the
/// conjugate of the value at v.
#[derive(Debug, Clone)]
pub struct ComplexCorrelation {
    pub atom0: Complex64,
    grid: KGrid,
    values: Vec<Complex64>,
}

impl ComplexCorrelation {
    pub fn new(atom0: Complex64, grid: KGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("correlation values must match the grid length"));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("correlation values must be finite"));
        }
        Ok(ComplexCorrelation { atom0, grid, values })
    }

    pub fn grid(&self) -> &KGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn conjugate(&self) -> ComplexCorrelation {
        ComplexCorrelation {
            atom0: self.atom0.conj(),
            grid: self.grid.clone(),
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> ComplexCorrelation {
        ComplexCorrelation {
            atom0: self.atom0 * c,
            grid: self.grid.clone(),
            values: self.values.iter().map(|z| z * c).collect(),
        }
    }

    /// Modulus L1 distance over bins whose centers land in [lo, hi].
    pub fn l1_distance_on(&self, other: &ComplexCorrelation, lo: f64, hi: f64) -> Result<f64> {
        if self.grid.len() != other.grid.len()
            || (self.grid.start() - other.grid.start()).abs() > 1e-12
            || (self.grid.step() - other.grid.step()).abs() > 1e-12
        {
            return Err(invalid("correlations live on different grids"));
        }
        let mut acc = 0.0;
        for (i, k) in self.grid.iter().enumerate() {
            if k >= lo && k <= hi {
                acc += (self.values[i] - other.values[i]).norm() * self.grid.step();
            }
        }
        Ok(acc)
    }

    /// Triangular-kernel smoothing applied to both components; the atom is
    /// left alone.
    pub fn smoothed(&self, bandwidth: f64) -> Result<ComplexCorrelation> {
        let re = EmpiricalDensity::new(
            self.grid.clone(),
            self.values.iter().map(|z| z.re).collect(),
            0.0,
        )?;
        let im = EmpiricalDensity::new(
            self.grid.clone(),
            self.values.iter().map(|z| z.im).collect(),
            0.0,
        )?;
        let re = smooth(&re, bandwidth)?;
        let im = smooth(&im, bandwidth)?;
        let values = re
            .values()
            .iter()
            .zip(im.values())
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        ComplexCorrelation::new(self.atom0, self.grid.clone(), values)
    }

    pub fn real_part(&self) -> Result<PairCorrelation> {
        Ok(PairCorrelation {
            atom0: self.atom0.re,
            density: EmpiricalDensity::new(
                self.grid.clone(),
                self.values.iter().map(|z| z.re).collect(),
                0.0,
            )?,
        })
    }
}

/// Magnitude and phase of each atom of a complex comb; atoms with zero
/// weight carry no phase information and are dropped.
#[derive(Debug, Clone)]
pub struct PolarForm {
    positions: Vec<f64>,
    magnitudes: Vec<f64>,
    phases: Vec<f64>,
    window_radius: f64,
}

impl PolarForm {
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    /// Phases in [0, 2 pi).
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// The total variation measure: positive weights, same support.
    pub fn total_variation(&self) -> Result<WeightedComb> {
        WeightedComb::new(
            self.positions.clone(),
            self.magnitudes.iter().map(|&m| Complex64::new(m, 0.0)).collect(),
            self.window_radius,
        )
    }

    pub fn reconstruct(&self) -> Result<WeightedComb> {
        WeightedComb::new(
            self.positions.clone(),
            self.magnitudes
                .iter()
                .zip(&self.phases)
                .map(|(&m, &p)| Complex64::from_polar(m, p))
                .collect(),
            self.window_radius,
        )
    }
}

pub fn polar_decompose(comb: &WeightedComb) -> PolarForm {
    let mut positions = Vec::new();
    let mut magnitudes = Vec::new();
    let mut phases = Vec::new();
    for (&x, w) in comb.positions().iter().zip(comb.weights()) {
        let (m, theta) = w.to_polar();
        if m == 0.0 {
            continue;
        }
        positions.push(x);
        magnitudes.push(m);
        phases.push(if theta < 0.0 { theta + TAU } else { theta });
    }
    PolarForm {
        positions,
        magnitudes,
        phases,
        window_radius: comb.window_radius(),
    }
}

/// Shared windowed pair accumulation. Each unordered pair lands as z in
/// one bin and conj(z) in the mirrored bin in the same program order, so
/// the result is hermitian bit for bit; `alt` swaps which side takes the
/// conjugate and therefore produces the exact elementwise conjugate.
fn windowed_pair_bins(
    comb: &WeightedComb,
    n: f64,
    max_dist: f64,
    bin_width: f64,
    alt: bool,
) -> Result<(KGrid, Vec<Complex64>, f64)> {
    if !(n > 0.0) || n > comb.window_radius() {
        return Err(invalid("base window must be positive and fit inside the sample"));
    }
    let grid = pair_grid(max_dist, bin_width)?;
    let nbins = grid.len();
    let bw = grid.step();
    let xs = comb.positions();
    let ws = comb.weights();
    let lo = xs.partition_point(|&x| x < -n);
    let hi = xs.partition_point(|&x| x <= n);
    let mut bins = vec![Complex64::new(0.0, 0.0); nbins];
    let mut diag = 0.0;
    for i in lo..hi {
        diag += ws[i].norm_sqr();
        for j in (i + 1)..hi {
            let d = xs[j] - xs[i];
            if d > max_dist {
                break;
            }
            let idx = (((d + max_dist) / bw) as usize).min(nbins - 1);
            let z = ws[j] * ws[i].conj();
            if alt {
                bins[idx] += z.conj();
                bins[nbins - 1 - idx] += z;
            } else {
                bins[idx] += z;
                bins[nbins - 1 - idx] += z.conj();
            }
        }
    }
    Ok((grid, bins, diag))
}

/// Autocorrelation of the comb restricted to [-n, n], normalized by the
/// window volume 2n. The lag-zero atom collects the diagonal terms.
pub fn empirical_autocorr(
    comb: &WeightedComb,
    n: f64,
    max_dist: f64,
    bin_width: f64,
) -> Result<ComplexCorrelation> {
    let (grid, bins, diag) = windowed_pair_bins(comb, n, max_dist, bin_width, false)?;
    let norm = 2.0 * n;
    let bw = grid.step();
    let values = bins.iter().map(|z| z / (norm * bw)).collect();
    ComplexCorrelation::new(Complex64::new(diag / norm, 0.0), grid, values)
}

/// Same estimator with the reduction factored out on the other side; the
/// output is the exact complex conjugate of `empirical_autocorr`.
pub fn empirical_autocorr_alt(
    comb: &WeightedComb,
    n: f64,
    max_dist: f64,
    bin_width: f64,
) -> Result<ComplexCorrelation> {
    let (grid, bins, diag) = windowed_pair_bins(comb, n, max_dist, bin_width, true)?;
    let norm = 2.0 * n;
    let bw = grid.step();
    let values = bins.iter().map(|z| z / (norm * bw)).collect();
    ComplexCorrelation::new(Complex64::new(diag / norm, 0.0), grid, values)
}

/// Average of per-realization autocorrelations, merged in slice order so
/// the result does not depend on thread scheduling.
pub fn average_autocorr(
    realizations: &[WeightedComb],
    n: f64,
    max_dist: f64,
    bin_width: f64,
) -> Result<ComplexCorrelation> {
    if realizations.is_empty() {
        return Err(invalid("need at least one realization"));
    }
    let parts: Vec<ComplexCorrelation> = realizations
        .par_iter()
        .map(|comb| empirical_autocorr(comb, n, max_dist, bin_width))
        .collect::<Result<Vec<_>>>()?;
    let grid = parts[0].grid().clone();
    let m = parts.len() as f64;
    let mut atom0 = Complex64::new(0.0, 0.0);
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for part in &parts {
        atom0 += part.atom0;
        for (acc, v) in values.iter_mut().zip(part.values()) {
            *acc += v;
        }
    }
    ComplexCorrelation::new(atom0 / m, grid, values.into_iter().map(|z| z / m).collect())
}

/// Total variation mass of the pairs lost by cutting the second factor to
/// the base window: one point inside [-n, n], the other outside, lag at
/// most max_lag, divided by the window volume 2n.
pub fn boundary_term_check(comb: &WeightedComb, n: f64, max_lag: f64) -> Result<f64> {
    if !(n > 0.0) || !(2.0 * n < comb.window_radius()) {
        return Err(invalid("base window must sit well inside the sample"));
    }
    if !(max_lag > 0.0) || !max_lag.is_finite() {
        return Err(invalid("lag range must be positive"));
    }
    let xs = comb.positions();
    let ws = comb.weights();
    let lo = xs.partition_point(|&x| x < -n);
    let hi = xs.partition_point(|&x| x <= n);
    let mut total = 0.0;
    for i in lo..hi {
        let mut j = lo;
        while j > 0 && xs[i] - xs[j - 1] <= max_lag {
            total += ws[i].norm() * ws[j - 1].norm();
            j -= 1;
        }
        let mut j = hi;
        while j < xs.len() && xs[j] - xs[i] <= max_lag {
            total += ws[i].norm() * ws[j].norm();
            j += 1;
        }
    }
    Ok(total / (2.0 * n))
}

/// Average configuration seen from a typical point of the total variation:
/// for each base point x in [-n, n] the whole realization is rotated by
/// the conjugate phase at x, recentred at x, and accumulated with weight
/// |w(x)|; normalized by the accumulated weight, which equals the
/// empirical |w| intensity times the base volume per realization.
///
/// The lag range must fit inside the sample window so every recentred view
/// is complete.
pub fn palm_intensity_estimate(
    realizations: &[WeightedComb],
    n: f64,
    max_dist: f64,
    bin_width: f64,
) -> Result<ComplexCorrelation> {
    if realizations.is_empty() {
        return Err(invalid("need at least one realization"));
    }
    if !(n > 0.0) {
        return Err(invalid("base window must be positive"));
    }
    for comb in realizations {
        if n + max_dist > comb.window_radius() + 1e-12 {
            return Err(invalid("sample window must cover the base region plus the lag range"));
        }
    }
    let grid = pair_grid(max_dist, bin_width)?;
    let parts: Vec<(Vec<Complex64>, f64, f64)> = realizations
        .par_iter()
        .map(|comb| palm_part(comb, n, &grid, max_dist))
        .collect();
    let nbins = grid.len();
    let bw = grid.step();
    let mut bins = vec![Complex64::new(0.0, 0.0); nbins];
    let mut diag = 0.0;
    let mut weight = 0.0;
    for (part_bins, part_diag, part_weight) in &parts {
        for (acc, v) in bins.iter_mut().zip(part_bins) {
            *acc += v;
        }
        diag += part_diag;
        weight += part_weight;
    }
    if !(weight > 0.0) {
        return Err(invalid("no support in the base window"));
    }
    let values = bins.iter().map(|z| z / (weight * bw)).collect();
    ComplexCorrelation::new(Complex64::new(diag / weight, 0.0), grid, values)
}

fn palm_part(comb: &WeightedComb, n: f64, grid: &KGrid, max_dist: f64) -> (Vec<Complex64>, f64, f64) {
    let nbins = grid.len();
    let bw = grid.step();
    let xs = comb.positions();
    let ws = comb.weights();
    let lo = xs.partition_point(|&x| x < -n);
    let hi = xs.partition_point(|&x| x <= n);
    let mut bins = vec![Complex64::new(0.0, 0.0); nbins];
    let mut diag = 0.0;
    let mut weight = 0.0;
    for i in lo..hi {
        weight += ws[i].norm();
        diag += ws[i].norm_sqr();
        // |w_i| e^{-i phase_i} = conj(w_i), so the rotated recentred mass
        // at lag x_j - x_i is conj(w_i) w_j
        let rot = ws[i].conj();
        let mut j = i;
        while j > 0 && xs[i] - xs[j - 1] <= max_dist {
            let idx = (((xs[j - 1] - xs[i] + max_dist) / bw) as usize).min(nbins - 1);
            bins[idx] += rot * ws[j - 1];
            j -= 1;
        }
        let mut j = i + 1;
        while j < xs.len() && xs[j] - xs[i] <= max_dist {
            let idx = (((xs[j] - xs[i] + max_dist) / bw) as usize).min(nbins - 1);
            bins[idx] += rot * ws[j];
            j += 1;
        }
    }
    (bins, diag, weight)
}

/// One realization rotated by a fixed unit phase, as handed to the pairing
/// functional's test functions.
pub struct RotatedConfiguration<'a> {
    comb: &'a WeightedComb,
    rotation: Complex64,
}

impl RotatedConfiguration<'_> {
    pub fn rotation(&self) -> Complex64 {
        self.rotation
    }

    /// Rotated mass on [lo, hi).
    pub fn mass_on(&self, lo: f64, hi: f64) -> Complex64 {
        let xs = self.comb.positions();
        let a = xs.partition_point(|&x| x < lo);
        let b = xs.partition_point(|&x| x < hi);
        self.rotation * self.comb.weights()[a..b].iter().sum::<Complex64>()
    }
}

/// Monte Carlo average over realizations of the integral of
/// g(x, rotated configuration) against the total variation. With
/// g(x, phi) = 1_{A'}(x) phi(A) this reproduces the second moment
/// E[mass(A) conj(mass(A'))].
pub fn campbell_pairing<F>(realizations: &[WeightedComb], g: F) -> Result<Complex64>
where
    F: Fn(f64, &RotatedConfiguration) -> Complex64,
{
    if realizations.is_empty() {
        return Err(invalid("need at least one realization"));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for comb in realizations {
        for (&x, w) in comb.positions().iter().zip(comb.weights()) {
            let m = w.norm();
            if m == 0.0 {
                continue;
            }
            let view = RotatedConfiguration { comb, rotation: w.conj() / m };
            acc += m * g(x, &view);
        }
    }
    Ok(acc / realizations.len() as f64)
}

/// Pairing of the correlation measure against f convolved with its own
/// reflected conjugate, evaluated on the correlation's grid. For the
/// second-moment measure this is a window average of |phi(f)|^2, so it
/// stays nonnegative up to discretization.
pub fn quadratic_form(corr: &ComplexCorrelation, f: &[Complex64]) -> Result<f64> {
    let nbins = corr.grid().len();
    if f.len() != nbins {
        return Err(invalid("test function must be sampled on the correlation grid"));
    }
    let bw = corr.grid().step();
    let center = (nbins - 1) / 2;
    let g: Vec<Complex64> = (0..nbins)
        .map(|k| {
            let shift = k as isize - center as isize;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..nbins {
                let l = j as isize + shift;
                if l >= 0 && (l as usize) < nbins {
                    s += f[l as usize] * f[j].conj();
                }
            }
            s * bw
        })
        .collect();
    let mut total = corr.atom0 * g[center];
    for k in 0..nbins {
        total += corr.value(k) * g[k] * bw;
    }
    Ok(total.re)
}

/// Law of the i.i.d. complex marks attached to ground points.
#[derive(Debug, Clone, PartialEq)]
pub enum MarkLaw {
    Constant(Complex64),
    /// Independent real and imaginary Gaussian parts around the mean.
    Gaussian { mean: Complex64, sigma: f64 },
    /// Fixed modulus, uniformly random phase; mean zero.
    UniformPhase { modulus: f64 },
}

impl MarkLaw {
    /// Registry lookup: "unit", "const:RE[,IM]", "gauss:RE,IM,SIGMA",
    /// "phase:MODULUS".
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (spec, None),
        };
        let numbers = |p: Option<&str>| -> Result<Vec<f64>> {
            match p {
                None => Ok(Vec::new()),
                Some(s) => s
                    .split(',')
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| invalid(format!("bad numeric parameter {t:?}")))
                    })
                    .collect(),
            }
        };
        match (name, numbers(param)?.as_slice()) {
            ("unit", []) => Ok(MarkLaw::Constant(Complex64::new(1.0, 0.0))),
            ("const", [re]) => Ok(MarkLaw::Constant(Complex64::new(*re, 0.0))),
            ("const", [re, im]) => Ok(MarkLaw::Constant(Complex64::new(*re, *im))),
            ("gauss", [re, im, sigma]) if *sigma >= 0.0 => Ok(MarkLaw::Gaussian {
                mean: Complex64::new(*re, *im),
                sigma: *sigma,
            }),
            ("phase", [m]) if *m > 0.0 => Ok(MarkLaw::UniformPhase { modulus: *m }),
            _ => Err(invalid(format!(
                "unknown mark law {spec:?}; known: unit, const:RE[,IM], gauss:RE,IM,SIGMA, phase:MODULUS"
            ))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MarkLaw::Constant(c) => format!("const:{},{}", c.re, c.im),
            MarkLaw::Gaussian { mean, sigma } => format!("gauss:{},{},{sigma}", mean.re, mean.im),
            MarkLaw::UniformPhase { modulus } => format!("phase:{modulus}"),
        }
    }

    pub fn mean(&self) -> Complex64 {
        match self {
            MarkLaw::Constant(c) => *c,
            MarkLaw::Gaussian { mean, .. } => *mean,
            MarkLaw::UniformPhase { .. } => Complex64::new(0.0, 0.0),
        }
    }

    pub fn mean_square_modulus(&self) -> f64 {
        match self {
            MarkLaw::Constant(c) => c.norm_sqr(),
            MarkLaw::Gaussian { mean, sigma } => mean.norm_sqr() + 2.0 * sigma * sigma,
            MarkLaw::UniformPhase { modulus } => modulus * modulus,
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        match self {
            MarkLaw::Constant(c) => *c,
            MarkLaw::Gaussian { mean, sigma } => {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                mean + sigma * Complex64::new(re, im)
            }
            MarkLaw::UniformPhase { modulus } => {
                Complex64::from_polar(*modulus, rng.gen::<f64>() * TAU)
            }
        }
    }
}

/// Point process carrying the marks.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundProcess {
    Poisson { rate: f64 },
    Renewal(WaitingTime),
    Lattice { spacing: f64 },
}

impl GroundProcess {
    /// Registry lookup: "poisson:RATE", "lattice:SPACING", or any
    /// waiting-time spec ("exp", "gamma:A", "point:B", "fib-rt").
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (spec, None),
        };
        let number = |p: Option<&str>| -> Result<f64> {
            p.ok_or_else(|| invalid("missing numeric parameter"))?
                .parse::<f64>()
                .map_err(|_| invalid("bad numeric parameter"))
        };
        match name {
            "poisson" => {
                let rate = number(param)?;
                if !(rate > 0.0) || !rate.is_finite() {
                    return Err(invalid("rate must be positive"));
                }
                Ok(GroundProcess::Poisson { rate })
            }
            "lattice" => {
                let spacing = number(param)?;
                if !(spacing > 0.0) || !spacing.is_finite() {
                    return Err(invalid("spacing must be positive"));
                }
                Ok(GroundProcess::Lattice { spacing })
            }
            _ => WaitingTime::parse(spec).map(GroundProcess::Renewal),
        }
    }

    pub fn name(&self) -> String {
        match self {
            GroundProcess::Poisson { rate } => format!("poisson:{rate}"),
            GroundProcess::Renewal(dist) => dist.name(),
            GroundProcess::Lattice { spacing } => format!("lattice:{spacing}"),
        }
    }

    pub fn intensity(&self) -> f64 {
        match self {
            GroundProcess::Poisson { rate } => *rate,
            GroundProcess::Renewal(dist) => dist.intensity(),
            GroundProcess::Lattice { spacing } => 1.0 / spacing,
        }
    }

    pub fn sample_points(&self, radius: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("window radius must be positive"));
        }
        match self {
            GroundProcess::Poisson { rate } => {
                let count = Poisson::new(rate * 2.0 * radius)
                    .map_err(|_| invalid("rate too large"))?
                    .sample(rng) as usize;
                let mut points: Vec<f64> =
                    (0..count).map(|_| rng.gen_range(-radius..radius)).collect();
                points.sort_unstable_by(f64::total_cmp);
                points.dedup();
                Ok(points)
            }
            GroundProcess::Renewal(dist) => {
                let run = renewal_sample(dist, 2.0 * radius, DEFAULT_BURN_IN_GAPS, rng)?;
                Ok(run.points().iter().map(|x| x - radius).collect())
            }
            GroundProcess::Lattice { spacing } => {
                let first = (-radius / spacing).ceil() as i64;
                let last = (radius / spacing).floor() as i64;
                Ok((first..=last).map(|j| j as f64 * spacing).collect())
            }
        }
    }
}

/// Ground process plus i.i.d. marks.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedProcessModel {
    pub ground: GroundProcess,
    pub marks: MarkLaw,
}

impl MarkedProcessModel {
    pub fn new(ground: GroundProcess, marks: MarkLaw) -> Self {
        MarkedProcessModel { ground, marks }
    }

    pub fn sample(&self, radius: f64, rng: &mut ChaCha8Rng) -> Result<WeightedComb> {
        let positions = self.ground.sample_points(radius, rng)?;
        let weights = positions.iter().map(|_| self.marks.sample(rng)).collect();
        WeightedComb::new(positions, weights, radius)
    }
}

/// Independently sampled realizations on split streams, in stream order.
pub fn sample_ensemble(
    model: &MarkedProcessModel,
    count: usize,
    radius: f64,
    source: &RandomSource,
) -> Result<Vec<WeightedComb>> {
    (0..count)
        .into_par_iter()
        .map(|s| model.sample(radius, &mut source.replica(s as u64)))
        .collect()
}

/// Second-moment measure of a Poisson ground process with i.i.d. marks:
/// atom rate E|W|^2 at lag zero, flat density rate^2 |E W|^2.
pub fn marked_poisson_autocorr(
    rate: f64,
    marks: &MarkLaw,
    max_dist: f64,
    bin_width: f64,
) -> Result<ComplexCorrelation> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(invalid("rate must be positive"));
    }
    let grid = pair_grid(max_dist, bin_width)?;
    let flat = rate * rate * marks.mean().norm_sqr();
    let values = vec![Complex64::new(flat, 0.0); grid.len()];
    ComplexCorrelation::new(
        Complex64::new(rate * marks.mean_square_modulus(), 0.0),
        grid,
        values,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::PI;

    fn integer_comb(half: i64, radius: f64) -> WeightedComb {
        WeightedComb::unit((-half..=half).map(|j| j as f64).collect(), radius).unwrap()
    }

    fn random_comb(seed: u64, count: usize, radius: f64) -> WeightedComb {
        let src = RandomSource::new(seed);
        let mut rng = src.master();
        let mut positions: Vec<f64> =
            (0..count).map(|_| rng.gen_range(-radius..radius)).collect();
        positions.sort_unstable_by(f64::total_cmp);
        positions.dedup();
        let marks = MarkLaw::Gaussian { mean: Complex64::new(0.4, -0.2), sigma: 1.0 };
        let weights = positions.iter().map(|_| marks.sample(&mut rng)).collect();
        WeightedComb::new(positions, weights, radius).unwrap()
    }

    #[test]
    fn polar_conventions() {
        let comb = WeightedComb::new(
            vec![0.0, 1.0, 2.0],
            vec![
                Complex64::new(3.0, 0.0),
                Complex64::new(-2.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
            5.0,
        )
        .unwrap();
        let polar = polar_decompose(&comb);
        assert_eq!(polar.positions(), &[0.0, 1.0]);
        assert_eq!(polar.magnitudes(), &[3.0, 2.0]);
        assert_eq!(polar.phases()[0], 0.0);
        assert!((polar.phases()[1] - PI).abs() < 1e-15);
        let tv = polar.total_variation().unwrap();
        assert_eq!(tv.weights()[1], Complex64::new(2.0, 0.0));
    }

    proptest! {
        #[test]
        fn polar_reconstruction_is_faithful(parts in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..40)) {
            let positions: Vec<f64> = (0..parts.len()).map(|j| j as f64).collect();
            let weights: Vec<Complex64> = parts.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let radius = parts.len() as f64 + 1.0;
            let comb = WeightedComb::new(positions, weights.clone(), radius).unwrap();
            let rebuilt = polar_decompose(&comb).reconstruct().unwrap();
            let kept: Vec<Complex64> = weights.iter().copied().filter(|w| w.norm() != 0.0).collect();
            prop_assert_eq!(kept.len(), rebuilt.len());
            for (orig, rec) in kept.iter().zip(rebuilt.weights()) {
                prop_assert!((orig - rec).norm() <= 1e-14 * orig.norm());
            }
        }
    }

    #[test]
    fn integer_comb_pair_masses_are_exact() {
        let comb = integer_comb(64, 64.5);
        let corr = empirical_autocorr(&comb, 50.5, 10.5, 1.0).unwrap();
        assert_eq!(corr.atom0, Complex64::new(1.0, 0.0));
        let center = (corr.grid().len() - 1) / 2;
        for m in 1..=10usize {
            let expected = (101 - m) as f64 / 101.0;
            assert_eq!(corr.value(center + m), Complex64::new(expected, 0.0), "lag {m}");
            assert_eq!(corr.value(center - m), Complex64::new(expected, 0.0));
        }
        assert!(empirical_autocorr(&comb, 70.0, 10.5, 1.0).is_err());
    }

    #[test]
    fn hermitian_and_alternative_reduction_are_exact() {
        let comb = random_comb(31, 400, 100.0);
        let corr = empirical_autocorr(&comb, 100.0, 5.5, 0.5).unwrap();
        let nbins = corr.grid().len();
        for k in 0..nbins {
            assert_eq!(corr.value(k), corr.value(nbins - 1 - k).conj(), "bin {k}");
        }
        let alt = empirical_autocorr_alt(&comb, 100.0, 5.5, 0.5).unwrap();
        assert_eq!(alt.atom0, corr.atom0);
        for k in 0..nbins {
            assert_eq!(alt.value(k), corr.value(k).conj(), "bin {k}");
        }
    }

    #[test]
    fn unimodular_rotation_leaves_the_estimate_fixed() {
        let comb = random_comb(32, 300, 80.0);
        let base = empirical_autocorr(&comb, 80.0, 4.5, 0.5).unwrap();
        for c in [Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)] {
            let rotated = WeightedComb::new(
                comb.positions().to_vec(),
                comb.weights().iter().map(|w| c * w).collect(),
                comb.window_radius(),
            )
            .unwrap();
            let corr = empirical_autocorr(&rotated, 80.0, 4.5, 0.5).unwrap();
            assert_eq!(corr.atom0, base.atom0);
            for k in 0..base.grid().len() {
                assert_eq!(corr.value(k), base.value(k), "bin {k}");
            }
        }
    }

    #[test]
    fn quadratic_form_stays_nonnegative_on_dyadic_tents() {
        let src = RandomSource::new(33);
        let mut rng = src.master();
        let marks = MarkLaw::Gaussian { mean: Complex64::new(0.3, 0.7), sigma: 1.0 };
        let positions: Vec<f64> = (-32..=32).map(|j| j as f64).collect();
        let weights: Vec<Complex64> = positions.iter().map(|_| marks.sample(&mut rng)).collect();
        let comb = WeightedComb::new(positions, weights, 32.5).unwrap();
        let corr = empirical_autocorr(&comb, 32.5, 16.5, 1.0).unwrap();
        let nbins = corr.grid().len();
        let center = (nbins - 1) / 2;
        for scale in [1usize, 2, 4, 8] {
            let f: Vec<Complex64> = (0..nbins)
                .map(|j| {
                    let t = 1.0 - (j as f64 - center as f64).abs() / scale as f64;
                    Complex64::new(t.max(0.0), 0.0)
                })
                .collect();
            let normsq: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>() * corr.grid().step();
            let energy = quadratic_form(&corr, &f).unwrap();
            assert!(energy >= -1e-9 * normsq, "scale {scale}: {energy}");
        }
    }

    #[test]
    fn marked_poisson_matches_the_moment_computation() {
        let model = MarkedProcessModel::new(
            GroundProcess::parse("poisson:1").unwrap(),
            MarkLaw::parse("gauss:0.8,0.4,0.5").unwrap(),
        );
        let src = RandomSource::new(34);
        let runs = sample_ensemble(&model, 320, 250.0, &src).unwrap();
        let corr = average_autocorr(&runs, 250.0, 2.5, 0.25).unwrap();
        let oracle = marked_poisson_autocorr(1.0, &model.marks, 2.5, 0.25).unwrap();
        assert!((corr.atom0 - oracle.atom0).norm() < 0.05, "{}", corr.atom0);
        let l1 = corr
            .smoothed(0.75)
            .unwrap()
            .l1_distance_on(&oracle, -2.4, 2.4)
            .unwrap();
        assert!(l1 < 0.05, "{l1}");
    }

    #[test]
    fn independent_runs_estimate_the_same_measure() {
        let model = MarkedProcessModel::new(
            GroundProcess::Poisson { rate: 1.0 },
            MarkLaw::Gaussian { mean: Complex64::new(0.6, 0.3), sigma: 0.4 },
        );
        let src = RandomSource::new(35);
        let a = model.sample(1e4, &mut src.replica(1)).unwrap();
        let b = model.sample(1e4, &mut src.replica(2)).unwrap();
        let ca = empirical_autocorr(&a, 1e4, 2.5, 0.25).unwrap().smoothed(1.0).unwrap();
        let cb = empirical_autocorr(&b, 1e4, 2.5, 0.25).unwrap().smoothed(1.0).unwrap();
        assert!((ca.atom0 - cb.atom0).norm() < 0.02);
        let l1 = ca.l1_distance_on(&cb, -2.4, 2.4).unwrap();
        assert!(l1 < 0.05, "{l1}");
    }

    #[test]
    fn boundary_defect_counts_straddling_pairs() {
        let inner = WeightedComb::unit(vec![-1.5, 0.0, 1.0], 20.0).unwrap();
        assert_eq!(boundary_term_check(&inner, 5.0, 1.0).unwrap(), 0.0);

        let comb = integer_comb(20, 20.5);
        let defect = boundary_term_check(&comb, 5.5, 2.5).unwrap();
        assert_eq!(defect, 6.0 / 11.0);
        assert!(boundary_term_check(&comb, 15.0, 1.0).is_err());
    }

    #[test]
    fn boundary_defect_shrinks_with_the_window() {
        let model = MarkedProcessModel::new(
            GroundProcess::Poisson { rate: 1.0 },
            MarkLaw::Constant(Complex64::new(1.0, 0.0)),
        );
        let src = RandomSource::new(36);
        let runs = sample_ensemble(&model, 30, 4100.0, &src).unwrap();
        let mean_defect = |n: f64| {
            runs.iter()
                .map(|c| boundary_term_check(c, n, 2.0).unwrap())
                .sum::<f64>()
                / runs.len() as f64
        };
        let small = mean_defect(100.0);
        let large = mean_defect(800.0);
        assert!(large < small, "{large} vs {small}");
        assert!((small - 0.02).abs() < 0.01, "{small}");
    }

    #[test]
    fn pairing_functional_basics() {
        let model = MarkedProcessModel::new(
            GroundProcess::Poisson { rate: 1.0 },
            MarkLaw::UniformPhase { modulus: 1.0 },
        );
        let src = RandomSource::new(37);
        let runs = sample_ensemble(&model, 30, 500.0, &src).unwrap();
        let zero = campbell_pairing(&runs, |_, _| Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(zero, Complex64::new(0.0, 0.0));
        // g depending on the location alone integrates |w| over [0, 10]
        let mass = campbell_pairing(&runs, |x, _| {
            if (0.0..10.0).contains(&x) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        assert!((mass.re - 10.0).abs() < 2.0, "{mass}");
        assert!(mass.im.abs() < 1e-12);
    }

    #[test]
    fn pairing_functional_reproduces_second_moments() {
        let model = MarkedProcessModel::new(
            GroundProcess::Poisson { rate: 1.0 },
            MarkLaw::Gaussian { mean: Complex64::new(0.5, 0.2), sigma: 0.8 },
        );
        let src = RandomSource::new(38);
        let runs = sample_ensemble(&model, 5, 50.0, &src).unwrap();
        let (a_lo, a_hi, b_lo, b_hi) = (0.0, 2.0, 1.0, 3.0);
        let paired = campbell_pairing(&runs, |x, phi| {
            if x >= b_lo && x < b_hi {
                phi.mass_on(a_lo, a_hi)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let mut direct = Complex64::new(0.0, 0.0);
        for comb in &runs {
            let mass = |lo: f64, hi: f64| {
                comb.positions()
                    .iter()
                    .zip(comb.weights())
                    .filter(|(&x, _)| x >= lo && x < hi)
                    .map(|(_, w)| w)
                    .sum::<Complex64>()
            };
            direct += mass(a_lo, a_hi) * mass(b_lo, b_hi).conj();
        }
        direct /= runs.len() as f64;
        assert!((paired - direct).norm() <= 1e-9 * (1.0 + direct.norm()), "{paired} vs {direct}");
    }

    #[test]
    fn lattice_palm_average_counts_lattice_points() {
        let comb = integer_comb(30, 30.5);
        let palm = palm_intensity_estimate(std::slice::from_ref(&comb), 20.0, 10.5, 1.0).unwrap();
        assert_eq!(palm.atom0, Complex64::new(1.0, 0.0));
        let center = (palm.grid().len() - 1) / 2;
        // the point at the origin itself sits in the atom, not the density
        assert_eq!(palm.value(center), Complex64::new(0.0, 0.0));
        for m in 1..=10usize {
            assert_eq!(palm.value(center + m).re, 1.0, "lag {m}");
            assert_eq!(palm.value(center - m).re, 1.0);
        }
        assert!(palm_intensity_estimate(std::slice::from_ref(&comb), 25.0, 10.5, 1.0).is_err());
        let empty = WeightedComb::unit(vec![25.0], 30.5).unwrap();
        assert!(palm_intensity_estimate(std::slice::from_ref(&empty), 18.0, 10.5, 1.0).is_err());
    }

    #[test]
    fn intensity_times_palm_average_matches_the_renewal_series() {
        let dist = WaitingTime::gamma(2.0).unwrap();
        let model = MarkedProcessModel::new(
            GroundProcess::Renewal(dist.clone()),
            MarkLaw::Constant(Complex64::new(1.0, 0.0)),
        );
        let src = RandomSource::new(39);
        let run = model.sample(2e4, &mut src.master()).unwrap();
        let palm = palm_intensity_estimate(std::slice::from_ref(&run), 2e4 - 2.5, 2.5, 0.25).unwrap();
        let scaled = palm.scaled(dist.intensity()).smoothed(0.75).unwrap().real_part().unwrap();
        let analytic = crate::renewal::renewal_autocorr_binned(&dist, 2.5, 0.25).unwrap();
        let analytic_smoothed = smooth(&analytic.density, 0.75).unwrap();
        let l1 = scaled
            .density
            .l1_distance_on(&analytic_smoothed, -2.4, 2.4)
            .unwrap();
        assert!(l1 < 0.05, "{l1}");
        assert!((scaled.atom0 - analytic.atom0).abs() < 0.02);
    }

    #[test]
    fn palm_average_agrees_with_the_autocorrelation() {
        let model = MarkedProcessModel::new(
            GroundProcess::Poisson { rate: 1.0 },
            MarkLaw::Gaussian { mean: Complex64::new(0.7, -0.3), sigma: 0.5 },
        );
        let src = RandomSource::new(40);
        let runs = sample_ensemble(&model, 20, 300.0, &src).unwrap();
        let n = 297.5;
        let palm = palm_intensity_estimate(&runs, n, 2.5, 0.25).unwrap();
        let autocorr = average_autocorr(&runs, n, 2.5, 0.25).unwrap();
        // empirical |w| intensity over the base windows
        let rho: f64 = runs
            .iter()
            .map(|c| {
                c.positions()
                    .iter()
                    .zip(c.weights())
                    .filter(|(&x, _)| x.abs() <= n)
                    .map(|(_, w)| w.norm())
                    .sum::<f64>()
            })
            .sum::<f64>()
            / (runs.len() as f64 * 2.0 * n);
        let scaled = palm.scaled(rho);
        assert!((scaled.atom0 - autocorr.atom0).norm() < 1e-12);
        let l1 = scaled.l1_distance_on(&autocorr, -2.4, 2.4).unwrap();
        assert!(l1 < 0.05, "{l1}");
    }

    #[test]
    fn model_registry_and_sampling() {
        assert_eq!(GroundProcess::parse("poisson:2").unwrap().intensity(), 2.0);
        assert_eq!(GroundProcess::parse("lattice:0.5").unwrap().intensity(), 2.0);
        assert!(matches!(
            GroundProcess::parse("gamma:3").unwrap(),
            GroundProcess::Renewal(WaitingTime::Gamma { .. })
        ));
        assert!(GroundProcess::parse("poisson:-1").is_err());
        assert!(GroundProcess::parse("nonsense").is_err());
        assert_eq!(MarkLaw::parse("unit").unwrap(), MarkLaw::Constant(Complex64::new(1.0, 0.0)));
        let gauss = MarkLaw::parse("gauss:1,0,0.5").unwrap();
        assert!((gauss.mean_square_modulus() - 1.5).abs() < 1e-15);
        assert!((MarkLaw::parse("phase:2").unwrap().mean_square_modulus() - 4.0).abs() < 1e-15);
        assert!(MarkLaw::parse("gauss:1").is_err());
        assert!(MarkLaw::parse("phase:0").is_err());

        let src = RandomSource::new(41);
        let comb = MarkedProcessModel::new(
            GroundProcess::Poisson { rate: 2.0 },
            MarkLaw::UniformPhase { modulus: 1.0 },
        )
        .sample(100.0, &mut src.master())
        .unwrap();
        let count = comb.len() as f64;
        assert!((count - 400.0).abs() < 80.0, "{count}");

        let lattice = GroundProcess::Lattice { spacing: 0.5 }
            .sample_points(2.0, &mut src.master())
            .unwrap();
        assert_eq!(lattice.len(), 9);
        assert_eq!(lattice[0], -2.0);
    }

    #[test]
    fn mark_sampling_matches_declared_moments() {
        let src = RandomSource::new(42);
        let mut rng = src.master();
        for law in [
            MarkLaw::Gaussian { mean: Complex64::new(0.8, 0.4), sigma: 0.5 },
            MarkLaw::UniformPhase { modulus: 1.5 },
        ] {
            let n = 100_000;
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sq = 0.0;
            for _ in 0..n {
                let w = law.sample(&mut rng);
                sum += w;
                sq += w.norm_sqr();
            }
            let mean = sum / n as f64;
            assert!((mean - law.mean()).norm() < 0.01, "{}", law.name());
            assert!((sq / n as f64 - law.mean_square_modulus()).abs() < 0.02, "{}", law.name());
        }
    }
}
