//! Weighted Dirac combs and the estimators shared by every model.
//!
//! Conventions, fixed once for the whole crate:
//! * Fourier transform of a measure: mu_hat(k) = integral of e^{-2 pi i k x};
//!   under it the unit integer comb transforms to itself.
//! * Finite-window autocorrelation coefficients use the bias-corrected
//!   normalization 1/(len - |m|).
//! * Periodograms divide |sum w e^{-2 pi i k x}|^2 by the window volume 2r.

use crate::error::{invalid, Result};
use crate::fourier;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Uniform evaluation grid; node i sits at start + i * step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    start: f64,
    step: f64,
    len: usize,
}

impl KGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
            return Err(invalid("grid needs a finite start and a positive step"));
        }
        if len == 0 {
            return Err(invalid("grid needs at least one node"));
        }
        Ok(KGrid { start, step, len })
    }

    /// `len` nodes covering [start, end] inclusively.
    pub fn span(start: f64, end: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(invalid("span grid needs at least two nodes"));
        }
        KGrid::new(start, (end - start) / (len - 1) as f64, len)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.value(i))
    }
}

/// Finite restriction of a weighted Dirac comb to the window [-r, r].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedComb {
    positions: Vec<f64>,
    weights: Vec<Complex64>,
    window_radius: f64,
}

impl WeightedComb {
    pub fn new(positions: Vec<f64>, weights: Vec<Complex64>, window_radius: f64) -> Result<Self> {
        if positions.len() != weights.len() {
            return Err(invalid("positions and weights must have equal length"));
        }
        if !(window_radius > 0.0) || !window_radius.is_finite() {
            return Err(invalid("window radius must be positive and finite"));
        }
        for pair in positions.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(invalid("positions must be strictly increasing"));
            }
        }
        if positions
            .iter()
            .any(|x| !x.is_finite() || x.abs() > window_radius)
        {
            return Err(invalid("positions must lie inside the window"));
        }
        if weights.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(invalid("weights must be finite"));
        }
        Ok(WeightedComb {
            positions,
            weights,
            window_radius,
        })
    }

    /// Unit weights at the given (sorted) positions.
    pub fn unit(positions: Vec<f64>, window_radius: f64) -> Result<Self> {
        let weights = vec![Complex64::new(1.0, 0.0); positions.len()];
        WeightedComb::new(positions, weights, window_radius)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn volume(&self) -> f64 {
        2.0 * self.window_radius
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Points per unit volume, weighted by |w|.
    pub fn abs_intensity(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).sum::<f64>() / self.volume()
    }
}

/// Autocorrelation coefficients eta(m) on a lattice of the given spacing.
/// Only m >= 0 is stored; eta(-m) = conj(eta(m)) is structural, so the
/// hermitian constraint cannot be violated by construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutocorrCoeffs {
    spacing: f64,
    values: Vec<Complex64>,
}

impl AutocorrCoeffs {
    pub fn from_values(spacing: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(invalid("lattice spacing must be positive"));
        }
        match values.first() {
            None => return Err(invalid("need at least the lag-0 coefficient")),
            Some(v0) => {
                if v0.im.abs() > 1e-12 * v0.re.abs().max(1.0) || v0.re < 0.0 {
                    return Err(invalid("lag-0 coefficient must be real and nonnegative"));
                }
            }
        }
        Ok(AutocorrCoeffs { spacing, values })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    pub fn eta(&self, m: i64) -> Complex64 {
        let idx = m.unsigned_abs() as usize;
        let v = self.values[idx];
        if m < 0 {
            v.conj()
        } else {
            v
        }
    }

    pub fn eta0(&self) -> f64 {
        self.values[0].re
    }
}

/// Density samples over a uniform grid; bandwidth records any smoothing
/// already applied (0 = raw).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalDensity {
    grid: KGrid,
    values: Vec<f64>,
    bandwidth: f64,
}

impl EmpiricalDensity {
    pub fn new(grid: KGrid, values: Vec<f64>, bandwidth: f64) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(invalid("grid and values must have equal length"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("density values must be finite"));
        }
        if !(bandwidth >= 0.0) {
            return Err(invalid("bandwidth must be nonnegative"));
        }
        Ok(EmpiricalDensity {
            grid,
            values,
            bandwidth,
        })
    }

    pub fn grid(&self) -> &KGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Total integral by the rectangle rule (bin-mass interpretation).
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.step()
    }

    /// L1 distance to another density on the identical grid, restricted to
    /// nodes with k in [lo, hi].
    pub fn l1_distance_on(&self, other: &EmpiricalDensity, lo: f64, hi: f64) -> Result<f64> {
        if self.grid != other.grid {
            return Err(invalid("L1 distance needs identical grids"));
        }
        let mut acc = 0.0;
        for i in 0..self.grid.len() {
            let k = self.grid.value(i);
            if k >= lo && k <= hi {
                acc += (self.values[i] - other.values[i]).abs();
            }
        }
        Ok(acc * self.grid.step())
    }

    /// Sup distance on [lo, hi] against a closed form.
    pub fn sup_distance_to(&self, lo: f64, hi: f64, target: impl Fn(f64) -> f64) -> f64 {
        let mut sup: f64 = 0.0;
        for i in 0..self.grid.len() {
            let k = self.grid.value(i);
            if k >= lo && k <= hi {
                sup = sup.max((self.values[i] - target(k)).abs());
            }
        }
        sup
    }

    /// Mean of the samples with k in [lo, hi].
    pub fn mean_on(&self, lo: f64, hi: f64) -> f64 {
        let mut acc = 0.0;
        let mut n = 0usize;
        for i in 0..self.grid.len() {
            let k = self.grid.value(i);
            if k >= lo && k <= hi {
                acc += self.values[i];
                n += 1;
            }
        }
        acc / n.max(1) as f64
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> EmpiricalDensity {
        EmpiricalDensity {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            bandwidth: self.bandwidth,
        }
    }

    /// Sample a closed-form density on `grid` (bandwidth 0).
    pub fn from_fn(grid: KGrid, f: impl Fn(f64) -> f64) -> Result<EmpiricalDensity> {
        let values = grid.iter().map(&f).collect::<Vec<_>>();
        EmpiricalDensity::new(grid, values, 0.0)
    }
}

/// A diffraction measure split into its point part and a sampled
/// absolutely continuous part.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralMeasure {
    label: String,
    atoms: Vec<(f64, f64)>,
    ac_density: EmpiricalDensity,
}

impl SpectralMeasure {
    pub fn new(
        label: impl Into<String>,
        mut atoms: Vec<(f64, f64)>,
        ac_density: EmpiricalDensity,
    ) -> Result<Self> {
        if atoms
            .iter()
            .any(|&(k, i)| !k.is_finite() || !i.is_finite() || i < 0.0)
        {
            return Err(invalid("atoms need finite positions and nonnegative intensities"));
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(SpectralMeasure {
            label: label.into(),
            atoms,
            ac_density,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn ac_density(&self) -> &EmpiricalDensity {
        &self.ac_density
    }

    pub fn atom_at(&self, k: f64, tol: f64) -> Option<f64> {
        self.atoms
            .iter()
            .find(|&&(pos, _)| (pos - k).abs() <= tol)
            .map(|&(_, i)| i)
    }
}

/// Bias-corrected lattice autocorrelation:
/// eta(m) = 1/(len - m) * sum_n w(n) conj(w(n - m)), 0 <= m <= max_lag.
pub fn lattice_autocorrelation(weights: &[Complex64], max_lag: usize) -> Result<AutocorrCoeffs> {
    lattice_autocorrelation_spaced(weights, max_lag, 1.0)
}

pub fn lattice_autocorrelation_spaced(
    weights: &[Complex64],
    max_lag: usize,
    spacing: f64,
) -> Result<AutocorrCoeffs> {
    let len = weights.len();
    if len == 0 {
        return Err(invalid("empty weight sequence"));
    }
    if 2 * max_lag + 1 >= len {
        return Err(invalid(format!(
            "max lag {max_lag} too large for a window of {len} weights"
        )));
    }
    let values: Vec<Complex64> = (0..=max_lag)
        .into_par_iter()
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in m..len {
                acc += weights[n] * weights[n - m].conj();
            }
            acc / (len - m) as f64
        })
        .collect();
    AutocorrCoeffs::from_values(spacing, values)
}

/// Autocorrelation of a general point set: the lag-0 atom plus a binned
/// pair density over [-max_dist, max_dist].
#[derive(Debug, Clone)]
pub struct PairCorrelation {
    pub atom0: f64,
    pub density: EmpiricalDensity,
}

pub fn pair_correlation(
    comb: &WeightedComb,
    max_dist: f64,
    bin_width: f64,
) -> Result<PairCorrelation> {
    let (grid, complex_bins) = pair_bins(comb, max_dist, bin_width)?;
    let volume = comb.volume();
    let atom0 = comb.weights().iter().map(|w| w.norm_sqr()).sum::<f64>() / volume;
    let norm = volume * grid.step();
    // Accumulation put z at +d and conj(z) at the mirrored bin, so the
    // histogram is exactly hermitian and its real part carries the content.
    let values: Vec<f64> = complex_bins.iter().map(|z| z.re / norm).collect();
    Ok(PairCorrelation {
        atom0,
        density: EmpiricalDensity::new(grid, values, 0.0)?,
    })
}

/// Bin-center grid used by the pair histogram: left-closed bins over
/// [-max_dist, max_dist], odd in number so that lag 0 sits at a bin
/// center. Analytic comparators bin against this same layout.
pub fn pair_grid(max_dist: f64, bin_width: f64) -> Result<KGrid> {
    if !(max_dist > 0.0) || !(bin_width > 0.0) || bin_width > max_dist {
        return Err(invalid("need 0 < bin_width <= max_dist"));
    }
    let mut nbins = (2.0 * max_dist / bin_width).round() as usize;
    if nbins % 2 == 0 {
        nbins += 1;
    }
    KGrid::new(-max_dist + max_dist / nbins as f64, 2.0 * max_dist / nbins as f64, nbins)
}

/// Shared binned pair accumulation over the pair_grid layout.
pub(crate) fn pair_bins(
    comb: &WeightedComb,
    max_dist: f64,
    bin_width: f64,
) -> Result<(KGrid, Vec<Complex64>)> {
    let grid = pair_grid(max_dist, bin_width)?;
    let nbins = grid.len();
    let bw = grid.step();
    let mut bins = vec![Complex64::new(0.0, 0.0); nbins];
    let xs = comb.positions();
    let ws = comb.weights();
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let d = xs[j] - xs[i];
            if d > max_dist {
                break;
            }
            let idx = (((d + max_dist) / bw) as usize).min(nbins - 1);
            let z = ws[j] * ws[i].conj();
            bins[idx] += z;
            bins[nbins - 1 - idx] += z.conj();
        }
    }
    Ok((grid, bins))
}

/// Lag-windowed cosine transform of a binned pair correlation
/// (Blackman-Tukey): subtract the far-field `background` level, taper with
/// the triangular window that vanishes at the histogram edge, and transform
/// onto `grid`. Resolution is ~1/max_dist and the variance shrinks with the
/// window volume, so the cost never depends on the frequency resolution.
///
/// Pushing an analytic binned autocorrelation through the same transform
/// reproduces the identical binning and taper bias, which makes
/// estimator-vs-target comparisons differ by sampling noise alone.
pub fn pair_transform(
    pairs: &PairCorrelation,
    background: f64,
    grid: &KGrid,
) -> Result<EmpiricalDensity> {
    if !background.is_finite() {
        return Err(invalid("background level must be finite"));
    }
    let pg = pairs.density.grid();
    let bw = pg.step();
    let edge = -pg.start() + 0.5 * bw;
    let lags = pg.values();
    let taper: Vec<f64> = lags
        .iter()
        .zip(pairs.density.values())
        .map(|(t, u)| (u - background) * (1.0 - t.abs() / edge) * bw)
        .collect();
    let values = grid
        .values()
        .iter()
        .map(|&k| {
            let sum: f64 = lags
                .iter()
                .zip(&taper)
                .map(|(t, c)| c * (2.0 * PI * k * t).cos())
                .sum();
            pairs.atom0 + sum
        })
        .collect();
    EmpiricalDensity::new(grid.clone(), values, 0.0)
}

/// Spectral estimate from a binned pair correlation with cell averaging:
/// the tapered lag histogram goes through a zoom transform onto an
/// `oversample`-times finer grid and each display cell keeps the mean of
/// its fine samples. Two refinements over `pair_transform`: the Parzen
/// taper, whose kernel tails fall off two orders faster than the
/// triangular one so mass near sharp spectral peaks stays put instead of
/// leaking across the axis, and the cell mean, which shrinks the variance
/// because fine samples decorrelate beyond the kernel width ~1/max_dist.
pub fn binned_pair_spectrum(
    pairs: &PairCorrelation,
    background: f64,
    grid: &KGrid,
    oversample: usize,
) -> Result<EmpiricalDensity> {
    if !background.is_finite() {
        return Err(invalid("background level must be finite"));
    }
    if oversample == 0 {
        return Err(invalid("oversample factor must be positive"));
    }
    let pg = pairs.density.grid();
    let bw = pg.step();
    let edge = -pg.start() + 0.5 * bw;
    let coeffs: Vec<Complex64> = pg
        .values()
        .iter()
        .zip(pairs.density.values())
        .map(|(t, u)| Complex64::new((u - background) * parzen(t.abs() / edge) * bw, 0.0))
        .collect();
    let fstep = grid.step() / oversample as f64;
    let fstart = grid.start() - grid.step() / 2.0 + fstep / 2.0;
    let fine = KGrid::new(fstart, fstep, grid.len() * oversample)?;
    let t0 = pg.start();
    let sums = fourier::chirp_z(&coeffs, fine.start() * bw, fstep * bw, fine.len());
    let fine_values: Vec<f64> = sums
        .iter()
        .enumerate()
        .map(|(m, s)| pairs.atom0 + (s * fourier::unit_phasor_product(fine.value(m), t0)).re)
        .collect();
    let values = fine_values
        .chunks(oversample)
        .map(|block| block.iter().sum::<f64>() / oversample as f64)
        .collect();
    EmpiricalDensity::new(grid.clone(), values, 0.0)
}

/// Parzen lag window on [0, 1].
fn parzen(u: f64) -> f64 {
    if u <= 0.5 {
        1.0 - 6.0 * u * u * (1.0 - u)
    } else {
        let v = 1.0 - u;
        2.0 * v * v * v
    }
}

/// Periodogram I(k) = |sum_j w_j e^{-2 pi i k x_j}|^2 / (2r).
///
/// Positions lying exactly on a uniform lattice route through a chirp-z
/// transform; anything else is summed directly (same double-double phase
/// arithmetic, so both paths agree to ~1e-10 relative).
pub fn periodogram(comb: &WeightedComb, grid: &KGrid) -> Result<EmpiricalDensity> {
    match lattice_layout(comb.positions()) {
        Some((spacing, indices, span)) => {
            let mut dense = vec![Complex64::new(0.0, 0.0); span + 1];
            for (slot, &w) in indices.iter().zip(comb.weights()) {
                dense[*slot] = w;
            }
            let alpha0 = grid.start() * spacing;
            let dalpha = grid.step() * spacing;
            let sums = fourier::chirp_z(&dense, alpha0, dalpha, grid.len());
            let volume = comb.volume();
            let values = sums.iter().map(|s| s.norm_sqr() / volume).collect();
            EmpiricalDensity::new(grid.clone(), values, 0.0)
        }
        None => periodogram_direct(comb, grid),
    }
}

/// Direct-summation periodogram; exposed so the lattice fast path can be
/// cross-checked against it.
pub fn periodogram_direct(comb: &WeightedComb, grid: &KGrid) -> Result<EmpiricalDensity> {
    let volume = comb.volume();
    let xs = comb.positions();
    let ws = comb.weights();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let k = grid.value(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, w) in xs.iter().zip(ws) {
                acc += w * fourier::unit_phasor_product(k, *x);
            }
            acc.norm_sqr() / volume
        })
        .collect();
    EmpiricalDensity::new(grid.clone(), values, 0.0)
}

/// Periodogram block-averaged into display cells: each grid value is the
/// mean over `oversample` finer evaluations centered on its cell. Plain
/// grids alias badly once the cell width exceeds the Fourier resolution
/// 1/(2r) (spikes narrower than a cell land on or between samples at
/// random), while the cell mean keeps every resolvable fluctuation and
/// shrinks the estimator variance by the block size.
///
/// `oversample == 1` reproduces `periodogram` exactly.
pub fn binned_periodogram(
    comb: &WeightedComb,
    grid: &KGrid,
    oversample: usize,
) -> Result<EmpiricalDensity> {
    if oversample == 0 {
        return Err(invalid("oversample factor must be positive"));
    }
    let fstep = grid.step() / oversample as f64;
    let fstart = grid.start() - grid.step() / 2.0 + fstep / 2.0;
    let fine = KGrid::new(fstart, fstep, grid.len() * oversample)?;
    let pg = periodogram(comb, &fine)?;
    let values = pg
        .values()
        .chunks(oversample)
        .map(|block| block.iter().sum::<f64>() / oversample as f64)
        .collect();
    EmpiricalDensity::new(grid.clone(), values, 0.0)
}

/// Block size that takes a display grid down to the Fourier resolution of
/// the window, capped so the fine evaluation stays around 2^22 points.
pub fn nyquist_oversample(volume: f64, step: f64, grid_len: usize) -> usize {
    let cap = ((1usize << 22) / grid_len.max(1)).max(1);
    let want = (2.0 * volume * step).ceil();
    if !want.is_finite() || want < 1.0 {
        return 1;
    }
    (want as usize).clamp(1, cap)
}

/// Exact lattice detection: spacing a and integer offsets such that
/// x_j == x_0 + n_j * a bitwise.  Returns None when any residual is nonzero,
/// or when the dense span would be wasteful.
fn lattice_layout(positions: &[f64]) -> Option<(f64, Vec<usize>, usize)> {
    if positions.len() < 3 {
        return None;
    }
    let x0 = positions[0];
    let spacing = positions
        .windows(2)
        .map(|p| p[1] - p[0])
        .fold(f64::INFINITY, f64::min);
    if !(spacing > 0.0) {
        return None;
    }
    let mut indices = Vec::with_capacity(positions.len());
    let mut span = 0usize;
    for &x in positions {
        let n = ((x - x0) / spacing).round();
        if n < 0.0 || n > (1u64 << 22) as f64 || x0 + n * spacing != x {
            return None;
        }
        let slot = n as usize;
        indices.push(slot);
        span = span.max(slot);
    }
    Some((spacing, indices, span))
}

/// Triangular-kernel smoothing with whole-sample mirror extension.
/// Preserves the total integral exactly and maps flat to flat.
pub fn smooth(density: &EmpiricalDensity, bandwidth: f64) -> Result<EmpiricalDensity> {
    let step = density.grid().step();
    if bandwidth < step {
        return Err(invalid("smoothing bandwidth must be at least the grid step"));
    }
    let w = (bandwidth / step).round() as usize;
    let n = density.values().len();
    if 2 * w + 1 > n {
        return Err(invalid("smoothing kernel wider than the grid"));
    }
    let denom = ((w + 1) * (w + 1)) as f64;
    let kernel: Vec<f64> = (0..=w).map(|j| (w + 1 - j) as f64 / denom).collect();
    let reflect = |i: i64| -> usize {
        if i < 0 {
            (-i - 1) as usize
        } else if i as usize >= n {
            2 * n - 1 - i as usize
        } else {
            i as usize
        }
    };
    let vin = density.values();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut acc = kernel[0] * vin[i];
        for j in 1..=w {
            acc += kernel[j] * (vin[reflect(i as i64 - j as i64)] + vin[reflect(i as i64 + j as i64)]);
        }
        out[i] = acc;
    }
    EmpiricalDensity::new(density.grid().clone(), out, bandwidth)
}

/// Fejer-summed Fourier series of the coefficients:
/// f(k) = sum_{|m| <= M} (1 - |m|/(M+1)) eta(m) e^{-2 pi i k m a}.
/// Nonnegative up to roundoff whenever eta is positive definite.
pub fn fejer_density(coeffs: &AutocorrCoeffs, grid: &KGrid) -> Result<EmpiricalDensity> {
    let m_max = coeffs.max_lag();
    let a = coeffs.spacing();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let k = grid.value(i);
            let mut acc = coeffs.eta0();
            for m in 1..=m_max {
                let weight = 1.0 - m as f64 / (m_max + 1) as f64;
                let phase = std::f64::consts::TAU * k * (m as f64) * a;
                let eta = coeffs.eta(m as i64);
                acc += 2.0 * weight * (eta.re * phase.cos() + eta.im * phase.sin());
            }
            acc
        })
        .collect();
    EmpiricalDensity::new(grid.clone(), values, 0.0)
}

/// Wiener sum Sigma(n) = sum_{|m| <= n} |eta(m)|^2.
pub fn wiener_sigma(coeffs: &AutocorrCoeffs, n: usize) -> Result<f64> {
    if n > coeffs.max_lag() {
        return Err(invalid("Wiener sum range exceeds stored lags"));
    }
    let mut acc = coeffs.eta0() * coeffs.eta0();
    for m in 1..=n {
        acc += 2.0 * coeffs.eta(m as i64).norm_sqr();
    }
    Ok(acc)
}

/// Point-part intensity from periodogram growth across two windows:
/// an atom of intensity I makes I(k0) grow like I * volume, so the slope
/// between windows estimates I.
pub fn atom_slope_estimate(volume_small: f64, i_small: f64, volume_large: f64, i_large: f64) -> f64 {
    (i_large - i_small) / (volume_large - volume_small)
}

/// Two-window ratio test at volume ratio ~2: periodogram values that grow by
/// at least 1.5x indicate an atom, ones that stay bounded indicate ac
/// background.
pub fn atom_ratio_test(i_small: f64, i_large: f64) -> bool {
    i_large >= 1.5 * i_small
}
