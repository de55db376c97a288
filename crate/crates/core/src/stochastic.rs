//! Random sign models with known spectra: coin-toss combs, sign-flip
//! randomisation, close-packed dimers and their shift factor, and the
//! two-dimensional three-site constraint system sampled row by row.

use crate::comb::{EmpiricalDensity, KGrid, SpectralMeasure};
use crate::error::{invalid, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Seeded generator factory. Replicas draw from separate streams of the
/// same keyed cipher, so they are independent by construction and a given
/// (seed, stream) pair always reproduces the same draws.
#[derive(Debug, Clone, Copy)]
pub struct RandomSource {
    seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn master(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn replica(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

pub fn signs_to_weights(signs: &[i8]) -> Vec<Complex64> {
    signs.iter().map(|&s| Complex64::new(s as f64, 0.0)).collect()
}

/// i.i.d. signs on [-half_width, half_width], P(+1) = p.
pub fn bernoulli_comb(p: f64, half_width: usize, rng: &mut ChaCha8Rng) -> Result<Vec<i8>> {
    check_probability(p)?;
    Ok((0..2 * half_width + 1)
        .map(|_| if rng.gen_bool(p) { 1 } else { -1 })
        .collect())
}

/// Diffraction of the coin-toss comb: atoms of intensity (2p-1)^2 on the
/// integers, flat background 4p(1-p).
pub fn bernoulli_analytic(p: f64, grid: &KGrid) -> Result<SpectralMeasure> {
    check_probability(p)?;
    let atom = (2.0 * p - 1.0).powi(2);
    let background = 4.0 * p * (1.0 - p);
    let density = EmpiricalDensity::from_fn(grid.clone(), |_| background)?;
    SpectralMeasure::new("bernoulli", lattice_atoms(atom, 1.0, grid), density)
}

/// Entropy per site of the p-coin, in nats.
pub fn entropy(p: f64) -> f64 {
    let side = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.ln() };
    side(p) + side(1.0 - p)
}

/// Flip each sign independently with probability 1-p ("second thoughts").
pub fn bernoullise(signs: &[i8], p: f64, rng: &mut ChaCha8Rng) -> Result<Vec<i8>> {
    check_probability(p)?;
    Ok(signs
        .iter()
        .map(|&s| if rng.gen_bool(p) { s } else { -s })
        .collect())
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("probability outside [0,1]"));
    }
    Ok(())
}

fn lattice_atoms(intensity: f64, spacing: f64, grid: &KGrid) -> Vec<(f64, f64)> {
    if intensity < 1e-15 {
        return Vec::new();
    }
    let lo = grid.start();
    let hi = grid.value(grid.len() - 1);
    let first = (lo / spacing).ceil() as i64;
    let last = (hi / spacing).floor() as i64;
    (first..=last).map(|j| (j as f64 * spacing, intensity)).collect()
}

/// Sign sequence tiled by length-2 blocks, each (+1,-1) or (-1,+1).
/// Blocks start on parity `offset`; cells of dimers cut by the window edge
/// are filled with independent fair signs, which is the correct marginal.
#[derive(Debug, Clone)]
pub struct DimerWord {
    values: Vec<i8>,
    offset: usize,
}

impl DimerWord {
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Positions n with w(n) = w(n+1). Equal neighbours can only straddle
    /// two blocks, so every returned n has parity 1 - offset.
    pub fn agree_positions(&self) -> Vec<usize> {
        self.values
            .windows(2)
            .enumerate()
            .filter(|(_, pair)| pair[0] == pair[1])
            .map(|(n, _)| n)
            .collect()
    }
}

pub fn dimer_sample(len: usize, rng: &mut ChaCha8Rng) -> Result<DimerWord> {
    if len < 2 {
        return Err(invalid("need at least two sites"));
    }
    let offset = usize::from(rng.gen_bool(0.5));
    let mut values = vec![0i8; len];
    if offset == 1 {
        values[0] = if rng.gen_bool(0.5) { 1 } else { -1 };
    }
    let mut start = offset;
    while start < len {
        if start + 1 < len {
            let first = if rng.gen_bool(0.5) { 1 } else { -1 };
            values[start] = first;
            values[start + 1] = -first;
        } else {
            values[start] = if rng.gen_bool(0.5) { 1 } else { -1 };
        }
        start += 2;
    }
    Ok(DimerWord { values, offset })
}

/// Diffraction for weights h_plus on the first and h_minus on the second
/// cell of every block: atoms |h+ + h-|^2/4 on the integers over a
/// background (|h+ - h-|^2/4)(1 - cos 2 pi k).
pub fn dimer_analytic(
    h_plus: Complex64,
    h_minus: Complex64,
    grid: &KGrid,
) -> Result<SpectralMeasure> {
    let atom = (h_plus + h_minus).norm_sqr() / 4.0;
    let scale = (h_plus - h_minus).norm_sqr() / 4.0;
    let density = EmpiricalDensity::from_fn(grid.clone(), |k| scale * (1.0 - (TAU * k).cos()))?;
    SpectralMeasure::new("dimer", lattice_atoms(atom, 1.0, grid), density)
}

/// Neighbour-product factor v(n) = -w(n) w(n+1); +1 on every within-block
/// bond, so the image is constant +1 on the parity class `offset`.
pub fn dimer_factor(word: &DimerWord) -> Result<Vec<i8>> {
    if word.len() < 2 {
        return Err(invalid("need at least two sites"));
    }
    Ok(word
        .values
        .windows(2)
        .map(|pair| -pair[0] * pair[1])
        .collect())
}

/// Diffraction of the factor image: atoms 1/4 on the half-integers over a
/// flat background 1/2.
pub fn factor_analytic(grid: &KGrid) -> Result<SpectralMeasure> {
    let density = EmpiricalDensity::from_fn(grid.clone(), |_| 0.5)?;
    SpectralMeasure::new("dimer-factor", lattice_atoms(0.25, 0.5, grid), density)
}

/// N x N window of the three-site constraint system
/// w(x) w(x+e1) w(x+e2) = 1, stored row-major from the bottom row.
#[derive(Debug, Clone)]
pub struct LedrappierPatch {
    size: usize,
    values: Vec<i8>,
}

impl LedrappierPatch {
    /// Fill upward from an i.i.d.-sampled bottom row of length 2N-1 and
    /// trim to the window. Row y fixes row y+1 through the constraint, so
    /// the bottom row is the only free data; its coordinates are
    /// independent under the invariant measure, which makes this the exact
    /// window marginal.
    pub fn from_bottom_row(row: Vec<i8>, size: usize) -> Result<Self> {
        if size < 2 {
            return Err(invalid("window too small"));
        }
        if row.len() != 2 * size - 1 {
            return Err(invalid("bottom row must have length 2N-1"));
        }
        if row.iter().any(|&v| v != 1 && v != -1) {
            return Err(invalid("values must be +1 or -1"));
        }
        let mut values = Vec::with_capacity(size * size);
        values.extend_from_slice(&row[..size]);
        let mut current = row;
        for _ in 1..size {
            let next: Vec<i8> = current.windows(2).map(|pair| pair[0] * pair[1]).collect();
            values.extend_from_slice(&next[..size]);
            current = next;
        }
        Ok(LedrappierPatch { size, values })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn value(&self, x: usize, y: usize) -> i8 {
        self.values[y * self.size + x]
    }

    pub fn row(&self, y: usize) -> &[i8] {
        &self.values[y * self.size..(y + 1) * self.size]
    }
}

pub fn ledrappier_sample(size: usize, rng: &mut ChaCha8Rng) -> Result<LedrappierPatch> {
    if size < 2 {
        return Err(invalid("window too small"));
    }
    let row: Vec<i8> = (0..2 * size - 1)
        .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
        .collect();
    LedrappierPatch::from_bottom_row(row, size)
}

/// Unconstrained fair-sign field on the same window, for control runs.
pub fn iid_sign_field(size: usize, rng: &mut ChaCha8Rng) -> Vec<i8> {
    (0..size * size)
        .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
        .collect()
}

/// Average of w(x) w(x+e1) w(x+e2) over the window, accumulated in integer
/// arithmetic so constrained patches give exactly one.
pub fn three_point_average(values: &[i8], size: usize) -> Result<f64> {
    if size < 2 || values.len() != size * size {
        return Err(invalid("values must fill an N x N window, N >= 2"));
    }
    let mut sum: i64 = 0;
    for y in 0..size - 1 {
        for x in 0..size - 1 {
            let w = values[y * size + x] * values[y * size + x + 1] * values[(y + 1) * size + x];
            sum += w as i64;
        }
    }
    Ok(sum as f64 / ((size - 1) * (size - 1)) as f64)
}

/// Horizontal two-point statistics averaged over all rows: exact integer
/// sums per (row, lag), bias-corrected by the overlap length.
pub fn row_average_autocorrelation(values: &[i8], size: usize, max_lag: usize) -> Result<Vec<f64>> {
    if size < 2 || values.len() != size * size {
        return Err(invalid("values must fill an N x N window, N >= 2"));
    }
    if max_lag >= size {
        return Err(invalid("lag exceeds row length"));
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    for m in 0..=max_lag {
        let mut total = 0.0;
        for y in 0..size {
            let row = &values[y * size..(y + 1) * size];
            let sum: i64 = (0..size - m).map(|x| (row[x] * row[x + m]) as i64).sum();
            total += sum as f64 / (size - m) as f64;
        }
        out.push(total / size as f64);
    }
    Ok(out)
}
