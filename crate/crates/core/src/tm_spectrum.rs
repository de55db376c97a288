//! The singular continuous measure of the balanced doubling sequence on
//! [0,1]: distribution-function iteration, product densities, and the
//! middle-thirds comparator.
//!
//! Distribution functions are stored as per-cell increments rather than
//! node values. The measure develops cells thinner than 1e-30 while node
//! values sit near 1, so storing values would absorb the thin cells into
//! roundoff and fake plateaus; increments keep strict positivity visible.

use crate::error::{invalid, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Monotone function on [0,1] over a uniform grid, F(0) = 0, held as
/// nonnegative cell increments with cached prefix values.
#[derive(Debug, Clone)]
pub struct DistributionFunction {
    increments: Vec<f64>,
    values: Vec<f64>,
}

impl DistributionFunction {
    pub fn from_increments(increments: Vec<f64>) -> Result<Self> {
        if increments.len() < 2 {
            return Err(invalid("need at least two cells"));
        }
        if increments.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(invalid("increments must be finite and nonnegative"));
        }
        let mut values = Vec::with_capacity(increments.len() + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for &d in &increments {
            acc += d;
            values.push(acc);
        }
        Ok(DistributionFunction { increments, values })
    }

    /// F(x) = x: the flat starting point of the iteration.
    pub fn uniform(grid_size: usize) -> Result<Self> {
        if grid_size < 2 {
            return Err(invalid("need at least two cells"));
        }
        DistributionFunction::from_increments(vec![1.0 / grid_size as f64; grid_size])
    }

    pub fn grid_size(&self) -> usize {
        self.increments.len()
    }

    pub fn step(&self) -> f64 {
        1.0 / self.increments.len() as f64
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// Node values F(i/K), length K+1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn total(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn min_increment(&self) -> f64 {
        self.increments.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_distance(&self, other: &DistributionFunction) -> Result<f64> {
        if self.grid_size() != other.grid_size() {
            return Err(invalid("sup distance needs identical grids"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Clip stray negative cells to zero and rescale to total mass one.
    pub fn monotone_projected(&self) -> Result<Self> {
        let clipped: Vec<f64> = self.increments.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("cannot normalize a zero measure"));
        }
        DistributionFunction::from_increments(clipped.iter().map(|&v| v / total).collect())
    }

    /// Midpoint Stieltjes sum of e^{2 pi i m y} against dF.
    pub fn moment(&self, m: i64) -> Result<Complex64> {
        let k = self.grid_size();
        if m.unsigned_abs() as usize > k / 4 {
            return Err(invalid("moment order too large for the grid"));
        }
        let h = self.step();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &mass) in self.increments.iter().enumerate() {
            let y = (j as f64 + 0.5) * h;
            let phase = std::f64::consts::TAU * m as f64 * y;
            acc += mass * Complex64::new(phase.cos(), phase.sin());
        }
        Ok(acc)
    }

    /// Density at the nodes from centered differences, one-sided at the ends.
    pub fn density_centered(&self) -> Vec<f64> {
        let k = self.grid_size();
        let h = self.step();
        let mut out = Vec::with_capacity(k + 1);
        out.push(self.increments[0] / h);
        for i in 1..k {
            out.push((self.increments[i - 1] + self.increments[i]) / (2.0 * h));
        }
        out.push(self.increments[k - 1] / h);
        out
    }
}

/// One step of F_{next}(x) = (1/2) Int_0^{2x} (1 - cos(pi y)) dF(y), with dF
/// extended 1-periodically. Each target cell pulls from exactly two source
/// cells, weighted by the exact average of the integrand over each; the two
/// weights at half-period offset sum to 2, so total mass is preserved and
/// the flat start maps to x - sin(2 pi x)/(2 pi) exactly.
pub fn volterra_step(f: &DistributionFunction) -> Result<DistributionFunction> {
    let k = f.grid_size();
    if k % 2 != 0 {
        return Err(invalid("volterra step needs an even grid"));
    }
    let h = f.step();
    let sins: Vec<f64> = (0..=2 * k).map(|j| (PI * j as f64 * h).sin()).collect();
    let cell_weight = |j: usize| 1.0 - (sins[j + 1] - sins[j]) / (PI * h);
    let inc = f.increments();
    let out: Vec<f64> = (0..k)
        .map(|i| 0.5 * (cell_weight(2 * i) * inc[(2 * i) % k] + cell_weight(2 * i + 1) * inc[(2 * i + 1) % k]))
        .collect();
    DistributionFunction::from_increments(out)
}

/// Iterate from the flat start with per-step projection; returns the final
/// function and the sup distance consumed by each step.
pub fn tm_distribution(iterations: usize, grid_size: usize) -> Result<(DistributionFunction, Vec<f64>)> {
    if iterations == 0 {
        return Err(invalid("need at least one iteration"));
    }
    let mut f = DistributionFunction::uniform(grid_size)?;
    let mut steps = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let next = volterra_step(&f)?.monotone_projected()?;
        steps.push(next.sup_distance(&f)?);
        f = next;
    }
    Ok((f, steps))
}

/// Product density after n factors: prod_{m<n} (1 - cos(2^{m+1} pi x)).
pub fn riesz_density(n: u32, x: f64) -> f64 {
    let mut acc = 1.0;
    for m in 0..n {
        acc *= 1.0 - (f64::powi(2.0, m as i32 + 1) * PI * x).cos();
    }
    acc
}

/// Middle-thirds staircase from the ternary digit scan, truncated at
/// `depth` digits (accuracy 2^-depth).
pub fn cantor_function(x: f64, depth: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid("argument outside [0,1]"));
    }
    let mut t = x;
    let mut value = 0.0;
    let mut scale = 0.5;
    for _ in 0..depth {
        let digit = (t * 3.0).floor().min(2.0);
        t = t * 3.0 - digit;
        if digit == 1.0 {
            return Ok(value + scale);
        }
        if digit == 2.0 {
            value += scale;
        }
        scale *= 0.5;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn first_step_matches_closed_form() {
        let f0 = DistributionFunction::uniform(1024).unwrap();
        let f1 = volterra_step(&f0).unwrap();
        for (i, &v) in f1.values().iter().enumerate() {
            let x = i as f64 / 1024.0;
            let expect = x - (TAU * x).sin() / TAU;
            assert!((v - expect).abs() < 1e-12, "x = {x}");
        }
        assert!((f1.value(512) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mass_is_preserved_without_projection() {
        let mut f = DistributionFunction::uniform(512).unwrap();
        for _ in 0..5 {
            f = volterra_step(&f).unwrap();
            assert!((f.total() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn step_rejects_odd_grid() {
        let f = DistributionFunction::from_increments(vec![0.2; 5]).unwrap();
        assert!(volterra_step(&f).is_err());
    }

    #[test]
    fn iterates_stay_symmetric() {
        let (f, _) = tm_distribution(6, 1 << 10).unwrap();
        let k = f.grid_size();
        for i in 0..=k {
            let s = f.value(i) + f.value(k - i);
            assert!((s - 1.0).abs() < 1e-12, "node {i}");
        }
    }

    #[test]
    fn iterates_have_no_plateau_at_small_scale() {
        let (f, _) = tm_distribution(8, 1 << 8).unwrap();
        assert!(f.min_increment() > 0.0);
    }

    #[test]
    fn halving_relation_telescopes_to_previous_iterate() {
        // Summing the two preimage branches of a cell recovers the previous
        // iterate exactly, because paired cell weights add to 2.
        let mut f = DistributionFunction::uniform(1 << 10).unwrap();
        for _ in 0..4 {
            f = volterra_step(&f).unwrap();
        }
        let g = volterra_step(&f).unwrap();
        let k = g.grid_size();
        for j in (0..=k).step_by(8) {
            let combo = g.value(j / 2) + g.value(k / 2 + j / 2) - g.value(k / 2);
            assert!((combo - f.value(j)).abs() < 1e-12, "node {j}");
        }
    }

    #[test]
    fn riesz_pointwise_values() {
        assert_eq!(riesz_density(0, 0.3), 1.0);
        assert!((riesz_density(1, 0.25) - 1.0).abs() < 1e-15);
        for n in 1..6 {
            assert!(riesz_density(n, 0.0).abs() < 1e-15);
        }
    }

    #[test]
    fn riesz_integrates_to_one() {
        // All frequencies in the expanded product are below the node count,
        // so the uniform rectangle rule is exact here.
        for n in 0..=8u32 {
            let k = 1usize << (n + 2);
            let sum: f64 = (0..k).map(|j| riesz_density(n, j as f64 / k as f64)).sum();
            assert!((sum / k as f64 - 1.0).abs() < 1e-8, "n = {n}");
        }
    }

    #[test]
    fn cantor_landmarks() {
        assert!((cantor_function(1.0 / 3.0, 40).unwrap() - 0.5).abs() < 2e-12);
        assert_eq!(cantor_function(0.5, 10).unwrap(), 0.5);
        assert!((cantor_function(1.0 / 9.0, 40).unwrap() - 0.25).abs() < 2e-12);
        assert_eq!(cantor_function(0.0, 10).unwrap(), 0.0);
        assert!((cantor_function(1.0, 40).unwrap() - 1.0).abs() < 1e-9);
        assert!(cantor_function(1.2, 10).is_err());

        let mut last = -1.0;
        for i in 0..=300 {
            let v = cantor_function(i as f64 / 300.0, 30).unwrap();
            assert!(v + 1e-9 >= last);
            last = v;
        }
    }

    #[test]
    fn moments_of_uniform_vanish_off_zero() {
        let f = DistributionFunction::uniform(256).unwrap();
        assert!((f.moment(0).unwrap().re - 1.0).abs() < 1e-12);
        for m in 1..=8 {
            assert!(f.moment(m).unwrap().norm() < 1e-12);
        }
        assert!(f.moment(100).is_err());
    }

    #[test]
    fn early_moments_match_recursion_coefficients() {
        use crate::substitution::TmAutocorrelation;
        let (f, _) = tm_distribution(10, 1 << 10).unwrap();
        let mut tm = TmAutocorrelation::new();
        for m in 0..=8i64 {
            let numeric = f.moment(m).unwrap();
            let exact = tm.eta_f64(m);
            assert!((numeric.re - exact).abs() < 0.01, "m = {m}: {} vs {exact}", numeric.re);
            assert!(numeric.im.abs() < 0.01);
        }
    }
}
