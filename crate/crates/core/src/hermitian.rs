//! Eigenvalues of dense Hermitian matrices, values only: Householder
//! reduction to real symmetric tridiagonal form, then implicit-shift QL.

use crate::error::{invalid, Error, Result};
use num_complex::Complex64;

/// Eigenvalues of an n x n Hermitian matrix in row-major order, ascending.
pub fn hermitian_eigenvalues(n: usize, data: &[Complex64]) -> Result<Vec<f64>> {
    if n == 0 || data.len() != n * n {
        return Err(invalid("matrix data must be n x n with n >= 1"));
    }
    let scale = data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = 1e-12 * (1.0 + scale);
    for i in 0..n {
        for j in 0..=i {
            if (data[i * n + j] - data[j * n + i].conj()).norm() > tol {
                return Err(invalid("matrix is not hermitian"));
            }
        }
    }
    let (mut d, mut e) = tridiagonalize(n, data);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Unitary similarity to tridiagonal form. Reflectors use unit vectors v
/// with P = I - 2 v v^H, so P is Hermitian as well as unitary and the
/// trailing block update is the rank-2 form B - v w^H - w v^H. Complex
/// subdiagonal phases are harmless: a diagonal phase similarity turns them
/// into their moduli, so only |e| is extracted.
fn tridiagonalize(n: usize, data: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let mut a = data.to_vec();
    let idx = |i: usize, j: usize| i * n + j;
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let tail2: f64 = (1..m).map(|i| a[idx(k + 1 + i, k)].norm_sqr()).sum();
        if tail2 == 0.0 {
            continue;
        }
        let x0 = a[idx(k + 1, k)];
        let sigma = (x0.norm_sqr() + tail2).sqrt();
        let mu = if x0.norm() == 0.0 {
            Complex64::new(sigma, 0.0)
        } else {
            x0 * (sigma / x0.norm())
        };
        let mut v: Vec<Complex64> = (0..m).map(|i| a[idx(k + 1 + i, k)]).collect();
        v[0] += mu;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        a[idx(k + 1, k)] = -mu;
        a[idx(k, k + 1)] = -mu.conj();
        for i in 2..=m {
            a[idx(k + i, k)] = Complex64::new(0.0, 0.0);
            a[idx(k, k + i)] = Complex64::new(0.0, 0.0);
        }
        let mut p = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                acc += a[idx(k + 1 + i, k + 1 + j)] * v[j];
            }
            p[i] = 2.0 * acc;
        }
        // v^H p = 2 v^H B v is real up to roundoff; drop the imaginary dust.
        let vhp: f64 = v.iter().zip(&p).map(|(vi, pi)| (vi.conj() * pi).re).sum();
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - vhp * vi).collect();
        for i in 0..m {
            for j in 0..=i {
                let delta = v[i] * w[j].conj() + w[i] * v[j].conj();
                let val = a[idx(k + 1 + i, k + 1 + j)] - delta;
                a[idx(k + 1 + i, k + 1 + j)] = val;
                if j != i {
                    a[idx(k + 1 + j, k + 1 + i)] = val.conj();
                }
            }
        }
    }
    let d = (0..n).map(|i| a[idx(i, i)].re).collect();
    let e = (0..n.saturating_sub(1)).map(|i| a[idx(i + 1, i)].norm()).collect();
    (d, e)
}

/// Implicit-shift QL sweep on a real symmetric tridiagonal matrix;
/// eigenvalues land in d, unsorted.
fn ql_implicit(d: &mut [f64], sub: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(sub);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 50 {
                return Err(Error::Model("tridiagonal QL failed to converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflowed = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let t = (d[i] - g) * s + 2.0 * c * b;
                p = s * t;
                d[i + 1] = g + p;
                g = c * t - b;
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
