//! Multivariate normal rectangle probabilities by Genz's separation of
//! variables with randomised quasi-Monte Carlo.

use crate::special::{phi, phi_inv, phi_pdf};
use crate::{Error, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvnOptions {
    /// Total integrand evaluations (antithetic pairs count twice).
    pub n_points: usize,
    /// Number of independent random shifts used for the error estimate.
    pub shifts: usize,
    pub seed: u64,
}

impl Default for MvnOptions {
    fn default() -> Self {
        Self { n_points: 3000, shifts: 12, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvnResult {
    pub prob: f64,
    /// Three standard errors of the shift means.
    pub err: f64,
}

/// `P{b1 < B (X - mu) < b2}` for `X ~ N(mu, cov)`.
pub fn mvn_prob_linear(
    cov: &DMatrix<f64>,
    b: &DMatrix<f64>,
    b1: &[f64],
    b2: &[f64],
    opts: &MvnOptions,
) -> Result<MvnResult> {
    if b.ncols() != cov.nrows() || cov.nrows() != cov.ncols() {
        return Err(Error::Config("MVN: B and covariance shapes disagree".into()));
    }
    let s = b * cov * b.transpose();
    mvn_prob(&s, b1, b2, opts)
}

/// `P{lower < Y < upper}` for `Y ~ N(0, cov)`. Limits may be infinite.
pub fn mvn_prob(cov: &DMatrix<f64>, lower: &[f64], upper: &[f64], opts: &MvnOptions) -> Result<MvnResult> {
    let m = cov.nrows();
    if cov.ncols() != m || lower.len() != m || upper.len() != m {
        return Err(Error::Config("MVN: dimension mismatch".into()));
    }
    if lower.iter().zip(upper).any(|(a, b)| a.is_nan() || b.is_nan() || a > b) {
        return Err(Error::Config("MVN: limits must satisfy lower <= upper".into()));
    }
    if opts.shifts < 2 || opts.n_points < 2 * opts.shifts {
        return Err(Error::Config("MVN: need at least two shifts and one point per shift".into()));
    }
    if m == 0 {
        return Ok(MvnResult { prob: 1.0, err: 0.0 });
    }
    let cov = regularise(cov)?;
    if m == 1 {
        let sd = cov[(0, 0)].sqrt();
        let p = (phi(upper[0] / sd) - phi(lower[0] / sd)).max(0.0);
        return Ok(MvnResult { prob: p, err: 0.0 });
    }
    let (l, a, b) = reorder_cholesky(&cov, lower, upper);

    let q = richtmyer(m - 1);
    let per_shift = opts.n_points.div_ceil(2 * opts.shifts);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut means = Vec::with_capacity(opts.shifts);
    let mut w = vec![0.0; m - 1];
    let mut y = vec![0.0; m];
    for _ in 0..opts.shifts {
        let shift: Vec<f64> = (0..m - 1).map(|_| rng.random::<f64>()).collect();
        let mut acc = 0.0;
        for k in 1..=per_shift {
            for j in 0..m - 1 {
                let x = (k as f64 * q[j] + shift[j]).fract();
                w[j] = (2.0 * x - 1.0).abs();
            }
            acc += sov_integrand(&l, &a, &b, &w, &mut y, false);
            acc += sov_integrand(&l, &a, &b, &w, &mut y, true);
        }
        means.push(acc / (2 * per_shift) as f64);
    }
    let ns = means.len() as f64;
    let mean = means.iter().sum::<f64>() / ns;
    let var = means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (ns * (ns - 1.0));
    Ok(MvnResult { prob: mean.clamp(0.0, 1.0), err: 3.0 * var.sqrt() })
}

/// Clips tiny or slightly negative eigenvalues so that a Cholesky factor
/// exists; rejects matrices that are clearly indefinite.
fn regularise(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = (cov + cov.transpose()) * 0.5;
    if sym.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("MVN: non-finite covariance".into()));
    }
    if sym.clone().cholesky().is_some() {
        return Ok(sym);
    }
    let eig = sym.symmetric_eigen();
    let max = eig.eigenvalues.max();
    if !(max > 0.0) {
        return Err(Error::Numerical("MVN: covariance has no positive eigenvalue".into()));
    }
    let min = eig.eigenvalues.min();
    if min < -1e-10 * max {
        return Err(Error::Numerical(format!(
            "MVN: covariance not positive semidefinite (eigenvalue {min:e}, max {max:e})"
        )));
    }
    let floor = 1e-12 * max;
    let clipped = eig.eigenvalues.map(|v| v.max(floor));
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose())
}

/// Cholesky factorisation with Genz's variable reordering: at each step the
/// remaining variable with the smallest conditional interval probability is
/// integrated next. Returns the factor and the permuted limits.
fn reorder_cholesky(cov: &DMatrix<f64>, lower: &[f64], upper: &[f64]) -> (DMatrix<f64>, Vec<f64>, Vec<f64>) {
    let m = cov.nrows();
    let mut s = cov.clone();
    let mut a = lower.to_vec();
    let mut b = upper.to_vec();
    let mut l = DMatrix::<f64>::zeros(m, m);
    let mut y = vec![0.0; m];
    let floor = 1e-14 * (0..m).map(|i| s[(i, i)]).fold(0.0, f64::max);
    for i in 0..m {
        let mut best = i;
        let mut best_p = f64::INFINITY;
        for j in i..m {
            let var = s[(j, j)] - (0..i).map(|k| l[(j, k)].powi(2)).sum::<f64>();
            let sd = var.max(floor).sqrt();
            let mu: f64 = (0..i).map(|k| l[(j, k)] * y[k]).sum();
            let p = phi((b[j] - mu) / sd) - phi((a[j] - mu) / sd);
            if p < best_p {
                best_p = p;
                best = j;
            }
        }
        if best != i {
            s.swap_rows(i, best);
            s.swap_columns(i, best);
            a.swap(i, best);
            b.swap(i, best);
            for k in 0..i {
                let t = l[(i, k)];
                l[(i, k)] = l[(best, k)];
                l[(best, k)] = t;
            }
        }
        let var = s[(i, i)] - (0..i).map(|k| l[(i, k)].powi(2)).sum::<f64>();
        let lii = var.max(floor).sqrt();
        l[(i, i)] = lii;
        for j in i + 1..m {
            let dot: f64 = (0..i).map(|k| l[(j, k)] * l[(i, k)]).sum();
            l[(j, i)] = (s[(j, i)] - dot) / lii;
        }
        let mu: f64 = (0..i).map(|k| l[(i, k)] * y[k]).sum();
        let (lo, hi) = ((a[i] - mu) / lii, (b[i] - mu) / lii);
        let p = phi(hi) - phi(lo);
        y[i] = if p > 1e-300 {
            (dens(lo) - dens(hi)) / p
        } else if lo > 0.0 {
            lo
        } else if hi < 0.0 {
            hi
        } else {
            0.0
        };
    }
    (l, a, b)
}

fn dens(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        phi_pdf(x)
    }
}

fn sov_integrand(l: &DMatrix<f64>, a: &[f64], b: &[f64], w: &[f64], y: &mut [f64], antithetic: bool) -> f64 {
    let m = a.len();
    let mut d = phi(a[0] / l[(0, 0)]);
    let mut e = phi(b[0] / l[(0, 0)]);
    let mut f = e - d;
    for i in 1..m {
        if f <= 0.0 {
            return 0.0;
        }
        let wi = if antithetic { 1.0 - w[i - 1] } else { w[i - 1] };
        let u = (d + wi * (e - d)).clamp(1e-300, 1.0 - 1e-16);
        y[i - 1] = phi_inv(u);
        let s: f64 = (0..i).map(|j| l[(i, j)] * y[j]).sum();
        d = phi((a[i] - s) / l[(i, i)]);
        e = phi((b[i] - s) / l[(i, i)]);
        f *= e - d;
    }
    f.max(0.0)
}

/// Richtmyer generator `frac(sqrt(p_j))` over the first `dim` primes.
fn richtmyer(dim: usize) -> Vec<f64> {
    let mut primes = Vec::with_capacity(dim);
    let mut n = 2u64;
    while primes.len() < dim {
        if primes.iter().take_while(|&&p| p * p <= n).all(|&p| n % p != 0) {
            primes.push(n);
        }
        n += 1;
    }
    primes.iter().map(|&p| (p as f64).sqrt().fract()).collect()
}
