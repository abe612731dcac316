//! Small-error and a priori bounds: CRLB, envelope CRLB, maximum MSE and a
//! Barankin-type bound built from a finite set of testpoints.

use crate::signal::{AcrModel, EnvelopeInfo};
use crate::{Domain, Error, Result};
use nalgebra::{DMatrix, DVector};

/// Cramer-Rao bound `1 / (rho beta_s^2)`.
pub fn crlb(model: &AcrModel, rho: f64) -> f64 {
    1.0 / (rho * model.beta_s2())
}

/// Envelope CRLB `1 / (rho beta_e^2)`.
pub fn ecrlb(env: &EnvelopeInfo, rho: f64) -> f64 {
    1.0 / (rho * env.beta_e2)
}

/// MSE of a delay uniformly distributed over the domain.
pub fn max_mse(domain: &Domain) -> f64 {
    let mid = 0.5 * (domain.theta1 + domain.theta2);
    domain.width().powi(2) / 12.0 + (mid - domain.theta0).powi(2)
}

/// `(ln |expm1(x)|, sign)` without overflow.
fn ln_expm1(x: f64) -> (f64, f64) {
    if x > 0.0 {
        (x + (-(-x).exp_m1()).ln(), 1.0)
    } else if x < 0.0 {
        ((-x.exp_m1()).ln(), -1.0)
    } else {
        (f64::NEG_INFINITY, 0.0)
    }
}

/// Barankin-type bound combining the Fisher information with the
/// likelihood-ratio terms at the given testpoints.
///
/// The Gram matrix `D` has `d_00 = rho beta_s^2`, `d_0i = rho R'(theta0 - theta_i)`
/// and `d_ij = exp(rho M_ij) - 1` with
/// `M_ij = R(theta_i - theta_j) - R(theta_i - theta0) - R(theta_j - theta0) + 1`;
/// the bound is `v^T D^-1 v` with `v = (1, theta_i - theta0)`. Entries grow
/// like `exp(2 rho)`, so the system is solved after symmetric scaling by
/// `sqrt(d_ii)` computed in the log domain. Testpoints at `theta0` carry no
/// information and are skipped. With no usable testpoints this is the CRLB.
pub fn blb(model: &AcrModel, rho: f64, theta0: f64, testpoints: &[f64]) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Config(format!("SNR must be positive, got {rho}")));
    }
    let tps: Vec<f64> = testpoints
        .iter()
        .copied()
        .filter(|t| (t - theta0).abs() > 1e-6 * model.native_step())
        .collect();
    let n = tps.len() + 1;
    let beta = model.beta_s2().sqrt();
    let r_off: Vec<f64> = tps.iter().map(|t| model.r(t - theta0)).collect();
    let m = |i: usize, j: usize| model.r(tps[i] - tps[j]) - r_off[i] - r_off[j] + 1.0;
    let ln_diag: Vec<f64> = (0..tps.len()).map(|i| ln_expm1(rho * m(i, i)).0).collect();

    let mut d = DMatrix::<f64>::zeros(n, n);
    let mut v = DVector::<f64>::zeros(n);
    d[(0, 0)] = 1.0;
    v[0] = 1.0 / (rho.sqrt() * beta);
    for i in 0..tps.len() {
        let si = (-0.5 * ln_diag[i]).exp();
        v[i + 1] = (tps[i] - theta0) * si;
        let d0i = rho.sqrt() * model.r1(theta0 - tps[i]) / beta * si;
        d[(0, i + 1)] = d0i;
        d[(i + 1, 0)] = d0i;
        d[(i + 1, i + 1)] = 1.0;
        for j in 0..i {
            let (ln_abs, sign) = ln_expm1(rho * m(i, j));
            let dij = sign * (ln_abs - 0.5 * ln_diag[i] - 0.5 * ln_diag[j]).exp();
            d[(i + 1, j + 1)] = dij;
            d[(j + 1, i + 1)] = dij;
        }
    }
    if d.iter().any(|x| !x.is_finite()) || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite Barankin matrix entry".into()));
    }
    let jitter0 = 1e-12 * d.trace() / n as f64;
    let mut jitter = 0.0;
    for _ in 0..8 {
        let mut dj = d.clone();
        for i in 0..n {
            dj[(i, i)] += jitter;
        }
        if let Some(ch) = dj.cholesky() {
            let w = ch.l().solve_lower_triangular(&v).expect("triangular solve");
            return Ok(w.norm_squared());
        }
        jitter = if jitter == 0.0 { jitter0 } else { jitter * 100.0 };
    }
    Err(Error::Numerical("Barankin matrix is not positive definite".into()))
}
