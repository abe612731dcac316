//! Asymptotic lower bounds: the Taylor-linearised estimator
//! `theta0 - w' / (alpha R''(0) + w'')`, whose law is a ratio of correlated
//! Gaussians, and a Ziv-Zakai-type bound from the minimum error probability
//! of binary delay tests.

use crate::aub::p_vs_true;
use crate::quad::{integrate_panels, trapezoid};
use crate::signal::{AcrModel, NoiseDerivStats};
use crate::{Domain, Error, Result};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Density of `(a3 + x) / (a4 + y)` for independent standard normals `x, y`.
///
/// Evaluated as
/// `exp(-(a3^2+a4^2)/2) / (pi (1+xi^2)) * (1 + sqrt(2 pi) q exp(q^2/2) (1/2 - Q(q)))`
/// with `q = (a3 xi + a4) / sqrt(1 + xi^2)`, folding the exponentials together
/// (`q^2 <= a3^2 + a4^2`, so nothing overflows) and using
/// `q (1/2 - Q(q)) = |q| erf(|q|/sqrt 2) / 2`, which has no cancellation.
pub fn chi_pdf(xi: f64, a3: f64, a4: f64) -> f64 {
    let a = a3 * a3 + a4 * a4;
    let s = 1.0 + xi * xi;
    let q = (a3 * xi + a4) / s.sqrt();
    let base = (-0.5 * a).exp() / (PI * s);
    let tail = (2.0 * PI).sqrt() * q.abs() / (PI * s)
        * (0.5 * (q * q - a)).exp()
        * 0.5
        * libm::erf(q.abs() * FRAC_1_SQRT_2);
    base + tail
}

/// Affine map between the linearised estimate and the normalised ratio
/// `chi = a2 (theta - theta0 - a1)`, with `chi ~ (a3 + x) / (a4 + y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBoundParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    /// `sign(nu0)`, taken as +1 when `nu0 = 0`.
    pub sign: f64,
}

/// Parameters at SNR `rho`, in units where `N0/2 = 1` and `E_s = 1` so that
/// the amplitude is `sqrt(rho)`.
pub fn ratio_params(stats: &NoiseDerivStats, rho: f64) -> RatioBoundParams {
    let sw = stats.beta_s2().sqrt();
    let sww = stats.delta2();
    let nu = stats.nu0;
    let sign = if nu < 0.0 { -1.0 } else { 1.0 };
    let r2 = -rho.sqrt() * stats.beta_s2();
    let h = sign * sw * (1.0 - nu * nu).sqrt();
    let a1 = nu * sw / sww;
    RatioBoundParams { a1, a2: sww / h, a3: r2 * a1 / h, a4: -r2 / sww, sign }
}

/// Mean, variance and MSE of the linearised estimator's density over the
/// domain (moments truncated to the domain, not renormalised).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorAlb {
    pub mean: f64,
    pub var: f64,
    pub mse: f64,
    /// Probability mass of the density inside the domain.
    pub mass: f64,
}

pub fn taylor_alb(stats: &NoiseDerivStats, rho: f64, domain: &Domain) -> Result<TaylorAlb> {
    if !(rho > 0.0) {
        return Err(Error::Config(format!("SNR must be positive, got {rho}")));
    }
    let p = ratio_params(stats, rho);
    let centre = domain.theta0 + p.a1;
    let pdf = |t: f64| p.sign * p.a2 * chi_pdf(p.a2 * (t - centre), p.a3, p.a4);
    let scale = 1.0 / (p.a2 * p.a4.max(1.0)).abs();
    let mut breaks = vec![domain.theta1, domain.theta2];
    for k in [0.0, 1.0, 3.0, 10.0, 30.0, 100.0, 1e3] {
        breaks.push(centre + k * scale);
        breaks.push(centre - k * scale);
    }
    breaks.retain(|&t| t >= domain.theta1 && t <= domain.theta2);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mass = integrate_panels(pdf, &breaks, 1e-10);
    let mean = integrate_panels(|t| t * pdf(t), &breaks, 1e-10);
    let var = integrate_panels(|t| (t - mean).powi(2) * pdf(t), &breaks, 1e-10);
    Ok(TaylorAlb { mean, var, mse: (mean - domain.theta0).powi(2) + var, mass })
}

/// Minimum probability of error when testing delay `theta` against `theta_p`
/// with equal priors.
pub fn pmin(model: &AcrModel, rho: f64, theta: f64, theta_p: f64) -> f64 {
    p_vs_true(model, rho, theta - theta_p)
}

/// Reverse running maximum: `out[i] = max(values[i..])`.
pub fn valley_fill(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].max(out[i + 1]);
    }
    out
}

/// Ziv-Zakai-type integrals on either side of the true delay, without
/// (`z`) and with (`b`) valley filling of the error probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZzAlb {
    pub eps: [f64; 2],
    pub z: [f64; 2],
    pub b: [f64; 2],
}

const ZZ_POINTS: usize = 4096;

pub fn zz_alb(model: &AcrModel, rho: f64, domain: &Domain) -> Result<ZzAlb> {
    let t0 = domain.theta0;
    let left = t0 - domain.theta1;
    let right = domain.theta2 - t0;
    let eps = [left.min(2.0 * right), right.min(2.0 * left)];
    let lobe = 2.0 / (rho.sqrt() * model.beta_s2().sqrt());
    let mut z = [0.0; 2];
    let mut b = [0.0; 2];
    for i in 0..2 {
        if eps[i] <= 0.0 {
            continue;
        }
        let h = eps[i] / (ZZ_POINTS - 1) as f64;
        let mut xi: Vec<f64> = (0..ZZ_POINTS).map(|k| k as f64 * h).collect();
        xi[ZZ_POINTS - 1] = eps[i];
        if h > lobe / 20.0 {
            let fine = lobe / 40.0;
            xi.extend((1..=480).map(|k| k as f64 * fine).filter(|&x| x < eps[i]));
            xi.sort_by(f64::total_cmp);
            xi.dedup();
        }
        let pm: Vec<f64> = xi.iter().map(|&x| pmin(model, rho, x, 0.0)).collect();
        let filled = valley_fill(&pm);
        let f: Vec<f64> = xi.iter().zip(&pm).map(|(x, p)| x * p).collect();
        let g: Vec<f64> = xi.iter().zip(&filled).map(|(x, p)| x * p).collect();
        z[i] = trapezoid(&xi, &f);
        b[i] = trapezoid(&xi, &g);
    }
    Ok(ZzAlb { eps, z, b })
}
