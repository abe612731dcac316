//! Asymptotic upper bounds built from the pairwise probability
//! `P(theta, theta0)` that the correlation at `theta` beats the one at the
//! true delay.

use crate::mie::{Partition, PartitionMode};
use crate::quad::trapezoid;
use crate::signal::AcrModel;
use crate::special::q;
use crate::{Domain, Error, Result};
use std::f64::consts::PI;

const GRID_POINTS: usize = 4096;

/// `P(theta, theta0) = Q(sqrt(rho (1 - R(theta - theta0)) / 2))`, with the
/// limit 1/2 at `theta = theta0`.
pub fn p_vs_true(model: &AcrModel, rho: f64, offset: f64) -> f64 {
    q((0.5 * rho * (1.0 - model.r(offset)).max(0.0)).sqrt())
}

/// Density proportional to `P(theta, theta0)` on the domain, sampled on the
/// integration grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MlDensityApprox {
    pub grid: Vec<f64>,
    pub pdf: Vec<f64>,
    pub mean: f64,
    pub mse: f64,
}

/// Uniform 4096-point grid over the domain, augmented with a finer grid
/// around `theta0` whenever the main lobe of `P` (width about
/// `2 / (sqrt(rho) beta_s)`) is not resolved, plus any extra `nodes`.
fn grid(model: &AcrModel, rho: f64, domain: &Domain, nodes: &[f64]) -> Vec<f64> {
    let h = domain.width() / (GRID_POINTS - 1) as f64;
    let mut g: Vec<f64> = (0..GRID_POINTS).map(|k| domain.theta1 + k as f64 * h).collect();
    g[GRID_POINTS - 1] = domain.theta2;
    let lobe = 2.0 / (rho.sqrt() * model.beta_s2().sqrt());
    if h > lobe / 20.0 {
        let fine = lobe / 40.0;
        for k in -480..=480 {
            g.push(domain.theta0 + k as f64 * fine);
        }
    }
    g.push(domain.theta0);
    g.extend_from_slice(nodes);
    g.retain(|&t| t >= domain.theta1 && t <= domain.theta2);
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * h);
    g
}

/// `e_M`: MSE of the density `p_M(theta) ∝ P(theta, theta0)` over the domain.
pub fn e_m(model: &AcrModel, rho: f64, domain: &Domain) -> Result<MlDensityApprox> {
    let grid = grid(model, rho, domain, &[]);
    let p: Vec<f64> = grid.iter().map(|t| p_vs_true(model, rho, t - domain.theta0)).collect();
    let norm = trapezoid(&grid, &p);
    if !(norm > 0.0) {
        return Err(Error::Numerical("pairwise probability integrates to zero".into()));
    }
    let pdf: Vec<f64> = p.iter().map(|v| v / norm).collect();
    let tp: Vec<f64> = grid.iter().zip(&pdf).map(|(t, v)| t * v).collect();
    let e2: Vec<f64> = grid.iter().zip(&pdf).map(|(t, v)| (t - domain.theta0).powi(2) * v).collect();
    Ok(MlDensityApprox { mean: trapezoid(&grid, &tp), mse: trapezoid(&grid, &e2), grid, pdf })
}

/// Mixture of a CRLB-width normal around the true delay (weight `1 - p_a`)
/// and `p_M` restricted to the complement of the central region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureApprox {
    pub mse: f64,
    /// Outlier weight `2 P(theta_1, theta0)`.
    pub p_a: f64,
    /// MSE of `p_M` outside the central region.
    pub e_m_outer: f64,
    /// Offset of the first competing peak from the true delay.
    pub peak_offset: f64,
}

/// Offset of the first competing peak: the neighbouring testpoint for an
/// oscillating partition, `pi / (4 beta_s)` otherwise.
pub fn first_peak_offset(model: &AcrModel, partition: &Partition, theta0: f64) -> f64 {
    match partition.mode {
        PartitionMode::Oscillating => partition
            .neighbour_of_center()
            .map(|j| (partition.testpoints[j] - theta0).abs())
            .unwrap_or(PI / (4.0 * model.beta_s2().sqrt())),
        PartitionMode::NonOscillating { .. } => PI / (4.0 * model.beta_s2().sqrt()),
    }
}

/// `e_MN = (1 - P_A) c + P_A e'_M`.
pub fn e_mn(model: &AcrModel, rho: f64, domain: &Domain, peak_offset: f64) -> Result<MixtureApprox> {
    if !(peak_offset > 0.0) {
        return Err(Error::Config("first-peak offset must be positive".into()));
    }
    let c = 1.0 / (rho * model.beta_s2());
    let p_a = 2.0 * p_vs_true(model, rho, peak_offset);
    let (lo, hi) = (domain.theta0 - 0.5 * peak_offset, domain.theta0 + 0.5 * peak_offset);
    let grid = grid(model, rho, domain, &[lo, hi]);
    let mask = |t: f64| t <= lo || t >= hi;
    let p: Vec<f64> = grid
        .iter()
        .map(|&t| if mask(t) { p_vs_true(model, rho, t - domain.theta0) } else { 0.0 })
        .collect();
    // Cells straddling the central region are split at its edges, so the
    // masked trapezoid integrates exactly over the complement.
    let integral = |f: &dyn Fn(usize) -> f64| -> f64 {
        grid.windows(2)
            .enumerate()
            .filter(|(_, w)| mask(w[0]) && mask(w[1]) && !(w[0] <= lo && w[1] >= hi))
            .map(|(k, w)| 0.5 * (w[1] - w[0]) * (f(k) + f(k + 1)))
            .sum()
    };
    let norm = integral(&|k| p[k]);
    let e_m_outer = if norm > 0.0 {
        integral(&|k| (grid[k] - domain.theta0).powi(2) * p[k]) / norm
    } else {
        0.0
    };
    Ok(MixtureApprox { mse: (1.0 - p_a) * c + p_a * e_m_outer, p_a, e_m_outer, peak_offset })
}
