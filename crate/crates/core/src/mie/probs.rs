use super::Partition;
use crate::mvn::{mvn_prob, MvnOptions};
use crate::par::{try_map_indexed, Execution};
use crate::signal::AcrModel;
use crate::special::q;
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Probability that the noisy correlation at `theta` exceeds the one at
/// `theta_p` when the true delay is `theta0`:
/// `Q(sqrt(rho/2) (R(theta_p - theta0) - R(theta - theta0)) / sqrt(1 - R(theta - theta_p)))`.
pub fn pairwise_prob(model: &AcrModel, rho: f64, theta: f64, theta_p: f64, theta0: f64) -> Result<f64> {
    let gap = 1.0 - model.r(theta - theta_p);
    if !(gap > 1e-12) {
        return Err(Error::DegeneratePair { theta, theta_prime: theta_p });
    }
    let diff = model.r(theta_p - theta0) - model.r(theta - theta0);
    Ok(q((0.5 * rho).sqrt() * diff / gap.sqrt()))
}

/// Interval probabilities with their quadrature error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalProbs {
    pub p: Vec<f64>,
    pub err: Vec<f64>,
}

/// Seed for the QMC shifts of interval `i`, decorrelated across intervals.
fn interval_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// `P^(1)_n`: probability that the testpoint correlation of interval `n` is
/// the largest, from the joint Gaussian law of all testpoint correlations.
pub fn p1(
    model: &AcrModel,
    rho: f64,
    partition: &Partition,
    theta0: f64,
    opts: &MvnOptions,
    exec: Execution,
) -> Result<IntervalProbs> {
    let tp = &partition.testpoints;
    let n = tp.len();
    let c = DMatrix::from_fn(n, n, |i, j| model.r(tp[i] - tp[j]));
    let mu: Vec<f64> = tp.iter().map(|t| rho.sqrt() * model.r(t - theta0)).collect();
    let res = try_map_indexed(exec, n, |k| -> Result<(f64, f64)> {
        if n == 1 {
            return Ok((1.0, 0.0));
        }
        let others: Vec<usize> = (0..n).filter(|&j| j != k).collect();
        // Y_j = X_j - X_k for j != k; the event is Y_j < mu_k - mu_j.
        let s = DMatrix::from_fn(n - 1, n - 1, |a, b| {
            let (i, j) = (others[a], others[b]);
            c[(i, j)] - c[(i, k)] - c[(k, j)] + c[(k, k)]
        });
        let lower = vec![f64::NEG_INFINITY; n - 1];
        let upper: Vec<f64> = others.iter().map(|&j| mu[k] - mu[j]).collect();
        let o = MvnOptions { seed: interval_seed(opts.seed, k), ..*opts };
        let r = mvn_prob(&s, &lower, &upper, &o)?;
        Ok((r.prob, r.err))
    })?;
    Ok(IntervalProbs { p: res.iter().map(|r| r.0).collect(), err: res.iter().map(|r| r.1).collect() })
}

/// `P^(2)_n`: pairwise probabilities against the true delay; the centre
/// interval uses its nearest neighbour.
pub fn p2(model: &AcrModel, rho: f64, partition: &Partition, theta0: f64) -> Result<Vec<f64>> {
    let tp = &partition.testpoints;
    (0..tp.len())
        .map(|i| {
            if i == partition.center {
                match partition.neighbour_of_center() {
                    Some(j) => pairwise_prob(model, rho, tp[i], tp[j], theta0),
                    None => Ok(1.0),
                }
            } else {
                pairwise_prob(model, rho, tp[i], theta0, theta0)
            }
        })
        .collect()
}

/// `P^(3)_n`: `P^(2)` normalised to sum to one.
pub fn p3(model: &AcrModel, rho: f64, partition: &Partition, theta0: f64) -> Result<Vec<f64>> {
    let p = p2(model, rho, partition, theta0)?;
    let s: f64 = p.iter().sum();
    if !(s > 0.0) {
        return Err(Error::Numerical("pairwise probabilities sum to zero".into()));
    }
    Ok(p.iter().map(|v| v / s).collect())
}
