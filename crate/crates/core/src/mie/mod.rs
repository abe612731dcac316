//! Method of interval estimation: the domain is split into intervals, the
//! probability that the estimate falls in each one is approximated, and the
//! MSE is assembled from per-interval conditional moments.

mod moments;
mod partition;
mod probs;

pub use moments::{interval_moments, IntervalMoments, MomentScheme};
pub use partition::{partition, Partition, PartitionMode};
pub use probs::{p1, p2, p3, pairwise_prob, IntervalProbs};

use crate::{Error, Result};

/// Which interval-probability approximation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbMethod {
    /// Joint multivariate normal probability.
    Joint,
    /// Pairwise against the true delay.
    Pairwise,
    /// Pairwise, normalised.
    PairwiseNormalised,
}

impl ProbMethod {
    pub fn index(&self) -> usize {
        match self {
            ProbMethod::Joint => 1,
            ProbMethod::Pairwise => 2,
            ProbMethod::PairwiseNormalised => 3,
        }
    }
}

/// One interval's contribution to the MSE approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalTerm {
    pub prob: f64,
    pub mean: f64,
    pub var: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Piecewise description of the estimator's distribution and the MSE it
/// implies.
#[derive(Debug, Clone, PartialEq)]
pub struct MseApprox {
    pub mse: f64,
    pub mean: f64,
    pub terms: Vec<IntervalTerm>,
}

/// `e = P_0 sigma_0^2 + sum_{n != 0} P_n ((theta0 - mu_n)^2 + sigma_n^2)`.
pub fn msea(probs: &[f64], moments: &IntervalMoments, partition: &Partition, theta0: f64) -> Result<MseApprox> {
    let n = partition.len();
    if probs.len() != n || moments.mean.len() != n || moments.var.len() != n {
        return Err(Error::Config("interval probability/moment lengths disagree with partition".into()));
    }
    let mut mse = 0.0;
    let mut mean = 0.0;
    let mut terms = Vec::with_capacity(n);
    for i in 0..n {
        let (p, m, v) = (probs[i], moments.mean[i], moments.var[i]);
        if i == partition.center {
            mse += p * v;
        } else {
            mse += p * ((theta0 - m).powi(2) + v);
        }
        mean += p * m;
        terms.push(IntervalTerm { prob: p, mean: m, var: v, lo: partition.boundaries[i], hi: partition.boundaries[i + 1] });
    }
    Ok(MseApprox { mse, mean, terms })
}
