use super::{Partition, PartitionMode};
use crate::signal::AcrModel;
use crate::special::q;
use crate::{Error, Result};

/// Approximation of the estimator's conditional mean and variance within a
/// non-central interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentScheme {
    /// Uniform over the interval.
    Uniform,
    /// Bernoulli between the interval endpoints, probability from the ACR
    /// slope at the testpoint (non-oscillating signals).
    EndpointBernoulli,
    /// All mass at the endpoint the ACR slope points to (non-oscillating).
    EndpointPoint,
    /// Local CRLB-like spread around the testpoint, scaled by the curvature
    /// ratio (oscillating signals).
    PeakCurvature,
    /// All mass at the testpoint (oscillating).
    PeakPoint,
}

impl MomentScheme {
    pub fn label(&self) -> &'static str {
        match self {
            MomentScheme::Uniform => "U",
            MomentScheme::EndpointBernoulli => "1_c",
            MomentScheme::EndpointPoint => "2_c",
            MomentScheme::PeakCurvature => "1_o",
            MomentScheme::PeakPoint => "2_o",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMoments {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

pub fn interval_moments(
    model: &AcrModel,
    rho: f64,
    partition: &Partition,
    theta0: f64,
    scheme: MomentScheme,
) -> Result<IntervalMoments> {
    let oscillating = matches!(partition.mode, PartitionMode::Oscillating);
    match scheme {
        MomentScheme::EndpointBernoulli | MomentScheme::EndpointPoint if oscillating => {
            return Err(Error::Config(format!(
                "moment scheme {} applies to non-oscillating partitions",
                scheme.label()
            )))
        }
        MomentScheme::PeakCurvature | MomentScheme::PeakPoint if !oscillating => {
            return Err(Error::Config(format!(
                "moment scheme {} applies to oscillating partitions",
                scheme.label()
            )))
        }
        _ => {}
    }
    let beta2 = model.beta_s2();
    let c = 1.0 / (rho * beta2);
    let n = partition.len();
    let mut mean = vec![0.0; n];
    let mut var = vec![0.0; n];
    for i in 0..n {
        let (lo, hi) = (partition.boundaries[i], partition.boundaries[i + 1]);
        let w = hi - lo;
        let var_u = w * w / 12.0;
        if i == partition.center {
            mean[i] = theta0;
            var[i] = c.min(var_u);
            continue;
        }
        let tp = partition.testpoints[i];
        let (m, v) = match scheme {
            MomentScheme::Uniform => (0.5 * (lo + hi), var_u),
            MomentScheme::EndpointBernoulli => {
                let slope = model.r1(tp - theta0);
                let p_lo = q(rho.sqrt() * slope / beta2.sqrt());
                (lo * p_lo + hi * (1.0 - p_lo), (p_lo * (1.0 - p_lo) * w * w).min(var_u))
            }
            MomentScheme::EndpointPoint => {
                let slope = model.r1(tp - theta0);
                let m = if slope < 0.0 {
                    lo
                } else if slope > 0.0 {
                    hi
                } else {
                    0.5 * (lo + hi)
                };
                (m, 0.0)
            }
            MomentScheme::PeakCurvature => {
                let curv = model.r2(tp - theta0);
                if !(curv < 0.0) {
                    return Err(Error::Partition(format!(
                        "testpoint {tp:e} is not a local maximum (R'' = {curv:e})"
                    )));
                }
                (tp, (c * beta2 * beta2 / (curv * curv)).min(var_u))
            }
            MomentScheme::PeakPoint => (tp, 0.0),
        };
        mean[i] = m;
        var[i] = v;
    }
    Ok(IntervalMoments { mean, var })
}
