//! Threshold-region mean-square-error approximations and bounds for
//! maximum-likelihood time-of-arrival estimation.
//!
//! The crate is organised around a sampled pulse and its autocorrelation
//! ([`signal`]), from which every approximation and bound is computed:
//!
//! * small-error bounds ([`bounds`]): CRLB, envelope CRLB, Barankin-type bound;
//! * method of interval estimation ([`mie`]), using multivariate normal
//!   probabilities from [`mvn`];
//! * asymptotic upper bounds from pairwise error probabilities ([`aub`]);
//! * asymptotic lower bounds from the Taylor-linearised estimator and the
//!   Ziv-Zakai construction ([`alb`]);
//! * Monte Carlo simulation of the estimator itself ([`sim`]);
//! * threshold extraction from MSE-versus-SNR curves ([`thresholds`]).
//!
//! All quantities are in SI units (seconds, hertz, linear SNR) unless a name
//! says otherwise (`_db`, `_ns`, `_ps`).

pub mod alb;
pub mod aub;
pub mod bounds;
pub mod curves;
mod error;
pub mod mie;
pub mod mvn;
pub mod par;
pub mod quad;
pub mod signal;
pub mod sim;
pub mod special;
pub mod thresholds;

pub use error::{Error, Result};

/// Estimation domain `[theta1, theta2]` containing the true delay `theta0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub theta1: f64,
    pub theta2: f64,
    pub theta0: f64,
}

impl Domain {
    pub fn new(theta1: f64, theta2: f64, theta0: f64) -> Result<Self> {
        if !(theta1.is_finite() && theta2.is_finite() && theta0.is_finite()) {
            return Err(Error::Config("domain bounds must be finite".into()));
        }
        if theta1 >= theta2 {
            return Err(Error::Config(format!(
                "empty domain: theta1 = {theta1:e} >= theta2 = {theta2:e}"
            )));
        }
        if theta0 < theta1 || theta0 > theta2 {
            return Err(Error::Config(format!(
                "true delay {theta0:e} lies outside [{theta1:e}, {theta2:e}]"
            )));
        }
        Ok(Self { theta1, theta2, theta0 })
    }

    pub fn width(&self) -> f64 {
        self.theta2 - self.theta1
    }
}

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
